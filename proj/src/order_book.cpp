#include "casim/order_book.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace casim {

void OrderBook::validate_new_order(const Order& order, OrderKind expected) const {
    if (order.kind != expected) {
        throw std::invalid_argument("order kind does not match submission path");
    }
    if (any_submitted_ && order.id <= last_id_) {
        throw std::invalid_argument("order id " + std::to_string(order.id) + " is not monotone (duplicate?)");
    }
    if (expected == OrderKind::limit && order.limit_price < 1) {
        throw std::invalid_argument("limit price must be at least one tick");
    }
}

template <typename Levels>
Trade OrderBook::pop_best(Levels& levels, const Order& incoming) {
    auto level = levels.begin();
    Resting resting = level->second.front();
    level->second.pop_front();
    if (level->second.empty()) levels.erase(level);

    id_index_.erase(resting.id);
    drop_agent_index(resting.agent, resting.id);
    --resting_;
    executed_ += 2; // both legs of the trade are filled orders

    Trade trade;
    trade.step = step_;
    if (incoming.side == Side::buy) {
        trade.buy_order = incoming.id;
        trade.buyer = incoming.agent;
        trade.sell_order = resting.id;
        trade.seller = resting.agent;
    } else {
        trade.sell_order = incoming.id;
        trade.seller = incoming.agent;
        trade.buy_order = resting.id;
        trade.buyer = resting.agent;
    }
    return trade;
}

std::vector<Trade> OrderBook::submit_limit(const Order& order) {
    validate_new_order(order, OrderKind::limit);
    last_id_ = order.id;
    any_submitted_ = true;
    ++submitted_;
    ++next_seq_;

    std::vector<Trade> trades;
    // One-share orders fill in a single trade; the loop shape mirrors the
    // general CDA matching rule (trade at the resting order's price while
    // the incoming order still crosses).
    if (order.side == Side::buy) {
        if (!asks_.empty() && asks_.begin()->first <= order.limit_price) {
            const Tick exec = asks_.begin()->first;
            Trade t = pop_best(asks_, order);
            t.price = exec;
            trades.push_back(t);
            return trades;
        }
    } else {
        if (!bids_.empty() && bids_.begin()->first >= order.limit_price) {
            const Tick exec = bids_.begin()->first;
            Trade t = pop_best(bids_, order);
            t.price = exec;
            trades.push_back(t);
            return trades;
        }
    }
    rest_order(order);
    return trades;
}

std::vector<Trade> OrderBook::submit_market(const Order& order) {
    validate_new_order(order, OrderKind::market);
    if ((order.side == Side::buy && asks_.empty()) || (order.side == Side::sell && bids_.empty())) {
        throw std::logic_error("market order submitted into an empty side");
    }
    last_id_ = order.id;
    any_submitted_ = true;
    ++submitted_;
    ++next_seq_;

    std::vector<Trade> trades;
    if (order.side == Side::buy) {
        const Tick exec = asks_.begin()->first;
        Trade t = pop_best(asks_, order);
        t.price = exec;
        trades.push_back(t);
    } else {
        const Tick exec = bids_.begin()->first;
        Trade t = pop_best(bids_, order);
        t.price = exec;
        trades.push_back(t);
    }
    return trades;
}

void OrderBook::rest_order(const Order& order) {
    const Resting resting{order.id, order.agent, next_seq_ - 1};
    if (order.side == Side::buy) {
        bids_[order.limit_price].push_back(resting);
    } else {
        asks_[order.limit_price].push_back(resting);
    }
    id_index_.emplace(order.id, std::make_pair(order.side, order.limit_price));
    agent_orders_[order.agent].push_back(order.id);
    ++resting_;
}

void OrderBook::drop_agent_index(AgentId agent, OrderId id) {
    auto it = agent_orders_.find(agent);
    if (it == agent_orders_.end()) return;
    auto& ids = it->second;
    auto pos = std::find(ids.begin(), ids.end(), id);
    if (pos != ids.end()) {
        *pos = ids.back();
        ids.pop_back();
    }
}

std::size_t OrderBook::cancel_agent_orders(AgentId agent) {
    auto it = agent_orders_.find(agent);
    if (it == agent_orders_.end() || it->second.empty()) return 0;

    std::size_t count = 0;
    for (OrderId id : it->second) {
        auto loc = id_index_.find(id);
        if (loc == id_index_.end()) continue;
        const auto [side, price] = loc->second;
        auto erase_from = [&](auto& levels) {
            auto level = levels.find(price);
            auto& queue = level->second;
            for (auto q = queue.begin(); q != queue.end(); ++q) {
                if (q->id == id) {
                    queue.erase(q);
                    break;
                }
            }
            if (queue.empty()) levels.erase(level);
        };
        if (side == Side::buy) {
            erase_from(bids_);
        } else {
            erase_from(asks_);
        }
        id_index_.erase(loc);
        --resting_;
        ++cancelled_;
        ++count;
    }
    it->second.clear();
    return count;
}

Quotes OrderBook::best_quotes() const { return {best_bid(), best_ask()}; }

std::optional<Tick> OrderBook::best_bid() const {
    if (bids_.empty()) return std::nullopt;
    return bids_.begin()->first;
}

std::optional<Tick> OrderBook::best_ask() const {
    if (asks_.empty()) return std::nullopt;
    return asks_.begin()->first;
}

std::vector<Order> OrderBook::side_snapshot(Side side) const {
    std::vector<Order> out;
    auto collect = [&](const auto& levels) {
        for (const auto& [price, queue] : levels) {
            for (const auto& resting : queue) {
                out.push_back(Order{resting.id, resting.agent, side, OrderKind::limit, price});
            }
        }
    };
    if (side == Side::buy) {
        collect(bids_);
    } else {
        collect(asks_);
    }
    return out;
}

} // namespace casim
