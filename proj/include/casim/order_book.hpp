#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

namespace casim {

// Prices live on an integer tick grid; currency value = ticks * tick size.
using Tick = std::int64_t;
using OrderId = std::uint64_t;
using AgentId = std::uint32_t;

enum class Side : std::uint8_t { buy, sell };
enum class OrderKind : std::uint8_t { limit, market };

// Every order is for exactly one share.
struct Order {
    OrderId id{0};
    AgentId agent{0};
    Side side{Side::buy};
    OrderKind kind{OrderKind::limit};
    Tick limit_price{0}; // limit orders only
};

struct Trade {
    Tick price{0}; // always the resting order's limit price
    OrderId buy_order{0};
    OrderId sell_order{0};
    AgentId buyer{0};
    AgentId seller{0};
    std::int64_t step{0};
};

struct Quotes {
    std::optional<Tick> bid;
    std::optional<Tick> ask;
};

// Continuous double auction book: price-time priority, one-share orders,
// per-agent cancellation. Mutated only by the simulation loop.
class OrderBook {
public:
    // Matches the order against the opposite queue while it crosses; any
    // unfilled remainder rests. Throws on non-monotone ids or prices < 1 tick.
    std::vector<Trade> submit_limit(const Order& order);

    // Executes one share at the best opposite quote. Throws if the opposite
    // side is empty: the submission rules never emit such an order.
    std::vector<Trade> submit_market(const Order& order);

    // Removes every resting order owned by the agent; other orders keep
    // their time priority. Returns the number of orders removed.
    std::size_t cancel_agent_orders(AgentId agent);

    Quotes best_quotes() const;
    std::optional<Tick> best_bid() const;
    std::optional<Tick> best_ask() const;

    void set_step(std::int64_t step) { step_ = step; }

    std::size_t resting_count() const { return resting_; }
    std::uint64_t submitted_count() const { return submitted_; }
    std::uint64_t executed_count() const { return executed_; }
    std::uint64_t cancelled_count() const { return cancelled_; }

    // Resting orders of one side in priority order, for inspection and tests.
    std::vector<Order> side_snapshot(Side side) const;

private:
    struct Resting {
        OrderId id;
        AgentId agent;
        std::uint64_t seq;
    };
    using BidLevels = std::map<Tick, std::deque<Resting>, std::greater<Tick>>;
    using AskLevels = std::map<Tick, std::deque<Resting>, std::less<Tick>>;

    void validate_new_order(const Order& order, OrderKind expected) const;
    void rest_order(const Order& order);
    template <typename Levels>
    Trade pop_best(Levels& levels, const Order& incoming);
    void drop_agent_index(AgentId agent, OrderId id);

    BidLevels bids_;
    AskLevels asks_;
    std::unordered_map<OrderId, std::pair<Side, Tick>> id_index_;
    std::unordered_map<AgentId, std::vector<OrderId>> agent_orders_;
    OrderId last_id_{0};
    bool any_submitted_{false};
    std::uint64_t next_seq_{1};
    std::int64_t step_{0};
    std::size_t resting_{0};
    std::uint64_t submitted_{0};
    std::uint64_t executed_{0};
    std::uint64_t cancelled_{0};
};

} // namespace casim
