#include "casim/market.hpp"

#include "casim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace casim {

namespace {

int checked_count(double fraction, int n_agents, const char* name) {
    if (fraction < 0.0 || fraction > 1.0) {
        throw std::invalid_argument(std::string(name) + " fraction must lie in [0,1]");
    }
    const double exact = fraction * n_agents;
    const double rounded = std::round(exact);
    if (std::abs(exact - rounded) > 1e-6) {
        throw std::invalid_argument(std::string(name) + " fraction does not give a whole agent count");
    }
    return static_cast<int>(rounded);
}

} // namespace

void SimConfig::validate() const {
    if (v0 <= 0.0) throw std::invalid_argument("v0 must be positive");
    if (tick <= 0.0) throw std::invalid_argument("tick size must be positive");
    if (mu < 0.0) throw std::invalid_argument("mu must be non-negative");
    if (jump_rate < 0.0) throw std::invalid_argument("jump rate must be non-negative");
    if (order_rate < 0.0) throw std::invalid_argument("order rate must be non-negative");
    if (lag < 1) throw std::invalid_argument("lag must be >= 1");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (n_agents < 1) throw std::invalid_argument("need at least one agent");
    if (info_cost < 0.0 || cost_mean < 0.0 || cost_sigma < 0.0) {
        throw std::invalid_argument("information cost parameters must be non-negative");
    }
    const double sum = mix.informed + mix.uninformed + mix.zero_intelligence + mix.switcher;
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("agent mix fractions must sum to 1");
    checked_count(mix.informed, n_agents, "informed");
    checked_count(mix.uninformed, n_agents, "uninformed");
    checked_count(mix.zero_intelligence, n_agents, "zero-intelligence");
    checked_count(mix.switcher, n_agents, "switcher");
    ga.validate();
}

int SimConfig::type_count(AgentType type) const {
    switch (type) {
        case AgentType::informed: return checked_count(mix.informed, n_agents, "informed");
        case AgentType::uninformed: return checked_count(mix.uninformed, n_agents, "uninformed");
        case AgentType::zero_intelligence: return checked_count(mix.zero_intelligence, n_agents, "zero-intelligence");
        case AgentType::switcher: return checked_count(mix.switcher, n_agents, "switcher");
    }
    return 0;
}

double TypeProfit::mean() const {
    if (orders == 0) return std::numeric_limits<double>::quiet_NaN();
    return total / static_cast<double>(orders);
}

double order_profit(Side side, double exec_price, double v_at_exec) {
    return side == Side::buy ? v_at_exec - exec_price : exec_price - v_at_exec;
}

namespace {

// Transient per-run state around the order book and agent population.
class Simulation {
public:
    explicit Simulation(const SimConfig& cfg)
        : cfg_(cfg),
          fundamental_rng_(derive_seed(cfg.seed, Stream::fundamental)),
          scheduler_rng_(derive_seed(cfg.seed, Stream::scheduler)),
          ga_rng_(derive_seed(cfg.seed, Stream::ga)) {
        cfg_.validate();
        build_agents();

        result_.config = cfg_;
        result_.v.reserve(static_cast<std::size_t>(cfg_.steps) + 1);
        result_.p.reserve(static_cast<std::size_t>(cfg_.steps) + 1);
        result_.v.push_back(cfg_.v0);
        result_.p.push_back(cfg_.v0); // initial market price is v0
        if (n_switchers_ > 0) result_.gamma.reserve(static_cast<std::size_t>(cfg_.steps));

        visit_order_.resize(agents_.size());
        std::iota(visit_order_.begin(), visit_order_.end(), std::size_t{0});
    }

    RunResult run() {
        for (std::int64_t t = 1; t <= cfg_.steps; ++t) step(t);
        int learners = 0;
        for (const AgentState& agent : agents_) {
            if (agent.type == AgentType::uninformed || agent.type == AgentType::switcher) {
                result_.mean_learned_coeffs.a += agent.coeffs.a;
                result_.mean_learned_coeffs.b += agent.coeffs.b;
                result_.mean_learned_coeffs.c += agent.coeffs.c;
                ++learners;
            }
        }
        if (learners > 0) {
            result_.mean_learned_coeffs.a /= learners;
            result_.mean_learned_coeffs.b /= learners;
            result_.mean_learned_coeffs.c /= learners;
        }
        return std::move(result_);
    }

private:
    void build_agents() {
        const int informed = cfg_.type_count(AgentType::informed);
        const int uninformed = cfg_.type_count(AgentType::uninformed);
        const int zi = cfg_.type_count(AgentType::zero_intelligence);
        const int switchers = cfg_.type_count(AgentType::switcher);
        n_switchers_ = switchers;

        AgentId id = 0;
        auto add = [&](AgentType type, int count) {
            for (int i = 0; i < count; ++i, ++id) {
                AgentState agent;
                agent.id = id;
                agent.type = type;
                agent_rngs_.emplace_back(derive_seed(cfg_.seed, Stream::agent, id));
                Rng& rng = agent_rngs_.back();

                const bool needs_coeffs = type == AgentType::uninformed || type == AgentType::switcher ||
                                          (type == AgentType::informed && cfg_.informed_act_uninformed);
                if (needs_coeffs) agent.coeffs = random_coeffs(rng);
                if (type == AgentType::switcher) {
                    agent.info_cost = draw_cost(rng);
                    agent.bought_info_last = false;
                    agent.last_prediction = cfg_.v0;
                }
                agents_.push_back(agent);
            }
        };
        add(AgentType::informed, informed);
        add(AgentType::uninformed, uninformed);
        add(AgentType::zero_intelligence, zi);
        add(AgentType::switcher, switchers);
    }

    double draw_cost(Rng& rng) {
        if (cfg_.cost_policy == CostPolicy::fixed) return cfg_.info_cost;
        double c;
        do {
            c = rng.normal(cfg_.cost_mean, cfg_.cost_sigma);
        } while (c < 0.0);
        return c;
    }

    double trailing_average(double fallback) const {
        if (window_count_ == 0) return fallback;
        return cfg_.tick * static_cast<double>(window_sum_ticks_) / static_cast<double>(window_count_);
    }

    double midpoint(double fallback) const {
        const Quotes q = book_.best_quotes();
        if (q.bid && q.ask) return 0.5 * cfg_.tick * static_cast<double>(*q.bid + *q.ask);
        if (q.bid) return cfg_.tick * static_cast<double>(*q.bid);
        if (q.ask) return cfg_.tick * static_cast<double>(*q.ask);
        return fallback;
    }

    QuoteView quotes_currency() const {
        const Quotes q = book_.best_quotes();
        QuoteView view;
        if (q.bid) view.bid = cfg_.tick * static_cast<double>(*q.bid);
        if (q.ask) view.ask = cfg_.tick * static_cast<double>(*q.ask);
        return view;
    }

    void step(std::int64_t t) {
        const double v_prev = result_.v.back();
        const double p_prev = result_.p.back();
        result_.v.push_back(step_fundamental(v_prev, {cfg_.v0, cfg_.tick, cfg_.jump_rate, cfg_.discrete_jumps},
                                             fundamental_rng_, &result_.fundamental_clamps));
        const double v_now = result_.v.back();
        const double v_lagged = result_.v[static_cast<std::size_t>(std::max<std::int64_t>(0, t - cfg_.lag))];
        const double p_ave = trailing_average(p_prev);
        const double p_mid_start = midpoint(p_prev);

        book_.set_step(t);
        if (!cfg_.fixed_order_scheduling) scheduler_rng_.shuffle(visit_order_);

        std::int64_t step_sum_ticks = 0;
        std::int64_t step_trades = 0;
        int informed_switchers = 0;

        MarketView view;
        view.v_now = v_now;
        view.v_prev = v_prev;
        view.v_lagged = v_lagged;
        view.p_ave = p_ave;
        view.p_prev = p_prev;
        view.step = t;

        for (std::size_t idx : visit_order_) {
            AgentState& agent = agents_[idx];
            Rng& rng = agent_rngs_[idx];

            book_.cancel_agent_orders(agent.id);
            const int n_orders = rng.poisson(cfg_.order_rate);
            view.p_mid = midpoint(p_prev);

            double prediction = 0.0;
            switch (agent.type) {
                case AgentType::informed:
                    prediction = cfg_.informed_act_uninformed ? predict_uninformed(agent.coeffs, view)
                                                              : predict_informed(view);
                    break;
                case AgentType::uninformed:
                    prediction = predict_uninformed(agent.coeffs, view);
                    break;
                case AgentType::zero_intelligence:
                    prediction = predict_zero_intelligence(rng, view);
                    break;
                case AgentType::switcher: {
                    const SwitchDecision decision = switcher_decide(agent, view);
                    prediction = decision.prediction;
                    if (decision.informed) {
                        ++informed_switchers;
                        result_.info_cost_paid += agent.info_cost;
                    }
                    break;
                }
            }

            for (int k = 0; k < n_orders; ++k) {
                const OrderIntent intent = make_order_intent(prediction, quotes_currency(), cfg_.mu, cfg_.tick, rng);
                if (intent.action == OrderAction::none) {
                    ++result_.suppressed_orders;
                    continue;
                }
                Order order;
                order.id = next_order_id_++;
                order.agent = agent.id;
                switch (intent.action) {
                    case OrderAction::market_buy:
                        order.side = Side::buy;
                        order.kind = OrderKind::market;
                        break;
                    case OrderAction::market_sell:
                        order.side = Side::sell;
                        order.kind = OrderKind::market;
                        break;
                    case OrderAction::limit_buy:
                        order.side = Side::buy;
                        order.kind = OrderKind::limit;
                        order.limit_price = intent.limit_ticks;
                        break;
                    case OrderAction::limit_sell:
                        order.side = Side::sell;
                        order.kind = OrderKind::limit;
                        order.limit_price = intent.limit_ticks;
                        break;
                    case OrderAction::none:
                        break;
                }
                const std::vector<Trade> trades = order.kind == OrderKind::market ? book_.submit_market(order)
                                                                                  : book_.submit_limit(order);
                for (const Trade& trade : trades) {
                    step_sum_ticks += trade.price;
                    ++step_trades;
                    record_profits(trade, v_now);
                    if (cfg_.keep_tape) result_.tape.push_back(trade);
                }
            }
        }

        const double p_now = step_trades > 0
                                 ? cfg_.tick * static_cast<double>(step_sum_ticks) / static_cast<double>(step_trades)
                                 : p_prev;
        result_.p.push_back(p_now);
        if (n_switchers_ > 0) {
            result_.gamma.push_back(static_cast<double>(informed_switchers) / static_cast<double>(n_switchers_));
        }

        slide_window(step_sum_ticks, step_trades);
        push_fitness_sample({v_lagged, p_ave, p_mid_start, p_now});
        if (t % cfg_.ga.interval_steps == 0) apply_ga();
    }

    void record_profits(const Trade& trade, double v_now) {
        const double px = cfg_.tick * static_cast<double>(trade.price);
        auto& buyer = result_.profits[static_cast<std::size_t>(agents_[trade.buyer].type)];
        buyer.total += order_profit(Side::buy, px, v_now);
        ++buyer.orders;
        auto& seller = result_.profits[static_cast<std::size_t>(agents_[trade.seller].type)];
        seller.total += order_profit(Side::sell, px, v_now);
        ++seller.orders;
    }

    void slide_window(std::int64_t sum_ticks, std::int64_t count) {
        window_.emplace_back(sum_ticks, count);
        window_sum_ticks_ += sum_ticks;
        window_count_ += count;
        if (window_.size() > static_cast<std::size_t>(cfg_.lag)) {
            window_sum_ticks_ -= window_.front().first;
            window_count_ -= window_.front().second;
            window_.pop_front();
        }
    }

    void push_fitness_sample(FitnessSample sample) {
        fit_history_.push_back(sample);
        if (fit_history_.size() > static_cast<std::size_t>(cfg_.ga.eval_window)) {
            fit_history_.erase(fit_history_.begin());
        }
    }

    void apply_ga() {
        if (fit_history_.empty()) return;
        // Uninformed agents learn jointly; switchers join while uninformed
        // and are frozen while informed. Random-coefficient agents stay out.
        ga_members_.clear();
        for (std::size_t i = 0; i < agents_.size(); ++i) {
            const AgentState& agent = agents_[i];
            const bool member = agent.type == AgentType::uninformed ||
                                (agent.type == AgentType::informed && cfg_.informed_act_uninformed) ||
                                (agent.type == AgentType::switcher && !agent.bought_info_last);
            if (member) ga_members_.push_back(i);
        }
        if (ga_members_.size() < 2) return;

        std::vector<Chromosome> population;
        population.reserve(ga_members_.size());
        const std::span<const FitnessSample> window(fit_history_);
        for (std::size_t idx : ga_members_) {
            population.push_back({agents_[idx].coeffs, fitness(agents_[idx].coeffs, window)});
        }
        const std::vector<Chromosome> next = evolve(population, ga_rng_, cfg_.ga);
        for (std::size_t i = 0; i < ga_members_.size(); ++i) {
            agents_[ga_members_[i]].coeffs = next[i].coeffs;
        }
    }

    SimConfig cfg_;
    OrderBook book_;
    std::vector<AgentState> agents_;
    std::vector<Rng> agent_rngs_;
    Rng fundamental_rng_;
    Rng scheduler_rng_;
    Rng ga_rng_;
    RunResult result_;
    std::vector<std::size_t> visit_order_;
    std::vector<std::size_t> ga_members_;
    std::vector<FitnessSample> fit_history_;
    std::deque<std::pair<std::int64_t, std::int64_t>> window_; // per-step (sum ticks, trades)
    std::int64_t window_sum_ticks_ = 0;
    std::int64_t window_count_ = 0;
    int n_switchers_ = 0;
    OrderId next_order_id_ = 1;
};

} // namespace

RunResult run_market(const SimConfig& config) {
    Simulation sim(config);
    return sim.run();
}

double RunResult::volatility() const { return casim::volatility(p); }

double RunResult::switcher_net_mean() const {
    const TypeProfit& sw = profits[static_cast<std::size_t>(AgentType::switcher)];
    if (sw.orders == 0) return std::numeric_limits<double>::quiet_NaN();
    return (sw.total - info_cost_paid) / static_cast<double>(sw.orders);
}

std::vector<double> recompute_prices(std::span<const Trade> tape, std::int64_t steps, double p0, double tick) {
    std::vector<std::int64_t> sums(static_cast<std::size_t>(steps) + 1, 0);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(steps) + 1, 0);
    for (const Trade& trade : tape) {
        if (trade.step < 1 || trade.step > steps) throw std::out_of_range("trade step outside run");
        sums[static_cast<std::size_t>(trade.step)] += trade.price;
        counts[static_cast<std::size_t>(trade.step)] += 1;
    }
    std::vector<double> p(static_cast<std::size_t>(steps) + 1, p0);
    for (std::size_t t = 1; t < p.size(); ++t) {
        p[t] = counts[t] > 0 ? tick * static_cast<double>(sums[t]) / static_cast<double>(counts[t]) : p[t - 1];
    }
    return p;
}

} // namespace casim
