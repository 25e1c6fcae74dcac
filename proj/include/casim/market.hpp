#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "casim/agents.hpp"
#include "casim/fundamental.hpp"
#include "casim/ga.hpp"
#include "casim/order_book.hpp"

namespace casim {

// Population shares of the four trader types. They must sum to one and give
// whole agent counts for the configured population size.
struct AgentMix {
    double informed = 0.12;
    double uninformed = 0.30;
    double zero_intelligence = 0.58;
    double switcher = 0.0;
};

enum class CostPolicy : std::uint8_t { fixed, gaussian };

struct SimConfig {
    double v0 = 20.0;
    double tick = 0.01;       // delta
    double mu = 0.04;         // liquidity compensation / transaction cost
    double jump_rate = 4.0;   // phi: fundamental jumps per step
    double order_rate = 1.0;  // lambda: orders per agent per step
    std::int64_t lag = 1200;  // tau: information lag and trailing window
    std::int64_t steps = 12000;
    int n_agents = 100;
    AgentMix mix{};

    CostPolicy cost_policy = CostPolicy::fixed;
    double info_cost = 0.36;   // fixed policy
    double cost_mean = 0.36;   // gaussian policy, truncated at zero
    double cost_sigma = 0.0683;

    GAConfig ga{};

    bool discrete_jumps = false;          // two-point fundamental jumps
    bool fixed_order_scheduling = false;  // visit agents in id order
    bool informed_act_uninformed = false; // diagnostic: informed clone the uninformed rule
    bool keep_tape = true;
    std::uint64_t seed = 1;

    void validate() const;
    int type_count(AgentType type) const;
};

struct TypeProfit {
    double total = 0.0;
    std::int64_t orders = 0;

    double mean() const;
};

struct RunResult {
    SimConfig config{};
    std::vector<double> v;     // fundamental, length steps+1
    std::vector<double> p;     // market price, length steps+1, p[0] = v0
    std::vector<double> gamma; // informed share of switchers per step; empty when none
    std::vector<Trade> tape;   // populated when config.keep_tape

    std::array<TypeProfit, 4> profits{}; // indexed by AgentType
    double info_cost_paid = 0.0;         // total charged to switchers
    std::int64_t fundamental_clamps = 0;
    std::int64_t suppressed_orders = 0;
    PredictorCoeffs mean_learned_coeffs{}; // mean over GA-evolved agents at run end

    double volatility() const;
    double switcher_net_mean() const; // per order, after the information cost
};

// Deterministic full run: the result is a pure function of the config.
RunResult run_market(const SimConfig& config);

// Per-order profit against the fundamental value at execution time.
double order_profit(Side side, double exec_price, double v_at_exec);

// Offline price series from a trade tape: per-step mean trade price with
// carry-forward on empty steps. Must reproduce RunResult::p exactly.
std::vector<double> recompute_prices(std::span<const Trade> tape, std::int64_t steps, double p0, double tick);

} // namespace casim
