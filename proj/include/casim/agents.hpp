#pragma once

#include <cstdint>
#include <optional>

#include "casim/order_book.hpp"
#include "casim/rng.hpp"

namespace casim {

enum class AgentType : std::uint8_t { informed, uninformed, zero_intelligence, switcher };

// Forecast weights on (lagged value, trailing average price, quote midpoint).
struct PredictorCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    bool valid() const {
        auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
        return in_unit(a) && in_unit(b) && in_unit(c) && (a + b + c) > 0.0;
    }
};

PredictorCoeffs random_coeffs(Rng& rng);

struct AgentState {
    AgentId id{0};
    AgentType type{AgentType::zero_intelligence};
    PredictorCoeffs coeffs{};      // uninformed, zero-intelligence, switcher
    double info_cost = 0.0;        // switcher
    bool bought_info_last = false; // switcher: was informed on the previous step
    double last_prediction = 0.0;  // switcher: uninformed-style forecast formed last step
};

// What an agent can see when forming its forecast. v_now is only read by
// informed agents (and switchers that buy information); v_prev only by
// switchers that were informed last step.
struct MarketView {
    double v_now = 0.0;
    double v_prev = 0.0;
    double v_lagged = 0.0; // v_{t-tau}, clamped to v_0 during warm-up
    double p_ave = 0.0;    // mean trade price over the trailing window
    double p_mid = 0.0;    // current quote midpoint, with fallbacks
    double p_prev = 0.0;   // p_{t-1}
    std::int64_t step = 0;
};

// Informed agents take the fundamental value as their price forecast.
double predict_informed(const MarketView& view);

// Weighted average of lagged value, trailing average price and midpoint.
// Throws if the weights are all zero.
double predict_uninformed(const PredictorCoeffs& coeffs, const MarketView& view);

// Same formula with weights redrawn uniformly on [0,1] every call.
double predict_zero_intelligence(Rng& rng, const MarketView& view);

struct SwitchDecision {
    bool informed = false;
    double prediction = 0.0;
};

// Cost-benefit rule: buy information when last step's uninformed forecast
// error reaches the informed error plus the information cost. An agent that
// was not informed last step scores the informed error as zero (it treats
// p_{t-1} as v_{t-1}). Updates bought_info_last and last_prediction in place.
SwitchDecision switcher_decide(AgentState& state, const MarketView& view);

// Quote snapshot in currency units.
struct QuoteView {
    std::optional<double> bid;
    std::optional<double> ask;
};

enum class OrderAction : std::uint8_t { market_buy, market_sell, limit_buy, limit_sell, none };

struct OrderIntent {
    OrderAction action = OrderAction::none;
    Tick limit_ticks = 0; // limit actions only
};

// Classifies one order against the current quotes. Limit prices are offset
// by the liquidity compensation mu and rounded to the tick grid (ties round
// against the agent: buys down, sells up). A limit price below one tick
// suppresses the order (action none).
OrderIntent make_order_intent(double prediction, const QuoteView& quotes, double mu, double tick, Rng& rng);

} // namespace casim
