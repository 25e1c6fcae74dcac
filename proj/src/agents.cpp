#include "casim/agents.hpp"

#include <cmath>
#include <stdexcept>

namespace casim {

PredictorCoeffs random_coeffs(Rng& rng) {
    PredictorCoeffs coeffs;
    do {
        coeffs.a = rng.uniform01();
        coeffs.b = rng.uniform01();
        coeffs.c = rng.uniform01();
    } while (coeffs.a + coeffs.b + coeffs.c <= 0.0);
    return coeffs;
}

double predict_informed(const MarketView& view) { return view.v_now; }

double predict_uninformed(const PredictorCoeffs& coeffs, const MarketView& view) {
    const double sum = coeffs.a + coeffs.b + coeffs.c;
    if (sum <= 0.0) throw std::invalid_argument("predictor coefficients must not all be zero");
    return (coeffs.a * view.v_lagged + coeffs.b * view.p_ave + coeffs.c * view.p_mid) / sum;
}

double predict_zero_intelligence(Rng& rng, const MarketView& view) {
    return predict_uninformed(random_coeffs(rng), view);
}

SwitchDecision switcher_decide(AgentState& state, const MarketView& view) {
    const double err_uninformed = std::abs(state.last_prediction - view.p_prev);
    const double err_informed = state.bought_info_last ? std::abs(view.v_prev - view.p_prev) : 0.0;

    SwitchDecision decision;
    decision.informed = err_uninformed >= err_informed + state.info_cost;

    // The uninformed-style forecast is formed every step, informed or not,
    // so next step's comparison is always defined.
    const double uninformed_forecast = predict_uninformed(state.coeffs, view);
    decision.prediction = decision.informed ? view.v_now : uninformed_forecast;

    state.bought_info_last = decision.informed;
    state.last_prediction = uninformed_forecast;
    return decision;
}

namespace {

// Nearest tick, ties away from the agent.
Tick round_buy(double price, double tick) { return static_cast<Tick>(std::ceil(price / tick - 0.5)); }
Tick round_sell(double price, double tick) { return static_cast<Tick>(std::floor(price / tick + 0.5)); }

OrderIntent limit_buy_at(double price, double tick) {
    const Tick ticks = round_buy(price, tick);
    if (ticks < 1) return {OrderAction::none, 0};
    return {OrderAction::limit_buy, ticks};
}

OrderIntent limit_sell_at(double price, double tick) {
    const Tick ticks = round_sell(price, tick);
    if (ticks < 1) return {OrderAction::none, 0};
    return {OrderAction::limit_sell, ticks};
}

} // namespace

OrderIntent make_order_intent(double prediction, const QuoteView& quotes, double mu, double tick, Rng& rng) {
    const bool has_bid = quotes.bid.has_value();
    const bool has_ask = quotes.ask.has_value();

    if (has_bid && has_ask) {
        if (prediction > *quotes.ask + mu) return {OrderAction::market_buy, 0};
        if (prediction < *quotes.bid - mu) return {OrderAction::market_sell, 0};
        if (std::abs(*quotes.ask - prediction) <= std::abs(prediction - *quotes.bid)) {
            return limit_buy_at(prediction - mu, tick);
        }
        return limit_sell_at(prediction + mu, tick);
    }
    if (!has_bid && has_ask) {
        if (prediction > *quotes.ask + mu) return {OrderAction::market_buy, 0};
        return limit_buy_at(prediction - mu, tick);
    }
    if (has_bid && !has_ask) {
        if (prediction < *quotes.bid - mu) return {OrderAction::market_sell, 0};
        return limit_sell_at(prediction + mu, tick);
    }
    // Empty book: place a limit on a random side.
    if (rng.bernoulli(0.5)) return limit_buy_at(prediction - mu, tick);
    return limit_sell_at(prediction + mu, tick);
}

} // namespace casim
