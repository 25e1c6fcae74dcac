#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "casim/agents.hpp"

using namespace casim;

namespace {

MarketView view_with(double v_lagged, double p_ave, double p_mid) {
    MarketView v;
    v.v_lagged = v_lagged;
    v.p_ave = p_ave;
    v.p_mid = p_mid;
    return v;
}

} // namespace

TEST_CASE("informed prediction is the current fundamental value") {
    MarketView v = view_with(19.0, 21.0, 22.0);
    v.v_now = 20.0;
    CHECK(predict_informed(v) == 20.0);
    v.v_now = 19.37;
    CHECK(predict_informed(v) == 19.37);
    v.p_ave = 500.0; // ignored
    CHECK(predict_informed(v) == 19.37);
}

TEST_CASE("uninformed prediction is the normalized weighted average") {
    CHECK(predict_uninformed({1, 0, 0}, view_with(19.5, 20.1, 20.4)) == doctest::Approx(19.5));
    CHECK(predict_uninformed({1, 1, 1}, view_with(19.5, 20.1, 20.4)) == doctest::Approx(20.0));
    CHECK(predict_uninformed({0.2, 0.3, 0.5}, view_with(20, 21, 22)) == doctest::Approx(21.3));
    CHECK_THROWS_AS(predict_uninformed({0, 0, 0}, view_with(1, 2, 3)), std::invalid_argument);
}

TEST_CASE("zero-intelligence prediction is a convex combination") {
    Rng rng(1);
    const MarketView equal = view_with(20.0, 20.0, 20.0);
    for (int i = 0; i < 100; ++i) CHECK(predict_zero_intelligence(rng, equal) == doctest::Approx(20.0));

    const MarketView v = view_with(19.0, 20.0, 21.0);
    for (int i = 0; i < 10000; ++i) {
        const double p = predict_zero_intelligence(rng, v);
        CHECK(p >= 19.0);
        CHECK(p <= 21.0);
    }
}

TEST_CASE("zero-intelligence predictions center on the input mean") {
    Rng rng(2);
    const MarketView v = view_with(19.0, 20.0, 21.0);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double p = predict_zero_intelligence(rng, v);
        sum += p;
        sumsq += p * p;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sumsq / n - mean * mean);
    CHECK(std::abs(mean - 20.0) < 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("switcher stays uninformed when the forecast error is below the cost") {
    AgentState s;
    s.type = AgentType::switcher;
    s.coeffs = {1, 0, 0};
    s.info_cost = 0.36;
    s.bought_info_last = false;  // informed error scores as zero
    s.last_prediction = 20.10;

    MarketView v = view_with(19.5, 20.0, 20.0);
    v.p_prev = 20.0; // e_u = 0.10 < 0 + 0.36
    v.v_now = 21.0;
    const SwitchDecision d = switcher_decide(s, v);
    CHECK_FALSE(d.informed);
    CHECK(d.prediction == doctest::Approx(19.5)); // Eq-3 forecast from v_lagged
    CHECK_FALSE(s.bought_info_last);
    CHECK(s.last_prediction == doctest::Approx(19.5));
}

TEST_CASE("switcher buys again when the uninformed error dominates") {
    AgentState s;
    s.type = AgentType::switcher;
    s.coeffs = {1, 0, 0};
    s.info_cost = 0.36;
    s.bought_info_last = true;
    s.last_prediction = 20.50;

    MarketView v = view_with(19.5, 20.0, 20.0);
    v.p_prev = 20.00;
    v.v_prev = 20.00; // e_i = 0, e_u = 0.50 >= 0.36
    v.v_now = 20.07;
    const SwitchDecision d = switcher_decide(s, v);
    CHECK(d.informed);
    CHECK(d.prediction == 20.07);
    CHECK(s.bought_info_last);
}

TEST_CASE("zero cost ties go to buying") {
    AgentState s;
    s.type = AgentType::switcher;
    s.coeffs = {1, 0, 0};
    s.info_cost = 0.0;
    s.bought_info_last = true;
    s.last_prediction = 20.25;

    MarketView v = view_with(20.0, 20.0, 20.0);
    v.p_prev = 20.0;
    v.v_prev = 20.25; // e_u == e_i == 0.25
    v.v_now = 20.3;
    const SwitchDecision d = switcher_decide(s, v);
    CHECK(d.informed);
}

TEST_CASE("zero-cost branch matches the error comparison on an enumerated table") {
    const struct { double e_u, e_i; bool buys; } cases[] = {
        {0.00, 0.00, true},  {0.10, 0.05, true},  {0.05, 0.10, false},
        {0.30, 0.30, true},  {0.00, 0.01, false}, {0.50, 0.10, true},
    };
    for (const auto& c : cases) {
        AgentState s;
        s.type = AgentType::switcher;
        s.coeffs = {1, 0, 0};
        s.info_cost = 0.0;
        s.bought_info_last = true;
        s.last_prediction = 20.0 + c.e_u;
        MarketView v = view_with(20.0, 20.0, 20.0);
        v.p_prev = 20.0;
        v.v_prev = 20.0 + c.e_i;
        v.v_now = 20.5;
        CHECK(switcher_decide(s, v).informed == c.buys);
    }
}

TEST_CASE("infinite cost makes a switcher behave as uninformed") {
    AgentState sw;
    sw.type = AgentType::switcher;
    sw.coeffs = {0.4, 0.3, 0.3};
    sw.info_cost = std::numeric_limits<double>::infinity();
    sw.last_prediction = 20.0;

    Rng drive(77);
    double p_prev = 20.0;
    for (int step = 0; step < 500; ++step) {
        MarketView v = view_with(20.0 + drive.uniform(-1, 1), p_prev + drive.uniform(-0.5, 0.5),
                                 p_prev + drive.uniform(-0.1, 0.1));
        v.p_prev = p_prev;
        v.v_prev = p_prev + drive.uniform(-1, 1);
        v.v_now = p_prev + drive.uniform(-1, 1);
        const SwitchDecision d = switcher_decide(sw, v);
        CHECK_FALSE(d.informed);
        CHECK(d.prediction == doctest::Approx(predict_uninformed(sw.coeffs, v)));
        p_prev += drive.uniform(-0.2, 0.2);
    }
}

TEST_CASE("order intents follow the submission rules with both quotes") {
    Rng rng(1);
    const double mu = 0.04, tick = 0.01;

    QuoteView q{19.90, 20.00};
    CHECK(make_order_intent(20.10, q, mu, tick, rng).action == OrderAction::market_buy);
    CHECK(make_order_intent(19.70, q, mu, tick, rng).action == OrderAction::market_sell);

    q = QuoteView{19.90, 20.03};
    const OrderIntent buy = make_order_intent(20.00, q, mu, tick, rng);
    CHECK(buy.action == OrderAction::limit_buy);
    CHECK(buy.limit_ticks == 1996);

    // closer to the bid: sell side provides liquidity at p_e + mu
    const OrderIntent sell = make_order_intent(19.92, q, mu, tick, rng);
    CHECK(sell.action == OrderAction::limit_sell);
    CHECK(sell.limit_ticks == 1996);
}

TEST_CASE("one-sided books never get a market order into the void") {
    Rng rng(2);
    const double mu = 0.04, tick = 0.01;

    QuoteView only_ask{std::nullopt, 20.00};
    CHECK(make_order_intent(20.10, only_ask, mu, tick, rng).action == OrderAction::market_buy);
    CHECK(make_order_intent(19.00, only_ask, mu, tick, rng).action == OrderAction::limit_buy);

    QuoteView only_bid{19.90, std::nullopt};
    CHECK(make_order_intent(19.00, only_bid, mu, tick, rng).action == OrderAction::market_sell);
    CHECK(make_order_intent(20.50, only_bid, mu, tick, rng).action == OrderAction::limit_sell);
}

TEST_CASE("empty book splits limit sides evenly") {
    Rng rng(3);
    const QuoteView none{};
    int buys = 0, sells = 0;
    for (int i = 0; i < 10000; ++i) {
        const OrderIntent intent = make_order_intent(20.00, none, 0.04, 0.01, rng);
        if (intent.action == OrderAction::limit_buy) {
            CHECK(intent.limit_ticks == 1996);
            ++buys;
        } else {
            REQUIRE(intent.action == OrderAction::limit_sell);
            CHECK(intent.limit_ticks == 2004);
            ++sells;
        }
    }
    CHECK(buys > 4700);
    CHECK(sells > 4700);
}

TEST_CASE("limit prices round to the grid with ties against the agent") {
    Rng rng(4);
    // power-of-two values keep the half-tick ties exact in binary
    // buy: 1.125 - 0.5 = 0.625 = 2.5 ticks of 0.25 -> tie rounds down to 2
    const OrderIntent buy = make_order_intent(1.125, QuoteView{std::nullopt, 10.0}, 0.5, 0.25, rng);
    CHECK(buy.action == OrderAction::limit_buy);
    CHECK(buy.limit_ticks == 2);
    // sell: 0.125 + 0.5 = 0.625 = 2.5 ticks -> tie rounds up to 3
    const OrderIntent sell = make_order_intent(0.125, QuoteView{0.25, std::nullopt}, 0.5, 0.25, rng);
    CHECK(sell.action == OrderAction::limit_sell);
    CHECK(sell.limit_ticks == 3);
}

TEST_CASE("non-positive limit prices suppress the order") {
    Rng rng(5);
    const OrderIntent intent = make_order_intent(0.02, QuoteView{std::nullopt, 10.0}, 0.04, 0.01, rng);
    CHECK(intent.action == OrderAction::none);
}

TEST_CASE("classification is total and safe under fuzzing") {
    Rng rng(6);
    for (int i = 0; i < 100000; ++i) {
        QuoteView q;
        if (rng.bernoulli(0.7)) q.bid = rng.uniform(0.0, 40.0);
        if (rng.bernoulli(0.7)) q.ask = rng.uniform(q.bid.value_or(0.0), 41.0);
        const double p_e = rng.uniform(-1.0, 41.0);
        const OrderIntent intent = make_order_intent(p_e, q, 0.04, 0.01, rng);
        switch (intent.action) {
            case OrderAction::market_buy:
                CHECK(q.ask.has_value());
                break;
            case OrderAction::market_sell:
                CHECK(q.bid.has_value());
                break;
            case OrderAction::limit_buy:
            case OrderAction::limit_sell:
                CHECK(intent.limit_ticks >= 1);
                break;
            case OrderAction::none:
                break; // suppressed sub-tick price
        }
    }
}
