#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "casim/order_book.hpp"
#include "casim/rng.hpp"
#include "reference_matcher.hpp"

using namespace casim;

namespace {

Order limit(OrderId id, AgentId agent, Side side, Tick price) {
    return {id, agent, side, OrderKind::limit, price};
}

Order market(OrderId id, AgentId agent, Side side) { return {id, agent, side, OrderKind::market, 0}; }

} // namespace

TEST_CASE("limit buy into empty book rests") {
    OrderBook book;
    const auto trades = book.submit_limit(limit(1, 0, Side::buy, 1996));
    CHECK(trades.empty());
    CHECK(book.best_bid() == Tick{1996});
    CHECK_FALSE(book.best_ask().has_value());
    CHECK(book.resting_count() == 1);
}

TEST_CASE("time priority at equal price") {
    OrderBook book;
    book.submit_limit(limit(1, 10, Side::sell, 2000));
    book.submit_limit(limit(2, 11, Side::sell, 2000));
    const auto trades = book.submit_limit(limit(3, 12, Side::buy, 2005));
    REQUIRE(trades.size() == 1);
    CHECK(trades[0].price == 2000);
    CHECK(trades[0].sell_order == 1); // first in, first matched
    CHECK(trades[0].buy_order == 3);
    CHECK(book.best_ask() == Tick{2000});
    CHECK(book.resting_count() == 1);
}

TEST_CASE("aggressive limit executes at resting price") {
    OrderBook book;
    book.submit_limit(limit(1, 1, Side::buy, 1990));
    const auto trades = book.submit_limit(limit(2, 2, Side::sell, 1985));
    REQUIRE(trades.size() == 1);
    CHECK(trades[0].price == 1990);
    CHECK(book.resting_count() == 0);
}

TEST_CASE("market orders hit the best quote") {
    OrderBook book;
    book.submit_limit(limit(1, 1, Side::sell, 2002));
    auto trades = book.submit_market(market(2, 2, Side::buy));
    REQUIRE(trades.size() == 1);
    CHECK(trades[0].price == 2002);

    book.submit_limit(limit(3, 1, Side::buy, 1995));
    book.submit_limit(limit(4, 1, Side::buy, 1990));
    trades = book.submit_market(market(5, 2, Side::sell));
    REQUIRE(trades.size() == 1);
    CHECK(trades[0].price == 1995);
}

TEST_CASE("market order into empty side is rejected") {
    OrderBook book;
    CHECK_THROWS_AS(book.submit_market(market(1, 0, Side::buy)), std::logic_error);
}

TEST_CASE("non-monotone order id is rejected") {
    OrderBook book;
    book.submit_limit(limit(5, 0, Side::buy, 100));
    CHECK_THROWS_AS(book.submit_limit(limit(5, 0, Side::sell, 200)), std::invalid_argument);
    CHECK_THROWS_AS(book.submit_limit(limit(3, 0, Side::sell, 200)), std::invalid_argument);
}

TEST_CASE("limit price below one tick is rejected") {
    OrderBook book;
    CHECK_THROWS_AS(book.submit_limit(limit(1, 0, Side::buy, 0)), std::invalid_argument);
}

TEST_CASE("cancel removes only the agent's orders") {
    OrderBook book;
    book.submit_limit(limit(1, 7, Side::buy, 1990));
    book.submit_limit(limit(2, 7, Side::buy, 1985));
    book.submit_limit(limit(3, 8, Side::buy, 1990));
    CHECK(book.cancel_agent_orders(7) == 2);
    CHECK(book.cancel_agent_orders(7) == 0);
    CHECK(book.resting_count() == 1);
    CHECK(book.best_bid() == Tick{1990});
}

TEST_CASE("cancellation preserves the priority of other orders") {
    OrderBook book;
    book.submit_limit(limit(1, 1, Side::sell, 2000)); // agent 1, first at level
    book.submit_limit(limit(2, 2, Side::sell, 2000)); // agent 2, second
    book.submit_limit(limit(3, 3, Side::sell, 2000)); // agent 3, third
    book.cancel_agent_orders(1);
    // agent 2 now holds time priority at the level
    const auto trades = book.submit_limit(limit(4, 4, Side::buy, 2000));
    REQUIRE(trades.size() == 1);
    CHECK(trades[0].sell_order == 2);
}

TEST_CASE("empty and one-sided quote queries") {
    OrderBook book;
    const Quotes empty = book.best_quotes();
    CHECK_FALSE(empty.bid.has_value());
    CHECK_FALSE(empty.ask.has_value());

    book.submit_limit(limit(1, 0, Side::buy, 1990));
    book.submit_limit(limit(2, 0, Side::buy, 1995));
    CHECK(book.best_bid() == Tick{1995});

    book.submit_limit(limit(3, 1, Side::sell, 2010));
    book.submit_limit(limit(4, 1, Side::sell, 2002));
    CHECK(book.best_ask() == Tick{2002});
}

namespace {

struct StreamStats {
    std::uint64_t submitted = 0;
    std::uint64_t executed = 0;
    std::uint64_t cancelled = 0;
};

// Random op stream applied to both engines; trades must agree exactly.
std::vector<Trade> drive(OrderBook& book, test::ReferenceBook& ref, Rng& rng, int n_ops, StreamStats* stats = nullptr) {
    std::vector<Trade> tape;
    OrderId next_id = 1;
    for (int i = 0; i < n_ops; ++i) {
        const AgentId agent = static_cast<AgentId>(rng.uniform_int(5));
        const int action = static_cast<int>(rng.uniform_int(10));
        if (action == 0) {
            const std::size_t a = book.cancel_agent_orders(agent);
            const std::size_t b = ref.cancel_agent_orders(agent);
            REQUIRE(a == b);
            if (stats) stats->cancelled += a;
            continue;
        }
        const Side side = rng.bernoulli(0.5) ? Side::buy : Side::sell;
        const bool opposite_nonempty = side == Side::buy ? book.best_ask().has_value() : book.best_bid().has_value();
        std::vector<Trade> got, want;
        if (action == 1 && opposite_nonempty) {
            const Order o = market(next_id++, agent, side);
            got = book.submit_market(o);
            want = ref.submit_market(o);
        } else {
            const Tick price = 95 + static_cast<Tick>(rng.uniform_int(11)); // tight band forces crossings
            const Order o = limit(next_id++, agent, side, price);
            got = book.submit_limit(o);
            want = ref.submit_limit(o);
        }
        if (stats) {
            ++stats->submitted;
            stats->executed += 2 * got.size();
        }
        REQUIRE(got.size() == want.size());
        for (std::size_t k = 0; k < got.size(); ++k) {
            CHECK(got[k].price == want[k].price);
            CHECK(got[k].buy_order == want[k].buy_order);
            CHECK(got[k].sell_order == want[k].sell_order);
            CHECK(got[k].buyer == want[k].buyer);
            CHECK(got[k].seller == want[k].seller);
        }
        tape.insert(tape.end(), got.begin(), got.end());

        CHECK(book.best_bid() == ref.best_bid());
        CHECK(book.best_ask() == ref.best_ask());
        const auto bid = book.best_bid();
        const auto ask = book.best_ask();
        if (bid && ask) CHECK(*bid < *ask);
    }
    return tape;
}

} // namespace

TEST_CASE("matching equivalence against the rescan reference") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        OrderBook book;
        test::ReferenceBook ref;
        drive(book, ref, rng, 20);
        CHECK(book.resting_count() == ref.resting_count());
    }
}

TEST_CASE("conservation over long random streams") {
    Rng rng(7);
    OrderBook book;
    test::ReferenceBook ref;
    StreamStats stats;
    drive(book, ref, rng, 2000, &stats);
    // every submitted one-share order is resting, executed or cancelled
    CHECK(book.submitted_count() == stats.submitted);
    CHECK(book.executed_count() + book.cancelled_count() + book.resting_count() == book.submitted_count());
    CHECK(book.executed_count() == stats.executed);
}

TEST_CASE("identical order streams give identical tapes") {
    auto run_once = [] {
        Rng rng(99);
        OrderBook book;
        test::ReferenceBook ref;
        return drive(book, ref, rng, 500);
    };
    const auto a = run_once();
    const auto b = run_once();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].price == b[i].price);
        CHECK(a[i].buy_order == b[i].buy_order);
        CHECK(a[i].sell_order == b[i].sell_order);
    }
}
