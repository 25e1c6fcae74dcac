#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "casim/fundamental.hpp"
#include "casim/stats.hpp"

using namespace casim;

TEST_CASE("zero jump rate leaves the value unchanged") {
    FundamentalConfig cfg;
    cfg.jump_rate = 0.0;
    Rng rng(1);
    const FundamentalPath path = generate_path(cfg, 100, rng);
    REQUIRE(path.v.size() == 101);
    for (double v : path.v) CHECK(v == 20.0);
}

TEST_CASE("zero steps gives just the start value") {
    FundamentalConfig cfg;
    Rng rng(1);
    const FundamentalPath path = generate_path(cfg, 0, rng);
    REQUIRE(path.v.size() == 1);
    CHECK(path.v[0] == cfg.v0);
}

TEST_CASE("same seed gives the identical path") {
    FundamentalConfig cfg;
    Rng a(42), b(42);
    const FundamentalPath pa = generate_path(cfg, 5000, a);
    const FundamentalPath pb = generate_path(cfg, 5000, b);
    REQUIRE(pa.v.size() == pb.v.size());
    for (std::size_t i = 0; i < pa.v.size(); ++i) CHECK(pa.v[i] == pb.v[i]);
}

TEST_CASE("increments are a martingale with compound-Poisson variance") {
    // Var of one step = jump_rate * tick^2 / 3 for uniform jumps on (-tick, tick).
    FundamentalConfig cfg; // phi = 4, tick = 0.01
    Rng rng(11);
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dv = step_fundamental(20.0, cfg, rng) - 20.0;
        sum += dv;
        sumsq += dv * dv;
    }
    const double expected_var = cfg.jump_rate * cfg.tick * cfg.tick / 3.0;
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 * std::sqrt(expected_var / n));
    CHECK(std::abs(var - expected_var) / expected_var < 0.05);
}

TEST_CASE("discrete jump variant has two-point increments") {
    // With the two-point reading each jump is exactly +-tick, so every
    // per-step move is an integer multiple of the tick.
    FundamentalConfig cfg;
    cfg.discrete_jumps = true;
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double dv = step_fundamental(20.0, cfg, rng) - 20.0;
        const double steps_of_tick = dv / cfg.tick;
        CHECK(std::abs(steps_of_tick - std::round(steps_of_tick)) < 1e-9);
    }
}

TEST_CASE("non-positive results clamp to one tick and are flagged") {
    FundamentalConfig cfg;
    cfg.v0 = 0.005;
    cfg.jump_rate = 50.0;
    Rng rng(17);
    const FundamentalPath path = generate_path(cfg, 2000, rng);
    CHECK(path.clamped > 0);
    for (double v : path.v) CHECK(v > 0.0);
}

TEST_CASE("fundamental log returns look like white noise") {
    FundamentalConfig cfg;
    Rng rng(2024);
    const FundamentalPath path = generate_path(cfg, 12000, rng);
    const std::vector<double> r = log_returns(path.v);

    const ArchReport arch = arch_lm(r);
    CHECK(arch.lm.p_slope > 0.05); // no ARCH effect

    const double h = hurst_rs(r);
    CHECK(h > 0.45);
    CHECK(h < 0.60);
}
