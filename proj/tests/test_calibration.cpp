#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "casim/calibration.hpp"
#include "casim/stats.hpp"

using namespace casim;

TEST_CASE("gaussian fit recovers known parameters from samples") {
    Rng rng(1);
    std::vector<CostSample> samples;
    for (int i = 0; i < 200; ++i) samples.push_back({static_cast<std::uint64_t>(i), rng.normal(0.36, 0.068)});

    const GaussianFit fit = fit_gaussian(samples);
    CHECK(std::abs(fit.mean - 0.36) < 0.02);
    CHECK(std::abs(fit.width - std::sqrt(2.0) * 0.068) / (std::sqrt(2.0) * 0.068) < 0.20);
    CHECK(fit.r2_adj > 0.5);
}

TEST_CASE("identical samples are degenerate") {
    std::vector<CostSample> samples(50, {1, 0.36});
    CHECK_THROWS_AS(fit_gaussian(samples), FitError);
}

TEST_CASE("too few samples are rejected") {
    std::vector<CostSample> samples(10, {1, 0.36});
    CHECK_THROWS_AS(fit_gaussian(samples), std::invalid_argument);
}

TEST_CASE("analytic histogram is fitted almost perfectly") {
    Histogram h;
    const double a = 44.83, b = 0.3604, c = 0.09662;
    for (int i = 0; i < 24; ++i) {
        const double x = 0.05 + 0.025 * i;
        const double z = (x - b) / c;
        h.centers.push_back(x);
        h.counts.push_back(a * std::exp(-z * z));
    }
    h.bin_width = 0.025;
    // start away from the truth
    const GaussianFit fit = fit_gaussian_histogram(h, 30.0, 0.3, 0.15);
    CHECK(fit.r2_adj > 0.999);
    CHECK(fit.amplitude == doctest::Approx(a).epsilon(1e-3));
    CHECK(fit.mean == doctest::Approx(b).epsilon(1e-3));
    CHECK(fit.width == doctest::Approx(c).epsilon(1e-3));
}

TEST_CASE("cost sampler truncates at zero and matches the fitted mean") {
    GaussianFit fit;
    fit.amplitude = 44.83;
    fit.mean = 0.3604;
    fit.width = 0.09662;
    CHECK(fit.sigma() == doctest::Approx(0.0683).epsilon(0.01));

    // the fitted distribution has essentially no mass below zero
    const double z = (0.0 - fit.mean) / fit.sigma();
    CHECK(detail::normal_cdf(z) < 1e-6);

    CostSampler sampler(fit);
    Rng rng(3);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double c = sampler(rng);
        CHECK(c >= 0.0);
        sum += c;
        sumsq += c * c;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sumsq / n - mean * mean);
    CHECK(std::abs(mean - fit.mean) < 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

namespace {

SimConfig calibration_base(std::int64_t steps) {
    SimConfig cfg;
    cfg.steps = steps;
    cfg.lag = 200;
    cfg.mix = {0.12, 0.30, 0.58, 0.0};
    cfg.seed = 99;
    cfg.keep_tape = false;
    return cfg;
}

} // namespace

TEST_CASE("campaign requires a switcher-free mix") {
    SimConfig cfg = calibration_base(100);
    cfg.mix = {0.12, 0.00, 0.58, 0.30};
    CHECK_THROWS_AS(run_calibration_campaign(cfg, 2), std::invalid_argument);
}

TEST_CASE("campaign is deterministic and sized as requested") {
    const SimConfig cfg = calibration_base(300);
    const auto one = run_calibration_campaign(cfg, 1);
    CHECK(one.size() == 1);

    const auto a = run_calibration_campaign(cfg, 4, 2);
    const auto b = run_calibration_campaign(cfg, 4, 1);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].seed == b[i].seed);
        CHECK(a[i].gap == b[i].gap);
    }
}

TEST_CASE("informed agents out-earn uninformed agents per order") {
    const SimConfig cfg = calibration_base(2000);
    const auto samples = run_calibration_campaign(cfg, 10, 2);
    double mean_gap = 0.0;
    for (const CostSample& s : samples) mean_gap += s.gap;
    mean_gap /= static_cast<double>(samples.size());
    CHECK(mean_gap > 0.0);
}

TEST_CASE("cloned strategies have no profit gap") {
    SimConfig cfg = calibration_base(2000);
    cfg.informed_act_uninformed = true; // diagnostic: informed trade like uninformed
    const auto samples = run_calibration_campaign(cfg, 10, 2);
    double mean_gap = 0.0;
    for (const CostSample& s : samples) mean_gap += s.gap;
    mean_gap /= static_cast<double>(samples.size());
    CHECK(std::abs(mean_gap) < 0.05);
}
