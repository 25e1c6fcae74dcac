#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "casim/rng.hpp"
#include "casim/stats.hpp"
#include "synth.hpp"

using namespace casim;

TEST_CASE("probability helpers match known values") {
    CHECK(detail::normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(detail::normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-4));
    CHECK(detail::chi2_sf(0.0, 2) == doctest::Approx(1.0));
    CHECK(detail::chi2_sf(5.991465, 2) == doctest::Approx(0.05).epsilon(1e-4));
    CHECK(detail::chi2_sf(3.841459, 1) == doctest::Approx(0.05).epsilon(1e-4));
    // very large dof approaches the normal tail
    CHECK(detail::student_t_sf(1.959964, 1e7) == doctest::Approx(0.025).epsilon(1e-3));
    // t(1) is Cauchy: SF(1) = 0.25
    CHECK(detail::student_t_sf(1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("describe of iid normal data") {
    Rng rng(1);
    std::vector<double> x(100000);
    for (double& v : x) v = rng.normal();
    const Describe d = describe(x);
    CHECK(std::abs(d.mean) < 0.02);
    CHECK(d.std_dev == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(d.skewness) < 0.05);
    CHECK(d.kurtosis == doctest::Approx(3.0).epsilon(0.035));
}

TEST_CASE("Jarque-Bera holds its size under the null") {
    int rejections = 0;
    const int seeds = 30;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(100 + static_cast<std::uint64_t>(s));
        std::vector<double> x(5000);
        for (double& v : x) v = rng.normal();
        if (describe(x).jb_pvalue < 0.05) ++rejections;
    }
    CHECK(seeds - rejections >= 27); // fails to reject in >= 90% of seeds
}

TEST_CASE("describe rejects degenerate input") {
    std::vector<double> constant(100, 1.5);
    CHECK_THROWS(describe(constant));
    std::vector<double> tiny(4, 0.0);
    CHECK_THROWS_AS(describe(tiny), std::invalid_argument);
}

namespace {

// Naive direct-summation reference for a 1000-point comparison.
struct NaiveStats {
    double mean, std_dev, skew, kurt;
};

NaiveStats naive_describe(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double m2 = 0, m3 = 0, m4 = 0, ss = 0;
    for (double v : x) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        ss += d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    return {mean, std::sqrt(ss / (n - 1.0)), m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
}

double naive_acf(const std::vector<double>& x, int k) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        den += (x[t] - mean) * (x[t] - mean);
        if (t >= static_cast<std::size_t>(k)) num += (x[t] - mean) * (x[t - static_cast<std::size_t>(k)] - mean);
    }
    return num / den;
}

} // namespace

TEST_CASE("statistics agree with a naive reference to 10 significant digits") {
    Rng rng(2);
    std::vector<double> x(1000);
    for (double& v : x) v = rng.normal() * 0.01 + 0.3 * rng.uniform01();

    const Describe d = describe(x);
    const NaiveStats nd = naive_describe(x);
    CHECK(d.mean == doctest::Approx(nd.mean).epsilon(1e-10));
    CHECK(d.std_dev == doctest::Approx(nd.std_dev).epsilon(1e-10));
    CHECK(d.skewness == doctest::Approx(nd.skew).epsilon(1e-10));
    CHECK(d.kurtosis == doctest::Approx(nd.kurt).epsilon(1e-10));

    const AcfResult a = acf(x, 10);
    for (int k = 1; k <= 10; ++k) {
        CHECK(a.rho[static_cast<std::size_t>(k - 1)] == doctest::Approx(naive_acf(x, k)).epsilon(1e-10));
    }

    // AR(1) slope via direct covariance computation
    std::vector<double> lhs(x.begin() + 1, x.end());
    std::vector<double> rhs(x.begin(), x.end() - 1);
    const OlsFit fit = simple_ols(rhs, lhs);
    double mx = 0, my = 0;
    for (double v : rhs) mx += v;
    for (double v : lhs) my += v;
    mx /= static_cast<double>(rhs.size());
    my /= static_cast<double>(lhs.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        sxy += (rhs[i] - mx) * (lhs[i] - my);
        sxx += (rhs[i] - mx) * (rhs[i] - mx);
    }
    CHECK(fit.slope == doctest::Approx(sxy / sxx).epsilon(1e-10));
    CHECK(fit.intercept == doctest::Approx(my - (sxy / sxx) * mx).epsilon(1e-10));
}

TEST_CASE("ARCH-LM keeps its size on white noise") {
    int insignificant = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(300 + static_cast<std::uint64_t>(s));
        std::vector<double> x(3000);
        for (double& v : x) v = rng.normal();
        if (arch_lm(x).lm.p_slope > 0.05) ++insignificant;
    }
    CHECK(insignificant >= 16); // >= 80% of seeds under the null at 5%
}

TEST_CASE("ARCH-LM recovers a known ARCH(1) coefficient") {
    Rng rng(7);
    const std::vector<double> eps = test::arch1(10000, 1.0, 0.3, rng);
    const ArchReport report = arch_lm(eps);
    CHECK(std::abs(report.lm.slope - 0.3) < 0.05);
    CHECK(report.lm.p_slope < 0.01);
    CHECK(report.obs_r2 > 100.0);
}

TEST_CASE("arch_lm rejects short or degenerate input") {
    std::vector<double> tiny(20, 0.1);
    CHECK_THROWS_AS(arch_lm(tiny), std::invalid_argument);
    std::vector<double> constant(100, 0.1);
    CHECK_THROWS(arch_lm(constant));
}

TEST_CASE("acf of iid noise stays inside the confidence band") {
    // pointwise 95% band: aggregate the coverage across seeds
    int total_inside = 0;
    int seeds_mostly_inside = 0;
    const int n_seeds = 20;
    for (int s = 0; s < n_seeds; ++s) {
        Rng rng(400 + static_cast<std::uint64_t>(s));
        std::vector<double> x(10000);
        for (double& v : x) v = rng.normal();
        const AcfResult a = acf(x, 50);
        int inside = 0;
        for (double rho : a.rho) {
            if (std::abs(rho) <= a.band) ++inside;
        }
        total_inside += inside;
        if (inside >= 45) ++seeds_mostly_inside;
    }
    CHECK(total_inside >= static_cast<int>(0.90 * 50 * n_seeds));
    CHECK(seeds_mostly_inside >= 15);
}

TEST_CASE("acf of an AR(1) follows the analytic decay") {
    Rng rng(12);
    const double phi = 0.5;
    std::vector<double> x(10000);
    double prev = 0.0;
    for (double& v : x) {
        v = phi * prev + rng.normal();
        prev = v;
    }
    const AcfResult a = acf(x, 10);
    for (int k = 1; k <= 5; ++k) {
        CHECK(std::abs(a.rho[static_cast<std::size_t>(k - 1)] - std::pow(phi, k)) < 0.05);
    }
}

TEST_CASE("rescaled-range Hurst of white noise is near one half") {
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        Rng rng(seed);
        std::vector<double> x(12000);
        for (double& v : x) v = rng.normal();
        const double h = hurst_rs(x);
        CHECK(h > 0.45);
        CHECK(h < 0.60);
    }
}

TEST_CASE("rescaled-range Hurst recovers persistent noise") {
    for (std::uint64_t seed : {31u, 32u}) {
        Rng rng(seed);
        const std::vector<double> x = test::fgn(8192, 0.8, rng);
        const double h = hurst_rs(x);
        CHECK(std::abs(h - 0.8) < 0.07);
    }
}

TEST_CASE("hurst_rs needs at least four window sizes") {
    std::vector<double> x(400, 0.0);
    Rng rng(1);
    for (double& v : x) v = rng.normal();
    CHECK_THROWS_AS(hurst_rs(x), std::invalid_argument);
}

TEST_CASE("DFA gives compatible exponents") {
    Rng rng(41);
    std::vector<double> white(8192);
    for (double& v : white) v = rng.normal();
    CHECK(std::abs(hurst_dfa(white) - 0.5) < 0.08);

    Rng rng2(42);
    const std::vector<double> persistent = test::fgn(8192, 0.8, rng2);
    CHECK(std::abs(hurst_dfa(persistent) - 0.8) < 0.1);
}

TEST_CASE("fgn generator produces the target unit variance") {
    Rng rng(51);
    const std::vector<double> x = test::fgn(4096, 0.8, rng);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size() - 1);
    CHECK(var == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("spearman rank correlation") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> up = {10, 20, 30, 40, 50};
    std::vector<double> down = {5, 4, 3, 2, 1};
    CHECK(spearman(x, up) == doctest::Approx(1.0));
    CHECK(spearman(x, down) == doctest::Approx(-1.0));
    // monotone in ranks even with nonlinear values
    std::vector<double> convex = {1, 4, 9, 16, 25};
    CHECK(spearman(x, convex) == doctest::Approx(1.0));
}

TEST_CASE("statistics only see returns, so price rescaling changes nothing") {
    Rng rng(61);
    std::vector<double> prices(2000);
    double p = 20.0;
    for (double& v : prices) {
        p *= std::exp(0.001 * rng.normal());
        v = p;
    }
    std::vector<double> scaled(prices.size());
    std::transform(prices.begin(), prices.end(), scaled.begin(), [](double v) { return 7.0 * v; });

    const std::vector<double> r1 = log_returns(prices);
    const std::vector<double> r2 = log_returns(scaled);
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i] == doctest::Approx(r2[i]).epsilon(1e-12));
    CHECK(volatility(prices) == doctest::Approx(volatility(scaled)).epsilon(1e-12));
}
