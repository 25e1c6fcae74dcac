#include "casim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace casim {

namespace detail {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double chi2_sf(double x, int dof) {
    if (x < 0.0) return 1.0;
    switch (dof) {
        case 1: return std::erfc(std::sqrt(x / 2.0));
        case 2: return std::exp(-x / 2.0);
        default: throw std::invalid_argument("chi2_sf supports 1 or 2 dof");
    }
}

namespace {

// Continued fraction for the regularized incomplete beta (Lentz).
double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3.0e-14;
    constexpr double fpmin = 1.0e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double dof) {
    if (dof <= 0.0) throw std::invalid_argument("t distribution needs positive dof");
    const double x = dof / (dof + t * t);
    const double tail = 0.5 * incomplete_beta(dof / 2.0, 0.5, x);
    return t >= 0.0 ? tail : 1.0 - tail;
}

} // namespace detail

std::vector<double> log_returns(std::span<const double> prices) {
    if (prices.size() < 2) throw std::invalid_argument("need at least two prices for returns");
    std::vector<double> r;
    r.reserve(prices.size() - 1);
    for (std::size_t t = 1; t < prices.size(); ++t) {
        if (prices[t] <= 0.0 || prices[t - 1] <= 0.0) {
            throw std::domain_error("log returns need positive prices");
        }
        r.push_back(std::log(prices[t] / prices[t - 1]));
    }
    return r;
}

namespace {

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_std(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

} // namespace

double volatility(std::span<const double> prices) {
    const std::vector<double> r = log_returns(prices);
    return sample_std(r);
}

Describe describe(std::span<const double> r) {
    if (r.size() < 8) throw std::invalid_argument("describe needs at least 8 observations");
    Describe d;
    d.n = r.size();
    const double n = static_cast<double>(r.size());
    d.mean = mean_of(r);

    std::vector<double> sorted(r.begin(), r.end());
    std::sort(sorted.begin(), sorted.end());
    d.min = sorted.front();
    d.max = sorted.back();
    d.median = r.size() % 2 == 1 ? sorted[r.size() / 2]
                                 : 0.5 * (sorted[r.size() / 2 - 1] + sorted[r.size() / 2]);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : r) {
        const double dev = v - d.mean;
        m2 += dev * dev;
        m3 += dev * dev * dev;
        m4 += dev * dev * dev * dev;
    }
    d.std_dev = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 <= 0.0) throw std::domain_error("describe: constant series, Jarque-Bera undefined");
    d.skewness = m3 / std::pow(m2, 1.5);
    d.kurtosis = m4 / (m2 * m2);
    d.jarque_bera = n / 6.0 * (d.skewness * d.skewness + 0.25 * (d.kurtosis - 3.0) * (d.kurtosis - 3.0));
    d.jb_pvalue = detail::chi2_sf(d.jarque_bera, 2);
    return d;
}

OlsFit simple_ols(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) {
        throw std::invalid_argument("OLS needs matching series with at least 3 points");
    }
    OlsFit fit;
    fit.n = x.size();
    const double n = static_cast<double>(x.size());
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) throw std::domain_error("OLS: regressor has zero variance");

    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double resid = y[i] - fit.intercept - fit.slope * x[i];
        ssr += resid * resid;
    }
    const double dof = n - 2.0;
    const double s2 = ssr / dof;
    fit.se_slope = std::sqrt(s2 / sxx);
    fit.se_intercept = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    fit.t_slope = fit.se_slope > 0.0 ? fit.slope / fit.se_slope : 0.0;
    fit.t_intercept = fit.se_intercept > 0.0 ? fit.intercept / fit.se_intercept : 0.0;
    fit.p_slope = 2.0 * detail::student_t_sf(std::abs(fit.t_slope), dof);
    fit.p_intercept = 2.0 * detail::student_t_sf(std::abs(fit.t_intercept), dof);
    fit.r2 = syy > 0.0 ? 1.0 - ssr / syy : 0.0;
    return fit;
}

ArchReport arch_lm(std::span<const double> r) {
    if (r.size() < 50) throw std::invalid_argument("arch_lm needs at least 50 observations");

    std::vector<double> x(r.begin(), r.end() - 1);
    std::vector<double> y(r.begin() + 1, r.end());
    ArchReport report;
    report.ar1 = simple_ols(x, y);

    std::vector<double> eps2;
    eps2.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double resid = y[i] - report.ar1.intercept - report.ar1.slope * x[i];
        eps2.push_back(resid * resid);
    }

    std::vector<double> lag(eps2.begin(), eps2.end() - 1);
    std::vector<double> cur(eps2.begin() + 1, eps2.end());
    report.lm = simple_ols(lag, cur);

    report.f_stat = report.lm.t_slope * report.lm.t_slope;
    report.f_pvalue = report.lm.p_slope;
    report.obs_r2 = static_cast<double>(report.lm.n) * report.lm.r2;
    report.obs_r2_pvalue = detail::chi2_sf(report.obs_r2, 1);
    return report;
}

AcfResult acf(std::span<const double> x, int max_lag) {
    if (max_lag < 1 || x.size() <= static_cast<std::size_t>(max_lag) + 1) {
        throw std::invalid_argument("acf: series too short for requested lags");
    }
    const double m = mean_of(x);
    double denom = 0.0;
    for (double v : x) denom += (v - m) * (v - m);
    if (denom <= 0.0) throw std::domain_error("acf: constant series");

    AcfResult result;
    result.band = 1.96 / std::sqrt(static_cast<double>(x.size()));
    result.rho.reserve(static_cast<std::size_t>(max_lag));
    for (int k = 1; k <= max_lag; ++k) {
        double num = 0.0;
        for (std::size_t t = static_cast<std::size_t>(k); t < x.size(); ++t) {
            num += (x[t] - m) * (x[t - static_cast<std::size_t>(k)] - m);
        }
        result.rho.push_back(num / denom);
    }
    return result;
}

namespace {

// Mean R/S over the non-overlapping windows of one size; windows with zero
// dispersion are skipped.
double mean_rescaled_range(std::span<const double> x, std::size_t size) {
    const std::size_t count = x.size() / size;
    double total = 0.0;
    std::size_t valid = 0;
    std::vector<double> window(size);
    for (std::size_t w = 0; w < count; ++w) {
        const double* begin = x.data() + w * size;
        double m = 0.0;
        for (std::size_t i = 0; i < size; ++i) m += begin[i];
        m /= static_cast<double>(size);

        double cum = 0.0, lo = 0.0, hi = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            const double dev = begin[i] - m;
            cum += dev;
            lo = std::min(lo, cum);
            hi = std::max(hi, cum);
            ss += dev * dev;
        }
        const double s = std::sqrt(ss / static_cast<double>(size));
        if (s <= 0.0) continue;
        total += (hi - lo) / s;
        ++valid;
    }
    if (valid == 0) return std::numeric_limits<double>::quiet_NaN();
    return total / static_cast<double>(valid);
}

std::vector<std::size_t> rs_window_sizes(std::size_t n) {
    std::vector<std::size_t> sizes;
    for (std::size_t s = 16; s <= n / 4; s *= 2) sizes.push_back(s);
    return sizes;
}

} // namespace

double hurst_rs(std::span<const double> x) {
    const std::vector<std::size_t> sizes = rs_window_sizes(x.size());
    if (sizes.size() < 4) throw std::invalid_argument("hurst_rs: series too short (< 4 window sizes)");

    std::vector<double> log_size, log_rs;
    for (std::size_t s : sizes) {
        const double rs = mean_rescaled_range(x, s);
        if (!std::isfinite(rs) || rs <= 0.0) continue;
        log_size.push_back(std::log(static_cast<double>(s)));
        log_rs.push_back(std::log(rs));
    }
    if (log_size.size() < 4) throw std::domain_error("hurst_rs: degenerate series");
    return simple_ols(log_size, log_rs).slope;
}

double hurst_dfa(std::span<const double> x) {
    const std::vector<std::size_t> sizes = rs_window_sizes(x.size());
    if (sizes.size() < 4) throw std::invalid_argument("hurst_dfa: series too short (< 4 window sizes)");

    // Integrated profile of the mean-removed series.
    const double m = mean_of(x);
    std::vector<double> profile(x.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cum += x[i] - m;
        profile[i] = cum;
    }

    std::vector<double> log_size, log_f;
    for (std::size_t s : sizes) {
        const std::size_t count = profile.size() / s;
        double ss_total = 0.0;
        std::size_t points = 0;
        for (std::size_t w = 0; w < count; ++w) {
            const double* seg = profile.data() + w * s;
            // Linear detrend within the window.
            double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
            for (std::size_t i = 0; i < s; ++i) {
                const double xi = static_cast<double>(i);
                sx += xi;
                sy += seg[i];
                sxx += xi * xi;
                sxy += xi * seg[i];
            }
            const double nn = static_cast<double>(s);
            const double denom = nn * sxx - sx * sx;
            const double slope = (nn * sxy - sx * sy) / denom;
            const double icept = (sy - slope * sx) / nn;
            for (std::size_t i = 0; i < s; ++i) {
                const double resid = seg[i] - (icept + slope * static_cast<double>(i));
                ss_total += resid * resid;
            }
            points += s;
        }
        if (points == 0) continue;
        const double f = std::sqrt(ss_total / static_cast<double>(points));
        if (f <= 0.0) continue;
        log_size.push_back(std::log(static_cast<double>(s)));
        log_f.push_back(std::log(f));
    }
    if (log_size.size() < 4) throw std::domain_error("hurst_dfa: degenerate series");
    return simple_ols(log_size, log_f).slope;
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("spearman needs matching series with at least 2 points");
    }
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    const double mx = mean_of(rx);
    const double my = mean_of(ry);
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx <= 0.0 || dy <= 0.0) throw std::domain_error("spearman: constant ranks");
    return num / std::sqrt(dx * dy);
}

} // namespace casim
