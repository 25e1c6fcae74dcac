#include "casim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "casim/parallel.hpp"

namespace casim {

double GaussianFit::sigma() const { return width / std::sqrt(2.0); }

std::vector<CostSample> run_calibration_campaign(const SimConfig& base, int n_runs, int threads) {
    base.validate();
    if (base.mix.switcher != 0.0) {
        throw std::invalid_argument("calibration requires a switcher-free market");
    }
    if (n_runs < 1) throw std::invalid_argument("calibration needs at least one run");

    std::vector<CostSample> samples(static_cast<std::size_t>(n_runs));
    parallel_for(samples.size(), threads, [&](std::size_t k) {
        SimConfig cfg = base;
        cfg.seed = derive_seed(base.seed, Stream::campaign, k);
        cfg.keep_tape = false;
        const RunResult run = run_market(cfg);
        const double informed = run.profits[static_cast<std::size_t>(AgentType::informed)].mean();
        const double uninformed = run.profits[static_cast<std::size_t>(AgentType::uninformed)].mean();
        samples[k] = {cfg.seed, informed - uninformed};
    });
    return samples;
}

int freedman_diaconis_bins(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(n - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        return lo + 1 < n ? sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac : sorted[lo];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double range = sorted.back() - sorted.front();
    if (iqr <= 0.0 || range <= 0.0) return 4;
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
    const int bins = static_cast<int>(std::ceil(range / width));
    return std::clamp(bins, 4, 64);
}

Histogram build_histogram(std::span<const double> values, int bins) {
    Histogram h;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    double hi = *hi_it;
    if (hi <= lo) hi = lo + 1e-12;
    h.bin_width = (hi - lo) / static_cast<double>(bins);
    h.centers.resize(static_cast<std::size_t>(bins));
    h.counts.assign(static_cast<std::size_t>(bins), 0.0);
    for (int b = 0; b < bins; ++b) {
        h.centers[static_cast<std::size_t>(b)] = lo + (static_cast<double>(b) + 0.5) * h.bin_width;
    }
    for (double v : values) {
        int b = static_cast<int>((v - lo) / h.bin_width);
        b = std::clamp(b, 0, bins - 1);
        h.counts[static_cast<std::size_t>(b)] += 1.0;
    }
    return h;
}

namespace {

double model(double x, const GaussianFit& f) {
    const double z = (x - f.mean) / f.width;
    return f.amplitude * std::exp(-z * z);
}

double sum_sq_residuals(const Histogram& h, const GaussianFit& f) {
    double ss = 0.0;
    for (std::size_t i = 0; i < h.centers.size(); ++i) {
        const double r = h.counts[i] - model(h.centers[i], f);
        ss += r * r;
    }
    return ss;
}

// Solves the 3x3 normal equations (A + lambda*diag(A)) dx = g in place.
bool solve3(double a[3][3], double g[3], double lambda, double dx[3]) {
    double m[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = a[i][j];
        m[i][i] *= 1.0 + lambda;
        m[i][3] = g[i];
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        if (std::abs(m[pivot][col]) < 1e-300) return false;
        std::swap(m[col], m[pivot]);
        for (int r = col + 1; r < 3; ++r) {
            const double factor = m[r][col] / m[col][col];
            for (int c = col; c < 4; ++c) m[r][c] -= factor * m[col][c];
        }
    }
    for (int i = 2; i >= 0; --i) {
        double s = m[i][3];
        for (int j = i + 1; j < 3; ++j) s -= m[i][j] * dx[j];
        dx[i] = s / m[i][i];
    }
    return true;
}

} // namespace

GaussianFit fit_gaussian_histogram(const Histogram& h, double init_amplitude, double init_mean, double init_width) {
    GaussianFit fit;
    fit.bins = static_cast<int>(h.centers.size());
    fit.amplitude = init_amplitude;
    fit.mean = init_mean;
    fit.width = init_width;
    if (!(fit.width > 0.0) || fit.amplitude <= 0.0) {
        throw FitError("degenerate samples: zero spread", fit);
    }
    const int bins = fit.bins;

    // Levenberg-Marquardt on (amplitude, mean, width).
    double lambda = 1e-3;
    double ss = sum_sq_residuals(h, fit);
    constexpr int max_iter = 200;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        double jt_j[3][3] = {};
        double jt_r[3] = {};
        for (std::size_t i = 0; i < h.centers.size(); ++i) {
            const double x = h.centers[i];
            const double z = (x - fit.mean) / fit.width;
            const double e = std::exp(-z * z);
            const double f = fit.amplitude * e;
            const double jac[3] = {
                e,                                // d/d amplitude
                f * 2.0 * z / fit.width,          // d/d mean
                f * 2.0 * z * z / fit.width,      // d/d width
            };
            const double resid = h.counts[i] - f;
            for (int r = 0; r < 3; ++r) {
                jt_r[r] += jac[r] * resid;
                for (int c = 0; c < 3; ++c) jt_j[r][c] += jac[r] * jac[c];
            }
        }

        double dx[3];
        if (!solve3(jt_j, jt_r, lambda, dx)) {
            throw FitError("singular normal equations", fit);
        }
        GaussianFit trial = fit;
        trial.amplitude += dx[0];
        trial.mean += dx[1];
        trial.width += dx[2];
        if (!(trial.width > 0.0)) {
            lambda *= 10.0;
            if (lambda > 1e12) throw FitError("width collapsed", fit);
            continue;
        }
        const double trial_ss = sum_sq_residuals(h, trial);
        if (trial_ss < ss) {
            const double improvement = (ss - trial_ss) / std::max(ss, 1e-300);
            fit = trial;
            ss = trial_ss;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (improvement < 1e-12) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    fit.iterations = iter + 1;
    if (iter == max_iter) throw FitError("no convergence after max iterations", fit);

    const double count_mean = std::accumulate(h.counts.begin(), h.counts.end(), 0.0) / static_cast<double>(bins);
    double ss_total = 0.0;
    for (double c : h.counts) ss_total += (c - count_mean) * (c - count_mean);
    if (ss_total <= 0.0) throw FitError("flat histogram", fit);
    const double r2 = 1.0 - ss / ss_total;
    const double m = static_cast<double>(bins);
    fit.r2_adj = 1.0 - (1.0 - r2) * (m - 1.0) / (m - 4.0);
    return fit;
}

GaussianFit fit_gaussian(std::span<const CostSample> samples, int bins) {
    if (samples.size() < 30) throw std::invalid_argument("fit_gaussian needs at least 30 samples");

    std::vector<double> gaps;
    gaps.reserve(samples.size());
    for (const CostSample& s : samples) gaps.push_back(s.gap);

    const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
    double var = 0.0;
    for (double g : gaps) var += (g - mean) * (g - mean);
    var /= static_cast<double>(gaps.size() - 1);
    const double stddev = std::sqrt(var);

    if (bins <= 0) bins = freedman_diaconis_bins(gaps);
    const Histogram h = build_histogram(gaps, bins);
    const double peak = *std::max_element(h.counts.begin(), h.counts.end());
    return fit_gaussian_histogram(h, peak, mean, std::sqrt(2.0) * stddev);
}

CostSampler::CostSampler(const GaussianFit& fit) : mean_(fit.mean), sigma_(fit.sigma()) {
    if (!(sigma_ > 0.0)) throw std::invalid_argument("cost sampler needs positive width");
}

double CostSampler::operator()(Rng& rng) const {
    double c;
    do {
        c = rng.normal(mean_, sigma_);
    } while (c < 0.0);
    return c;
}

} // namespace casim
