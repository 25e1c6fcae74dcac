#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "casim/market.hpp"
#include "casim/rng.hpp"

namespace casim {

// One switcher-free run's informed-minus-uninformed mean order profit.
struct CostSample {
    std::uint64_t seed = 0;
    double gap = 0.0;
};

// Parameters of f(x) = amplitude * exp(-((x - mean) / width)^2) fitted to a
// histogram of cost samples. Note the exponent has no 1/2, so the normal
// standard deviation is width / sqrt(2).
struct GaussianFit {
    double amplitude = 0.0;
    double mean = 0.0;
    double width = 0.0;
    double r2_adj = 0.0;
    int bins = 0;
    int iterations = 0;

    double sigma() const;
};

// Thrown when the nonlinear fit fails; carries the last iterate.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, GaussianFit last) : std::runtime_error(what), last_iterate(last) {}
    GaussianFit last_iterate;
};

// Runs n_runs switcher-free markets with seeds derived from base.seed and
// collects one profit-gap sample per run. Throws if the base mix contains
// switchers.
std::vector<CostSample> run_calibration_campaign(const SimConfig& base, int n_runs, int threads = 1);

struct Histogram {
    std::vector<double> centers;
    std::vector<double> counts;
    double bin_width = 0.0;
};

// Freedman-Diaconis bin count, clamped to [4, 64].
int freedman_diaconis_bins(std::span<const double> values);

Histogram build_histogram(std::span<const double> values, int bins);

// Levenberg-Marquardt fit of f to bin counts from an explicit start point.
GaussianFit fit_gaussian_histogram(const Histogram& h, double init_amplitude, double init_mean, double init_width);

// Least-squares Gaussian fit to a histogram of the gap samples, starting
// from moment estimates. bins <= 0 selects the bin count automatically.
// Needs at least 30 samples; throws FitError on non-convergence.
GaussianFit fit_gaussian(std::span<const CostSample> samples, int bins = 0);

// Sampler for information costs drawn from the fitted distribution,
// truncated at zero.
class CostSampler {
public:
    explicit CostSampler(const GaussianFit& fit);

    double mean() const { return mean_; }
    double sigma() const { return sigma_; }
    double operator()(Rng& rng) const;

private:
    double mean_;
    double sigma_;
};

} // namespace casim
