#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace casim {

std::vector<double> log_returns(std::span<const double> prices);

// Standard deviation (n-1 denominator) of per-step log returns; the run
// volatility measure used throughout the experiments.
double volatility(std::span<const double> prices);

struct Describe {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double max = 0.0;
    double min = 0.0;
    double std_dev = 0.0;  // sample (n-1)
    double skewness = 0.0; // population moments
    double kurtosis = 0.0; // un-excess: normal = 3
    double jarque_bera = 0.0;
    double jb_pvalue = 0.0;
};

// Moment statistics of a return series. Throws below 8 observations or on a
// constant series (Jarque-Bera undefined).
Describe describe(std::span<const double> r);

struct OlsFit {
    std::size_t n = 0;
    double intercept = 0.0;
    double slope = 0.0;
    double se_intercept = 0.0;
    double se_slope = 0.0;
    double t_intercept = 0.0;
    double t_slope = 0.0;
    double p_intercept = 0.0; // two-sided
    double p_slope = 0.0;
    double r2 = 0.0;
};

// y on x with intercept, classic (non-robust) standard errors.
OlsFit simple_ols(std::span<const double> x, std::span<const double> y);

struct ArchReport {
    OlsFit ar1; // pre-fit of r_t on r_{t-1}
    OlsFit lm;  // squared residuals on their first lag
    double f_stat = 0.0;
    double f_pvalue = 0.0;
    double obs_r2 = 0.0; // n * R^2 of the LM regression
    double obs_r2_pvalue = 0.0;
};

// One-lag ARCH-LM test on the residuals of an AR(1) fit. Throws below 50
// observations or when the squared residuals are degenerate.
ArchReport arch_lm(std::span<const double> r);

struct AcfResult {
    std::vector<double> rho; // lags 1..max_lag
    double band = 0.0;       // +-1.96/sqrt(n)
};

AcfResult acf(std::span<const double> x, int max_lag);

// Rescaled-range Hurst estimate: non-overlapping windows at geometrically
// spaced sizes (16, 32, ... up to n/4), mean R/S per size, slope of
// log(R/S) against log(size). Throws when fewer than 4 sizes fit.
double hurst_rs(std::span<const double> x);

// Detrended fluctuation analysis alternative, for robustness reporting.
double hurst_dfa(std::span<const double> x);

// Spearman rank correlation; ties get average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

namespace detail {

double normal_cdf(double z);
double chi2_sf(double x, int dof);          // dof 1 or 2 only
double student_t_sf(double t, double dof);  // one-sided upper tail
double incomplete_beta(double a, double b, double x);

} // namespace detail

} // namespace casim
