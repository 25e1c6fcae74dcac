#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "casim/calibration.hpp"
#include "casim/market.hpp"

namespace casim {

// The five market compositions studied: informed and zero-intelligence
// shares stay fixed at 12% / 58% while switchers replace uninformed agents.
std::vector<AgentMix> table8_mixes();

std::vector<std::uint64_t> make_seed_list(std::uint64_t master, int count);

struct ExperimentPlan {
    std::vector<AgentMix> mixes;        // rho sweep rows
    std::vector<std::uint64_t> seeds;   // shared across mixes
    SimConfig base{};                   // mix and seed are overwritten per cell
    int gamma_window = 50;
    int gamma_bins = 10;

    void validate() const;
};

struct GammaBin {
    double center = 0.0;
    double mean_volatility = 0.0; // NaN when no windows fell in the bin
    std::int64_t windows = 0;
};

// Windowed volatility binned by the windowed mean share of informed
// switchers. Throws when the run has no switchers or the window is < 10.
std::vector<GammaBin> gamma_analysis(const RunResult& run, int window, int bins);

// Spearman correlation of bin centers against bin volatilities over the
// occupied bins; NaN when fewer than 3 bins are occupied.
double gamma_volatility_spearman(const std::vector<GammaBin>& table);

struct CellResult {
    std::uint64_t seed = 0;
    double volatility = 0.0;
    std::array<double, 4> mean_returns{};      // per executed order, by AgentType
    std::array<std::int64_t, 4> order_counts{};
    double switcher_net = 0.0;   // after information cost
    double info_cost_paid = 0.0;
    double gamma_mean = 0.0;     // NaN when the mix has no switchers
    double gamma_spearman = 0.0; // NaN when unavailable
    std::vector<GammaBin> gamma_table;
};

struct MixSummary {
    AgentMix mix{};
    double mean_volatility = 0.0;
    std::array<double, 4> mean_returns{}; // mean over seeds of per-run means
    double mean_switcher_net = 0.0;
    double mean_gamma_spearman = 0.0;     // NaN for rho = 0
    std::vector<GammaBin> gamma_table;    // windows pooled across seeds
};

struct SweepReport {
    ExperimentPlan plan;
    std::vector<std::vector<CellResult>> cells; // [mix][seed]
    std::vector<MixSummary> summaries;
};

// Runs |mixes| x |seeds| markets. When outdir is non-empty, per-run price
// series and configs are persisted under outdir/runs as each cell
// completes, so a failing run still leaves the finished cells on disk.
SweepReport run_sweep(const ExperimentPlan& plan, int threads = 1,
                      const std::filesystem::path& outdir = {});

struct ReproduceOptions {
    std::uint64_t master_seed = 42;
    int calibration_runs = 200;
    int seeds_per_mix = 30;
    int validity_seeds = 10; // ARCH significance battery
    int hurst_seeds = 5;
    int threads = 1;
    bool smoke = false;  // 5 seeds per mix, shorter runs, fewer calibration runs
    bool resume = false; // skip stages whose outputs already exist
    SimConfig base{};
    int gamma_window = 50;
    int gamma_bins = 10;
};

// End-to-end pipeline: calibration fixes the information cost, a baseline
// market feeds the validity battery, then the rho sweep and gamma analysis.
// Emits a markdown report plus CSV files mirroring every table and figure.
void reproduce_paper(const std::filesystem::path& outdir, ReproduceOptions options);

} // namespace casim
