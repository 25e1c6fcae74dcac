#include "casim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "casim/io.hpp"
#include "casim/parallel.hpp"
#include "casim/stats.hpp"

namespace casim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double finite_mean(std::span<const double> values) {
    double total = 0.0;
    std::size_t n = 0;
    for (double v : values) {
        if (std::isfinite(v)) {
            total += v;
            ++n;
        }
    }
    return n > 0 ? total / static_cast<double>(n) : kNaN;
}

std::string fmt6(double value) {
    if (!std::isfinite(value)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

int rho_percent(const AgentMix& mix) { return static_cast<int>(std::lround(mix.switcher * 100.0)); }

} // namespace

std::vector<AgentMix> table8_mixes() {
    return {
        {0.12, 0.30, 0.58, 0.00},
        {0.12, 0.23, 0.58, 0.07},
        {0.12, 0.15, 0.58, 0.15},
        {0.12, 0.08, 0.58, 0.22},
        {0.12, 0.00, 0.58, 0.30},
    };
}

std::vector<std::uint64_t> make_seed_list(std::uint64_t master, int count) {
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        seeds[static_cast<std::size_t>(k)] = derive_seed(master, Stream::campaign, 0x1000 + static_cast<std::uint64_t>(k));
    }
    return seeds;
}

void ExperimentPlan::validate() const {
    if (mixes.empty()) throw std::invalid_argument("experiment plan needs at least one mix");
    if (seeds.empty()) throw std::invalid_argument("experiment plan needs at least one seed");
    if (gamma_window < 10) throw std::invalid_argument("gamma window must be >= 10");
    if (gamma_bins < 1) throw std::invalid_argument("gamma bins must be >= 1");
    for (const AgentMix& mix : mixes) {
        if (std::abs(mix.informed - 0.12) > 1e-9 || std::abs(mix.zero_intelligence - 0.58) > 1e-9) {
            throw std::invalid_argument("sweep mixes keep informed at 12% and zero-intelligence at 58%");
        }
        SimConfig probe = base;
        probe.mix = mix;
        probe.validate();
    }
}

std::vector<GammaBin> gamma_analysis(const RunResult& run, int window, int bins) {
    if (run.gamma.empty()) throw std::invalid_argument("gamma analysis needs a run with switchers");
    if (window < 10) throw std::invalid_argument("gamma window must be >= 10");
    if (bins < 1) throw std::invalid_argument("gamma bins must be >= 1");

    const std::size_t steps = run.gamma.size();
    const std::size_t n_windows = steps / static_cast<std::size_t>(window);
    if (n_windows == 0) throw std::invalid_argument("run shorter than one gamma window");

    // gamma[i] and the log return of step i+1 line up by construction.
    std::vector<double> returns;
    returns.reserve(steps);
    for (std::size_t t = 1; t < run.p.size(); ++t) returns.push_back(std::log(run.p[t] / run.p[t - 1]));

    std::vector<double> vol_sum(static_cast<std::size_t>(bins), 0.0);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
    for (std::size_t w = 0; w < n_windows; ++w) {
        const std::size_t begin = w * static_cast<std::size_t>(window);
        const std::size_t end = begin + static_cast<std::size_t>(window);
        double gamma_mean = 0.0, ret_mean = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            gamma_mean += run.gamma[i];
            ret_mean += returns[i];
        }
        gamma_mean /= static_cast<double>(window);
        ret_mean /= static_cast<double>(window);
        double ss = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            ss += (returns[i] - ret_mean) * (returns[i] - ret_mean);
        }
        const double vol = std::sqrt(ss / static_cast<double>(window - 1));

        int bin = static_cast<int>(gamma_mean * static_cast<double>(bins));
        bin = std::clamp(bin, 0, bins - 1);
        vol_sum[static_cast<std::size_t>(bin)] += vol;
        counts[static_cast<std::size_t>(bin)] += 1;
    }

    std::vector<GammaBin> table(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b) {
        auto& row = table[static_cast<std::size_t>(b)];
        row.center = (static_cast<double>(b) + 0.5) / static_cast<double>(bins);
        row.windows = counts[static_cast<std::size_t>(b)];
        row.mean_volatility = row.windows > 0 ? vol_sum[static_cast<std::size_t>(b)] / static_cast<double>(row.windows) : kNaN;
    }
    return table;
}

double gamma_volatility_spearman(const std::vector<GammaBin>& table) {
    std::vector<double> centers, vols;
    for (const GammaBin& bin : table) {
        if (bin.windows > 0 && std::isfinite(bin.mean_volatility)) {
            centers.push_back(bin.center);
            vols.push_back(bin.mean_volatility);
        }
    }
    if (centers.size() < 3) return kNaN;
    return spearman(centers, vols);
}

namespace {

CellResult summarize_cell(const RunResult& run, const ExperimentPlan& plan) {
    CellResult cell;
    cell.seed = run.config.seed;
    cell.volatility = run.volatility();
    for (int i = 0; i < 4; ++i) {
        cell.mean_returns[static_cast<std::size_t>(i)] = run.profits[static_cast<std::size_t>(i)].mean();
        cell.order_counts[static_cast<std::size_t>(i)] = run.profits[static_cast<std::size_t>(i)].orders;
    }
    cell.switcher_net = run.switcher_net_mean();
    cell.info_cost_paid = run.info_cost_paid;
    if (!run.gamma.empty()) {
        cell.gamma_mean = std::accumulate(run.gamma.begin(), run.gamma.end(), 0.0) /
                          static_cast<double>(run.gamma.size());
        if (run.gamma.size() >= static_cast<std::size_t>(plan.gamma_window)) {
            cell.gamma_table = gamma_analysis(run, plan.gamma_window, plan.gamma_bins);
            cell.gamma_spearman = gamma_volatility_spearman(cell.gamma_table);
        } else {
            cell.gamma_spearman = kNaN;
        }
    } else {
        cell.gamma_mean = kNaN;
        cell.gamma_spearman = kNaN;
    }
    return cell;
}

MixSummary summarize_mix(const AgentMix& mix, std::span<const CellResult> cells, int gamma_bins) {
    MixSummary summary;
    summary.mix = mix;

    std::vector<double> vols, nets, spearmans;
    std::array<std::vector<double>, 4> returns;
    for (const CellResult& cell : cells) {
        vols.push_back(cell.volatility);
        nets.push_back(cell.switcher_net);
        spearmans.push_back(cell.gamma_spearman);
        for (int i = 0; i < 4; ++i) returns[static_cast<std::size_t>(i)].push_back(cell.mean_returns[static_cast<std::size_t>(i)]);
    }
    summary.mean_volatility = finite_mean(vols);
    summary.mean_switcher_net = finite_mean(nets);
    summary.mean_gamma_spearman = finite_mean(spearmans);
    for (int i = 0; i < 4; ++i) {
        summary.mean_returns[static_cast<std::size_t>(i)] = finite_mean(returns[static_cast<std::size_t>(i)]);
    }

    if (mix.switcher > 0.0) {
        summary.gamma_table.resize(static_cast<std::size_t>(gamma_bins));
        std::vector<double> pooled_sum(static_cast<std::size_t>(gamma_bins), 0.0);
        std::vector<std::int64_t> pooled_count(static_cast<std::size_t>(gamma_bins), 0);
        for (const CellResult& cell : cells) {
            for (std::size_t b = 0; b < cell.gamma_table.size(); ++b) {
                const GammaBin& bin = cell.gamma_table[b];
                if (bin.windows > 0) {
                    pooled_sum[b] += bin.mean_volatility * static_cast<double>(bin.windows);
                    pooled_count[b] += bin.windows;
                }
            }
        }
        for (int b = 0; b < gamma_bins; ++b) {
            auto& row = summary.gamma_table[static_cast<std::size_t>(b)];
            row.center = (static_cast<double>(b) + 0.5) / static_cast<double>(gamma_bins);
            row.windows = pooled_count[static_cast<std::size_t>(b)];
            row.mean_volatility = row.windows > 0 ? pooled_sum[static_cast<std::size_t>(b)] / static_cast<double>(row.windows) : kNaN;
        }
    }
    return summary;
}

void persist_cell(const std::filesystem::path& outdir, const RunResult& run, const AgentMix& mix, int seed_index) {
    const std::filesystem::path dir =
        outdir / "runs" / ("rho" + std::to_string(rho_percent(mix))) / ("seed" + std::to_string(seed_index));
    write_prices_csv(dir / "prices.csv", run);
    write_config_json(dir / "config.json", run.config);
    write_profits_json(dir / "profits.json", run);
}

} // namespace

SweepReport run_sweep(const ExperimentPlan& plan, int threads, const std::filesystem::path& outdir) {
    plan.validate();

    SweepReport report;
    report.plan = plan;
    report.cells.assign(plan.mixes.size(), std::vector<CellResult>(plan.seeds.size()));

    const std::size_t total = plan.mixes.size() * plan.seeds.size();
    std::vector<std::atomic<bool>> done(total);
    for (auto& flag : done) flag.store(false);

    auto job = [&](std::size_t index) {
        const std::size_t m = index / plan.seeds.size();
        const std::size_t s = index % plan.seeds.size();
        SimConfig cfg = plan.base;
        cfg.mix = plan.mixes[m];
        cfg.seed = plan.seeds[s];
        cfg.keep_tape = false;
        const RunResult run = run_market(cfg);
        report.cells[m][s] = summarize_cell(run, plan);
        if (!outdir.empty()) persist_cell(outdir, run, plan.mixes[m], static_cast<int>(s));
        done[index].store(true);
    };

    try {
        parallel_for(total, threads, job);
    } catch (...) {
        if (!outdir.empty()) {
            std::string partial = "rho_percent,seed_index,seed,volatility\n";
            for (std::size_t i = 0; i < total; ++i) {
                if (!done[i].load()) continue;
                const std::size_t m = i / plan.seeds.size();
                const std::size_t s = i % plan.seeds.size();
                partial += std::to_string(rho_percent(plan.mixes[m])) + ',' + std::to_string(s) + ',' +
                           std::to_string(plan.seeds[s]) + ',' + format_double(report.cells[m][s].volatility) + '\n';
            }
            write_text_file(outdir / "sweep_partial.csv", partial);
        }
        throw;
    }

    report.summaries.reserve(plan.mixes.size());
    for (std::size_t m = 0; m < plan.mixes.size(); ++m) {
        report.summaries.push_back(summarize_mix(plan.mixes[m], report.cells[m], plan.gamma_bins));
    }
    return report;
}

// ---------------------------------------------------------------------------
// reproduce_paper

namespace {

constexpr const char* kTypeNames[4] = {"informed", "uninformed", "zero_intelligence", "switcher"};

bool all_exist(const std::filesystem::path& dir, std::initializer_list<const char*> names) {
    for (const char* name : names) {
        if (!std::filesystem::exists(dir / name)) return false;
    }
    return true;
}

void write_table1(const std::filesystem::path& outdir) {
    std::string out = "case,condition,action\n";
    out += "1 (bid and ask exist),p_e > ask + mu,market buy\n";
    out += "1 (bid and ask exist),within band and |ask - p_e| <= |p_e - bid|,limit buy at p_e - mu\n";
    out += "1 (bid and ask exist),within band and |ask - p_e| > |p_e - bid|,limit sell at p_e + mu\n";
    out += "1 (bid and ask exist),p_e < bid - mu,market sell\n";
    out += "2 (no bids),p_e > ask + mu,market buy\n";
    out += "2 (no bids),p_e <= ask + mu,limit buy at p_e - mu\n";
    out += "3 (no asks),p_e < bid - mu,market sell\n";
    out += "3 (no asks),p_e >= bid - mu,limit sell at p_e + mu\n";
    out += "4 (empty book),probability 50%,limit buy at p_e - mu\n";
    out += "4 (empty book),probability 50%,limit sell at p_e + mu\n";
    write_text_file(outdir / "table1.csv", out);
}

void write_table2(const std::filesystem::path& outdir, const SimConfig& base) {
    std::string out = "parameter,value\n";
    out += "v0," + fmt6(base.v0) + '\n';
    out += "tick," + fmt6(base.tick) + '\n';
    out += "mu," + fmt6(base.mu) + '\n';
    out += "jump_rate," + fmt6(base.jump_rate) + '\n';
    out += "order_rate," + fmt6(base.order_rate) + '\n';
    out += "lag," + std::to_string(base.lag) + '\n';
    out += "steps," + std::to_string(base.steps) + '\n';
    out += "n_agents," + std::to_string(base.n_agents) + '\n';
    write_text_file(outdir / "table2.csv", out);
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& h,
                         const GaussianFit* fit) {
    std::string out = fit ? "bin_center,count,fitted\n" : "bin_center,count\n";
    for (std::size_t i = 0; i < h.centers.size(); ++i) {
        out += format_double(h.centers[i]);
        out += ',';
        out += format_double(h.counts[i]);
        if (fit) {
            const double z = (h.centers[i] - fit->mean) / fit->width;
            out += ',';
            out += format_double(fit->amplitude * std::exp(-z * z));
        }
        out += '\n';
    }
    write_text_file(path, out);
}

void write_series_csv(const std::filesystem::path& path, const char* header,
                      std::span<const double> values, std::size_t first_index) {
    std::string out = header;
    out += '\n';
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += std::to_string(first_index + i);
        out += ',';
        out += format_double(values[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_arch_tables(const std::filesystem::path& outdir, const ArchReport& fund, const ArchReport& market) {
    // Test statistics for the fundamental carry their coefficient block in
    // the same file, mirroring the published layout.
    std::string t4 = "statistic,value,probability\n";
    t4 += "F-statistic," + format_double(fund.f_stat) + ',' + format_double(fund.f_pvalue) + '\n';
    t4 += "Obs*R-squared," + format_double(fund.obs_r2) + ',' + format_double(fund.obs_r2_pvalue) + '\n';
    t4 += "coefficient a," + format_double(fund.lm.intercept) + ',' + format_double(fund.lm.p_intercept) + '\n';
    t4 += "coefficient b," + format_double(fund.lm.slope) + ',' + format_double(fund.lm.p_slope) + '\n';
    write_text_file(outdir / "table4.csv", t4);

    std::string t5 = "statistic,value,probability\n";
    t5 += "F-statistic," + format_double(market.f_stat) + ',' + format_double(market.f_pvalue) + '\n';
    t5 += "Obs*R-squared," + format_double(market.obs_r2) + ',' + format_double(market.obs_r2_pvalue) + '\n';
    write_text_file(outdir / "table5.csv", t5);

    std::string t6 = "variable,coefficient,std_error,t_statistic,probability\n";
    t6 += "a," + format_double(market.lm.intercept) + ',' + format_double(market.lm.se_intercept) + ',' +
          format_double(market.lm.t_intercept) + ',' + format_double(market.lm.p_intercept) + '\n';
    t6 += "b," + format_double(market.lm.slope) + ',' + format_double(market.lm.se_slope) + ',' +
          format_double(market.lm.t_slope) + ',' + format_double(market.lm.p_slope) + '\n';
    write_text_file(outdir / "table6.csv", t6);
}

struct ValiditySummary {
    Describe desc{};
    double acf_raw_inside_band = 0.0;
    double acf_abs_positive = 0.0;
    int arch_market_significant = 0;
    int arch_fund_insignificant = 0;
    int arch_seeds = 0;
    std::vector<double> hurst_fund;
    std::vector<double> hurst_market;
};

void write_validity_json(const std::filesystem::path& path, const ValiditySummary& v) {
    nlohmann::json j;
    j["kurtosis"] = v.desc.kurtosis;
    j["jarque_bera"] = v.desc.jarque_bera;
    j["jb_pvalue"] = v.desc.jb_pvalue;
    j["skewness"] = v.desc.skewness;
    j["std_dev"] = v.desc.std_dev;
    j["acf_raw_inside_band"] = v.acf_raw_inside_band;
    j["acf_abs_positive"] = v.acf_abs_positive;
    j["arch_market_significant"] = v.arch_market_significant;
    j["arch_fund_insignificant"] = v.arch_fund_insignificant;
    j["arch_seeds"] = v.arch_seeds;
    j["hurst_fund"] = v.hurst_fund;
    j["hurst_market"] = v.hurst_market;
    write_text_file(path, j.dump(2) + "\n");
}

void write_sweep_json(const std::filesystem::path& path, const SweepReport& report) {
    nlohmann::json j;
    j["rho_percent"] = nlohmann::json::array();
    j["mean_volatility"] = nlohmann::json::array();
    j["mean_gamma_spearman"] = nlohmann::json::array();
    nlohmann::json returns = nlohmann::json::object();
    for (const char* name : kTypeNames) returns[name] = nlohmann::json::array();
    returns["switcher_net"] = nlohmann::json::array();
    for (const MixSummary& s : report.summaries) {
        j["rho_percent"].push_back(rho_percent(s.mix));
        j["mean_volatility"].push_back(s.mean_volatility);
        j["mean_gamma_spearman"].push_back(std::isfinite(s.mean_gamma_spearman)
                                               ? nlohmann::json(s.mean_gamma_spearman)
                                               : nlohmann::json(nullptr));
        for (int i = 0; i < 4; ++i) {
            const double r = s.mean_returns[static_cast<std::size_t>(i)];
            returns[kTypeNames[i]].push_back(std::isfinite(r) ? nlohmann::json(r) : nlohmann::json(nullptr));
        }
        returns["switcher_net"].push_back(std::isfinite(s.mean_switcher_net)
                                              ? nlohmann::json(s.mean_switcher_net)
                                              : nlohmann::json(nullptr));
    }
    j["mean_returns"] = returns;
    nlohmann::json vols = nlohmann::json::array();
    for (const auto& mix_cells : report.cells) {
        nlohmann::json row = nlohmann::json::array();
        for (const CellResult& cell : mix_cells) row.push_back(cell.volatility);
        vols.push_back(row);
    }
    j["cell_volatility"] = vols;
    write_text_file(path, j.dump(2) + "\n");
}

} // namespace

void reproduce_paper(const std::filesystem::path& outdir, ReproduceOptions options) {
    if (options.smoke) {
        options.seeds_per_mix = std::min(options.seeds_per_mix, 5);
        options.calibration_runs = std::min(options.calibration_runs, 60);
        options.validity_seeds = std::min(options.validity_seeds, 5);
        options.hurst_seeds = std::min(options.hurst_seeds, 5);
        options.base.steps = std::min<std::int64_t>(options.base.steps, 4000);
    }
    SimConfig base = options.base;
    base.keep_tape = false;
    base.validate();

    std::filesystem::create_directories(outdir);
    const std::vector<std::uint64_t> seeds = make_seed_list(options.master_seed, options.seeds_per_mix);
    const std::vector<AgentMix> mixes = table8_mixes();

    write_table1(outdir);
    write_table2(outdir, base);

    // Stage 1: information-cost calibration on switcher-free markets.
    GaussianFit fit;
    if (options.resume && all_exist(outdir, {"fit.json", "calibration.csv", "fig1.csv"})) {
        fit = read_fit_json(outdir / "fit.json");
    } else {
        SimConfig calib = base;
        calib.mix = mixes.front();
        calib.seed = options.master_seed;
        const std::vector<CostSample> samples =
            run_calibration_campaign(calib, options.calibration_runs, options.threads);
        fit = fit_gaussian(samples);
        write_calibration_csv(outdir / "calibration.csv", samples);
        write_fit_json(outdir / "fit.json", fit);
        std::vector<double> gaps;
        gaps.reserve(samples.size());
        for (const CostSample& s : samples) gaps.push_back(s.gap);
        write_histogram_csv(outdir / "fig1.csv", build_histogram(gaps, fit.bins), &fit);
    }

    // Stage 2: validity battery on the switcher-free baseline.
    const std::initializer_list<const char*> validity_files = {
        "table3.csv", "table4.csv", "table5.csv", "table6.csv", "table7.csv",
        "fig2.csv",   "fig3.csv",   "fig4.csv",   "fig5.csv",   "fig6.csv",
        "validity.json"};
    if (!(options.resume && all_exist(outdir, validity_files))) {
        SimConfig baseline = base;
        baseline.mix = mixes.front();
        baseline.seed = seeds.front();
        baseline.keep_tape = true;
        const RunResult run0 = run_market(baseline);
        write_prices_csv(outdir / "runs" / "baseline" / "prices.csv", run0);
        write_trades_csv(outdir / "runs" / "baseline" / "trades.csv", run0);
        write_profits_json(outdir / "runs" / "baseline" / "profits.json", run0);
        write_config_json(outdir / "runs" / "baseline" / "config.json", run0.config);

        const std::vector<double> ret_market = log_returns(run0.p);
        const std::vector<double> ret_fund = log_returns(run0.v);

        ValiditySummary validity;
        validity.desc = describe(ret_market);
        std::string t3 = "statistic,value\n";
        t3 += "Mean," + format_double(validity.desc.mean) + '\n';
        t3 += "Median," + format_double(validity.desc.median) + '\n';
        t3 += "Maximum," + format_double(validity.desc.max) + '\n';
        t3 += "Minimum," + format_double(validity.desc.min) + '\n';
        t3 += "Std. Dev.," + format_double(validity.desc.std_dev) + '\n';
        t3 += "Skewness," + format_double(validity.desc.skewness) + '\n';
        t3 += "Kurtosis," + format_double(validity.desc.kurtosis) + '\n';
        t3 += "Jarque-Bera," + format_double(validity.desc.jarque_bera) + '\n';
        t3 += "Probability," + format_double(validity.desc.jb_pvalue) + '\n';
        write_text_file(outdir / "table3.csv", t3);

        write_arch_tables(outdir, arch_lm(ret_fund), arch_lm(ret_market));

        // Figures 2-6: series and correlograms of the baseline run.
        {
            std::string out = "t,v,p\n";
            for (std::size_t t = 0; t < run0.p.size(); ++t) {
                out += std::to_string(t) + ',' + format_double(run0.v[t]) + ',' + format_double(run0.p[t]) + '\n';
            }
            write_text_file(outdir / "fig2.csv", out);
        }
        write_histogram_csv(outdir / "fig3.csv", build_histogram(ret_market, 50), nullptr);
        write_series_csv(outdir / "fig4.csv", "t,log_ret_v", ret_fund, 1);
        write_series_csv(outdir / "fig5.csv", "t,log_ret_p", ret_market, 1);

        const int max_lag = 50;
        const AcfResult acf_raw = acf(ret_market, max_lag);
        std::vector<double> abs_returns(ret_market.size());
        std::transform(ret_market.begin(), ret_market.end(), abs_returns.begin(),
                       [](double r) { return std::abs(r); });
        const AcfResult acf_abs = acf(abs_returns, max_lag);
        {
            std::string out = "lag,acf_return,acf_abs_return,band\n";
            for (int k = 1; k <= max_lag; ++k) {
                out += std::to_string(k) + ',' + format_double(acf_raw.rho[static_cast<std::size_t>(k - 1)]) + ',' +
                       format_double(acf_abs.rho[static_cast<std::size_t>(k - 1)]) + ',' +
                       format_double(acf_raw.band) + '\n';
            }
            write_text_file(outdir / "fig6.csv", out);
        }
        int inside = 0, positive = 0;
        for (int k = 0; k < max_lag; ++k) {
            if (std::abs(acf_raw.rho[static_cast<std::size_t>(k)]) <= acf_raw.band) ++inside;
            if (acf_abs.rho[static_cast<std::size_t>(k)] > 0.0) ++positive;
        }
        validity.acf_raw_inside_band = static_cast<double>(inside) / max_lag;
        validity.acf_abs_positive = static_cast<double>(positive) / max_lag;

        // ARCH significance battery over independent baseline seeds.
        validity.arch_seeds = options.validity_seeds;
        std::vector<int> market_hits(static_cast<std::size_t>(options.validity_seeds), 0);
        std::vector<int> fund_hits(static_cast<std::size_t>(options.validity_seeds), 0);
        parallel_for(static_cast<std::size_t>(options.validity_seeds), options.threads, [&](std::size_t k) {
            SimConfig cfg = base;
            cfg.mix = mixes.front();
            cfg.seed = seeds[k % seeds.size()];
            const RunResult run = run_market(cfg);
            market_hits[k] = arch_lm(log_returns(run.p)).lm.p_slope < 0.01 ? 1 : 0;
            fund_hits[k] = arch_lm(log_returns(run.v)).lm.p_slope > 0.05 ? 1 : 0;
        });
        validity.arch_market_significant = std::accumulate(market_hits.begin(), market_hits.end(), 0);
        validity.arch_fund_insignificant = std::accumulate(fund_hits.begin(), fund_hits.end(), 0);

        // Hurst exponents for both series over a handful of seeds.
        validity.hurst_fund.assign(static_cast<std::size_t>(options.hurst_seeds), 0.0);
        validity.hurst_market.assign(static_cast<std::size_t>(options.hurst_seeds), 0.0);
        parallel_for(static_cast<std::size_t>(options.hurst_seeds), options.threads, [&](std::size_t k) {
            SimConfig cfg = base;
            cfg.mix = mixes.front();
            cfg.seed = seeds[k % seeds.size()];
            const RunResult run = run_market(cfg);
            validity.hurst_fund[k] = hurst_rs(log_returns(run.v));
            validity.hurst_market[k] = hurst_rs(log_returns(run.p));
        });
        {
            std::string out = "simulation,hurst_fundamental,hurst_market\n";
            for (int k = 0; k < options.hurst_seeds; ++k) {
                out += std::to_string(k + 1) + ',' + format_double(validity.hurst_fund[static_cast<std::size_t>(k)]) +
                       ',' + format_double(validity.hurst_market[static_cast<std::size_t>(k)]) + '\n';
            }
            write_text_file(outdir / "table7.csv", out);
        }
        write_validity_json(outdir / "validity.json", validity);
    }

    // Stage 3: rho sweep with the calibrated information cost.
    const std::initializer_list<const char*> sweep_files = {"table8.csv", "table9.csv", "fig7a-c.csv",
                                                            "fig8.csv", "sweep.json"};
    if (!(options.resume && all_exist(outdir, sweep_files))) {
        ExperimentPlan plan;
        plan.mixes = mixes;
        plan.seeds = seeds;
        plan.base = base;
        plan.base.cost_policy = CostPolicy::fixed;
        plan.base.info_cost = fit.mean; // the calibrated cost
        plan.gamma_window = options.gamma_window;
        plan.gamma_bins = options.gamma_bins;
        const SweepReport report = run_sweep(plan, options.threads, outdir);

        {
            std::string out = "simulation,informed,uninformed,zero_intelligence,switcher\n";
            for (std::size_t m = 0; m < mixes.size(); ++m) {
                const AgentMix& mix = mixes[m];
                out += std::to_string(m + 1) + ',' + fmt6(mix.informed) + ',' + fmt6(mix.uninformed) + ',' +
                       fmt6(mix.zero_intelligence) + ',' + fmt6(mix.switcher) + '\n';
            }
            write_text_file(outdir / "table8.csv", out);
        }
        {
            std::string out = "rho_percent,mean_volatility\n";
            for (const MixSummary& s : report.summaries) {
                out += std::to_string(rho_percent(s.mix)) + ',' + format_double(s.mean_volatility) + '\n';
            }
            write_text_file(outdir / "table9.csv", out);
        }
        {
            // Panels: (a) informed, (b) uninformed, (c) switchers net of the
            // information cost. Per-seed rows plus the cross-seed mean.
            std::string out = "panel,type,rho_percent,seed_index,mean_order_return\n";
            auto emit = [&](char panel, const char* type, auto value_of) {
                for (std::size_t m = 0; m < report.cells.size(); ++m) {
                    const int rho = rho_percent(report.plan.mixes[m]);
                    std::vector<double> values;
                    for (std::size_t s = 0; s < report.cells[m].size(); ++s) {
                        const double value = value_of(report.cells[m][s]);
                        if (!std::isfinite(value)) continue;
                        values.push_back(value);
                        out += panel;
                        out += ',';
                        out += type;
                        out += ',' + std::to_string(rho) + ',' + std::to_string(s) + ',' + format_double(value) + '\n';
                    }
                    if (!values.empty()) {
                        out += panel;
                        out += ',';
                        out += type;
                        out += ',' + std::to_string(rho) + ",mean," + format_double(finite_mean(values)) + '\n';
                    }
                }
            };
            emit('a', "informed", [](const CellResult& c) {
                return c.mean_returns[static_cast<std::size_t>(AgentType::informed)];
            });
            emit('b', "uninformed", [](const CellResult& c) {
                return c.mean_returns[static_cast<std::size_t>(AgentType::uninformed)];
            });
            emit('c', "switcher_net", [](const CellResult& c) { return c.switcher_net; });
            write_text_file(outdir / "fig7a-c.csv", out);
        }
        {
            // Pooled gamma table at the largest switcher share.
            const MixSummary& top = report.summaries.back();
            std::string out = "gamma_bin_center,mean_volatility,windows\n";
            for (const GammaBin& bin : top.gamma_table) {
                out += format_double(bin.center) + ',';
                if (bin.windows > 0) out += format_double(bin.mean_volatility);
                out += ',' + std::to_string(bin.windows) + '\n';
            }
            write_text_file(outdir / "fig8.csv", out);
        }
        write_sweep_json(outdir / "sweep.json", report);
    }

    // Stage 4: assemble the report from the persisted stage outputs, so a
    // resumed pipeline renders identical bytes.
    const nlohmann::json fitj = nlohmann::json::parse(read_text_file(outdir / "fit.json"));
    const nlohmann::json validity = nlohmann::json::parse(read_text_file(outdir / "validity.json"));
    const nlohmann::json sweep = nlohmann::json::parse(read_text_file(outdir / "sweep.json"));

    std::string md;
    md += "# Market simulation report\n\n";
    md += "Generated by casim " + std::string(kVersion) + ".\n\n";
    md += "- master seed: " + std::to_string(options.master_seed) + "\n";
    md += "- steps per run: " + std::to_string(base.steps) + "\n";
    md += "- seeds per mix: " + std::to_string(options.seeds_per_mix) + "\n";
    md += "- calibration runs: " + std::to_string(options.calibration_runs) + "\n";
    md += std::string("- mode: ") + (options.smoke ? "smoke (reduced scale, wider tolerances)" : "full") + "\n\n";

    md += "## Information cost calibration\n\n";
    md += "Gaussian fit to the informed-minus-uninformed profit gap over " +
          std::to_string(options.calibration_runs) + " switcher-free runs:\n\n";
    md += "- a (amplitude): " + fmt6(fitj.at("a").get<double>()) + "\n";
    md += "- b (mean): " + fmt6(fitj.at("b").get<double>()) + "\n";
    md += "- c (width): " + fmt6(fitj.at("c").get<double>()) + "\n";
    md += "- adjusted R^2: " + fmt6(fitj.at("r2_adj").get<double>()) + "\n";
    md += "- implied sigma: " + fmt6(fitj.at("sigma").get<double>()) + "\n\n";
    md += "Data: calibration.csv, fig1.csv. The fitted mean is used as the\n";
    md += "information cost in the sweep below.\n\n";

    md += "## Validity battery (baseline market, no switchers)\n\n";
    md += "- market return kurtosis: " + fmt6(validity.at("kurtosis").get<double>()) + "\n";
    md += "- Jarque-Bera: " + fmt6(validity.at("jarque_bera").get<double>()) +
          " (p = " + fmt6(validity.at("jb_pvalue").get<double>()) + ")\n";
    md += "- raw-return ACF inside 95% band: " + fmt6(100.0 * validity.at("acf_raw_inside_band").get<double>()) +
          "% of lags 1-50\n";
    md += "- absolute-return ACF positive: " + fmt6(100.0 * validity.at("acf_abs_positive").get<double>()) +
          "% of lags 1-50\n";
    md += "- ARCH LM slope significant at 1% (market): " +
          std::to_string(validity.at("arch_market_significant").get<int>()) + "/" +
          std::to_string(validity.at("arch_seeds").get<int>()) + " seeds\n";
    md += "- ARCH LM slope insignificant at 5% (fundamental): " +
          std::to_string(validity.at("arch_fund_insignificant").get<int>()) + "/" +
          std::to_string(validity.at("arch_seeds").get<int>()) + " seeds\n";
    md += "- Hurst (fundamental): ";
    for (const auto& h : validity.at("hurst_fund")) md += fmt6(h.get<double>()) + " ";
    md += "\n- Hurst (market): ";
    for (const auto& h : validity.at("hurst_market")) md += fmt6(h.get<double>()) + " ";
    md += "\n\nData: table3.csv-table7.csv, fig2.csv-fig6.csv.\n\n";

    md += "## Volatility versus switcher share\n\n";
    md += "| rho | mean volatility | gamma-volatility Spearman |\n|---|---|---|\n";
    {
        const auto& rhos = sweep.at("rho_percent");
        const auto& vols = sweep.at("mean_volatility");
        const auto& rs = sweep.at("mean_gamma_spearman");
        for (std::size_t i = 0; i < rhos.size(); ++i) {
            md += "| " + std::to_string(rhos[i].get<int>()) + "% | " + fmt6(vols[i].get<double>()) + " | ";
            md += rs[i].is_null() ? "-" : fmt6(rs[i].get<double>());
            md += " |\n";
        }
    }
    md += "\nData: table9.csv, fig7a-c.csv, fig8.csv. The gamma column reports,\n";
    md += "per switcher share, the mean over seeds of the Spearman correlation\n";
    md += "between windowed gamma and windowed volatility.\n\n";

    md += "## Checks\n\n";
    {
        const auto& vols = sweep.at("mean_volatility");
        bool increasing = true;
        for (std::size_t i = 1; i < vols.size(); ++i) {
            if (!(vols[i].get<double>() > vols[i - 1].get<double>())) increasing = false;
        }
        const bool ordered_ends = vols.back().get<double>() > vols.front().get<double>();
        md += std::string("- volatility strictly increasing in rho: ") + (increasing ? "yes" : "no") + "\n";
        md += std::string("- volatility higher with switchers than without: ") + (ordered_ends ? "yes" : "no") + "\n";
        const auto& rs = sweep.at("mean_gamma_spearman");
        for (std::size_t i = 0; i < rs.size(); ++i) {
            if (rs[i].is_null()) continue;
            md += "- gamma-volatility correlation negative at rho=" +
                  std::to_string(sweep.at("rho_percent")[i].get<int>()) + "%: " +
                  (rs[i].get<double>() < 0.0 ? "yes" : "no") + " (" + fmt6(rs[i].get<double>()) + ")\n";
        }
        md += std::string("- calibrated gap positive: ") + (fitj.at("b").get<double>() > 0.0 ? "yes" : "no") + "\n";
    }
    if (options.smoke) {
        md += "\nSmoke mode: reduced runs and steps; treat magnitudes as\n";
        md += "indicative and rely on the orderings only.\n";
    }
    write_text_file(outdir / "report.md", md);
}

} // namespace casim
