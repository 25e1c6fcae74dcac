#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "casim/experiment.hpp"
#include "casim/io.hpp"
#include "casim/stats.hpp"

namespace fs = std::filesystem;
using namespace casim;

namespace {

struct CommonOpts {
    std::uint64_t seed = 1;
    std::string config_path;
    std::string out_dir = "out";
    int threads = 1;
    bool smoke = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "master random seed");
    cmd->add_option("--config", opts.config_path, "JSON config file overriding the defaults");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--threads", opts.threads, "worker threads for independent runs");
    cmd->add_flag("--smoke", opts.smoke, "reduced-scale mode for quick checks");
}

SimConfig base_config(const CommonOpts& opts) {
    SimConfig cfg;
    if (!opts.config_path.empty()) cfg = load_sim_config(opts.config_path);
    cfg.seed = opts.seed;
    if (opts.smoke) cfg.steps = std::min<std::int64_t>(cfg.steps, 4000);
    return cfg;
}

int cmd_run(const CommonOpts& opts, double rho, std::int64_t steps) {
    SimConfig cfg = base_config(opts);
    if (steps > 0) cfg.steps = steps;
    if (rho >= 0.0) {
        cfg.mix.informed = 0.12;
        cfg.mix.zero_intelligence = 0.58;
        cfg.mix.switcher = rho;
        cfg.mix.uninformed = 0.30 - rho;
    }
    cfg.keep_tape = true;
    cfg.validate();

    const RunResult run = run_market(cfg);
    const fs::path out(opts.out_dir);
    write_prices_csv(out / "prices.csv", run);
    write_trades_csv(out / "trades.csv", run);
    write_profits_json(out / "profits.json", run);
    write_config_json(out / "config.json", cfg);

    std::printf("run complete: %lld steps, %zu trades, volatility %.6g\n",
                static_cast<long long>(cfg.steps), run.tape.size(), run.volatility());
    std::printf("wrote %s/{prices.csv,trades.csv,profits.json,config.json}\n", opts.out_dir.c_str());
    return 0;
}

int cmd_calibrate(const CommonOpts& opts, int runs) {
    SimConfig cfg = base_config(opts);
    cfg.mix = table8_mixes().front();
    const std::vector<CostSample> samples = run_calibration_campaign(cfg, runs, opts.threads);
    const GaussianFit fit = fit_gaussian(samples);

    const fs::path out(opts.out_dir);
    write_calibration_csv(out / "calibration.csv", samples);
    write_fit_json(out / "fit.json", fit);

    std::printf("calibration: %d runs, fitted mean %.6g, width %.6g, adj R^2 %.6g\n",
                runs, fit.mean, fit.width, fit.r2_adj);
    return 0;
}

int cmd_stats(const std::string& in_path, const std::string& out_path, const std::string& hurst_method) {
    const PricesFile prices = read_prices_csv(in_path);
    const std::vector<double> ret_market = log_returns(prices.p);
    const std::vector<double> ret_fund = log_returns(prices.v);

    const bool use_dfa = hurst_method == "dfa";
    auto hurst = [&](std::span<const double> r) { return use_dfa ? hurst_dfa(r) : hurst_rs(r); };

    nlohmann::json j;
    const Describe desc = describe(ret_market);
    j["descriptive"] = {{"n", desc.n},           {"mean", desc.mean},
                        {"median", desc.median}, {"max", desc.max},
                        {"min", desc.min},       {"std_dev", desc.std_dev},
                        {"skewness", desc.skewness}, {"kurtosis", desc.kurtosis},
                        {"jarque_bera", desc.jarque_bera}, {"jb_pvalue", desc.jb_pvalue}};

    auto arch_block = [](const ArchReport& r) {
        return nlohmann::json{{"a", r.lm.intercept},
                              {"b", r.lm.slope},
                              {"b_se", r.lm.se_slope},
                              {"b_t", r.lm.t_slope},
                              {"b_pvalue", r.lm.p_slope},
                              {"f_stat", r.f_stat},
                              {"f_pvalue", r.f_pvalue},
                              {"obs_r2", r.obs_r2},
                              {"obs_r2_pvalue", r.obs_r2_pvalue}};
    };
    j["arch_market"] = arch_block(arch_lm(ret_market));
    j["arch_fundamental"] = arch_block(arch_lm(ret_fund));

    const int max_lag = 50;
    const AcfResult raw = acf(ret_market, max_lag);
    std::vector<double> abs_ret(ret_market.size());
    for (std::size_t i = 0; i < ret_market.size(); ++i) abs_ret[i] = std::abs(ret_market[i]);
    const AcfResult abs_acf = acf(abs_ret, max_lag);
    j["acf"] = {{"band", raw.band}, {"returns", raw.rho}, {"abs_returns", abs_acf.rho}};

    j["hurst"] = {{"method", use_dfa ? "dfa" : "rs"},
                  {"market", hurst(ret_market)},
                  {"fundamental", hurst(ret_fund)}};

    write_text_file(out_path, j.dump(2) + "\n");
    std::printf("stats written to %s\n", out_path.c_str());
    return 0;
}

int cmd_sweep(const CommonOpts& opts, int n_seeds, double info_cost) {
    ExperimentPlan plan;
    plan.base = base_config(opts);
    plan.base.info_cost = info_cost;
    plan.mixes = table8_mixes();
    plan.seeds = make_seed_list(opts.seed, opts.smoke ? std::min(n_seeds, 5) : n_seeds);

    const SweepReport report = run_sweep(plan, opts.threads, fs::path(opts.out_dir));
    std::string out = "rho_percent,mean_volatility\n";
    std::printf("rho%%  mean volatility\n");
    for (const MixSummary& s : report.summaries) {
        const int rho = static_cast<int>(std::lround(s.mix.switcher * 100));
        std::printf("%3d   %.6g\n", rho, s.mean_volatility);
        out += std::to_string(rho) + ',' + format_double(s.mean_volatility) + '\n';
    }
    write_text_file(fs::path(opts.out_dir) / "table9.csv", out);
    return 0;
}

int cmd_gamma(const std::string& in_path, const std::string& out_path, int window, int bins) {
    const PricesFile prices = read_prices_csv(in_path);
    if (prices.gamma.empty()) {
        std::fprintf(stderr, "error: %s has no gamma column values (run without switchers?)\n", in_path.c_str());
        return 1;
    }
    RunResult run;
    run.p = prices.p;
    run.v = prices.v;
    run.gamma = prices.gamma;
    const std::vector<GammaBin> table = gamma_analysis(run, window, bins);

    std::string out = "gamma_bin_center,mean_volatility,windows\n";
    for (const GammaBin& bin : table) {
        out += format_double(bin.center) + ',';
        if (bin.windows > 0) out += format_double(bin.mean_volatility);
        out += ',' + std::to_string(bin.windows) + '\n';
    }
    write_text_file(out_path, out);
    const double rs = gamma_volatility_spearman(table);
    std::printf("gamma bins written to %s (Spearman %.4g)\n", out_path.c_str(), rs);
    return 0;
}

int cmd_reproduce(const CommonOpts& opts, int calibration_runs, int seeds_per_mix, bool resume) {
    ReproduceOptions options;
    options.master_seed = opts.seed;
    options.threads = opts.threads;
    options.smoke = opts.smoke;
    options.resume = resume;
    options.calibration_runs = calibration_runs;
    options.seeds_per_mix = seeds_per_mix;
    if (!opts.config_path.empty()) options.base = load_sim_config(opts.config_path);
    reproduce_paper(fs::path(opts.out_dir), options);
    std::printf("report bundle written to %s (see report.md)\n", opts.out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Agent-based continuous double auction market simulator"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* run = app.add_subcommand("run", "single seeded market run");
    add_common(run, opts);
    double rho = -1.0;
    std::int64_t steps = 0;
    run->add_option("--rho", rho, "switcher fraction (informed 12%, ZI 58% fixed)");
    run->add_option("--steps", steps, "override run length");

    auto* calibrate = app.add_subcommand("calibrate", "estimate the information cost distribution");
    add_common(calibrate, opts);
    int calibration_runs = 200;
    calibrate->add_option("--runs", calibration_runs, "number of switcher-free runs");

    auto* stats = app.add_subcommand("stats", "stylized-facts statistics for a persisted run");
    std::string stats_in, stats_out = "stats.json", hurst_method = "rs";
    stats->add_option("--in", stats_in, "prices.csv of a run")->required();
    stats->add_option("--out", stats_out, "output JSON path");
    stats->add_option("--hurst-method", hurst_method, "rs or dfa")->check(CLI::IsMember({"rs", "dfa"}));

    auto* sweep = app.add_subcommand("sweep", "volatility across switcher shares");
    add_common(sweep, opts);
    int sweep_seeds = 30;
    double sweep_cost = 0.36;
    sweep->add_option("--seeds", sweep_seeds, "seeds shared across mixes");
    sweep->add_option("--cost", sweep_cost, "fixed information cost");

    auto* gamma = app.add_subcommand("gamma", "windowed volatility binned by informed-switcher share");
    std::string gamma_in, gamma_out = "fig8.csv";
    int gamma_window = 50, gamma_bins = 10;
    gamma->add_option("--in", gamma_in, "prices.csv of a run with switchers")->required();
    gamma->add_option("--out", gamma_out, "output CSV path");
    gamma->add_option("--window", gamma_window, "steps per volatility window");
    gamma->add_option("--bins", gamma_bins, "gamma bins over [0,1]");

    auto* reproduce = app.add_subcommand("reproduce", "full pipeline: calibrate, validate, sweep");
    add_common(reproduce, opts);
    int rep_runs = 200, rep_seeds = 30;
    bool resume = false;
    reproduce->add_option("--calibration-runs", rep_runs, "calibration campaign size");
    reproduce->add_option("--runs-per-mix", rep_seeds, "seeds per mix in the sweep");
    reproduce->add_flag("--resume", resume, "skip stages whose outputs already exist");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(opts, rho, steps);
        if (calibrate->parsed()) return cmd_calibrate(opts, calibration_runs);
        if (stats->parsed()) return cmd_stats(stats_in, stats_out, hurst_method);
        if (sweep->parsed()) return cmd_sweep(opts, sweep_seeds, sweep_cost);
        if (gamma->parsed()) return cmd_gamma(gamma_in, gamma_out, gamma_window, gamma_bins);
        if (reproduce->parsed()) return cmd_reproduce(opts, rep_runs, rep_seeds, resume);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
