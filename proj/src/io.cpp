#include "casim/io.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace casim {

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void to_json(nlohmann::json& j, const AgentMix& mix) {
    j = {{"informed", mix.informed},
         {"uninformed", mix.uninformed},
         {"zero_intelligence", mix.zero_intelligence},
         {"switcher", mix.switcher}};
}

void from_json(const nlohmann::json& j, AgentMix& mix) {
    mix.informed = j.value("informed", mix.informed);
    mix.uninformed = j.value("uninformed", mix.uninformed);
    mix.zero_intelligence = j.value("zero_intelligence", mix.zero_intelligence);
    mix.switcher = j.value("switcher", mix.switcher);
}

void to_json(nlohmann::json& j, const GAConfig& ga) {
    j = {{"interval_steps", ga.interval_steps}, {"eval_window", ga.eval_window},
         {"tournament_k", ga.tournament_k},     {"crossover_rate", ga.crossover_rate},
         {"mutation_rate", ga.mutation_rate},   {"mutation_sigma", ga.mutation_sigma}};
}

void from_json(const nlohmann::json& j, GAConfig& ga) {
    ga.interval_steps = j.value("interval_steps", ga.interval_steps);
    ga.eval_window = j.value("eval_window", ga.eval_window);
    ga.tournament_k = j.value("tournament_k", ga.tournament_k);
    ga.crossover_rate = j.value("crossover_rate", ga.crossover_rate);
    ga.mutation_rate = j.value("mutation_rate", ga.mutation_rate);
    ga.mutation_sigma = j.value("mutation_sigma", ga.mutation_sigma);
}

void to_json(nlohmann::json& j, const SimConfig& cfg) {
    j = nlohmann::json{
        {"v0", cfg.v0},
        {"tick", cfg.tick},
        {"mu", cfg.mu},
        {"jump_rate", cfg.jump_rate},
        {"order_rate", cfg.order_rate},
        {"lag", cfg.lag},
        {"steps", cfg.steps},
        {"n_agents", cfg.n_agents},
        {"mix", cfg.mix},
        {"cost_policy", cfg.cost_policy == CostPolicy::fixed ? "fixed" : "gaussian"},
        {"info_cost", cfg.info_cost},
        {"cost_mean", cfg.cost_mean},
        {"cost_sigma", cfg.cost_sigma},
        {"ga", cfg.ga},
        {"discrete_jumps", cfg.discrete_jumps},
        {"fixed_order_scheduling", cfg.fixed_order_scheduling},
        {"informed_act_uninformed", cfg.informed_act_uninformed},
        {"keep_tape", cfg.keep_tape},
        {"seed", cfg.seed},
    };
}

void from_json(const nlohmann::json& j, SimConfig& cfg) {
    cfg.v0 = j.value("v0", cfg.v0);
    cfg.tick = j.value("tick", cfg.tick);
    cfg.mu = j.value("mu", cfg.mu);
    cfg.jump_rate = j.value("jump_rate", cfg.jump_rate);
    cfg.order_rate = j.value("order_rate", cfg.order_rate);
    cfg.lag = j.value("lag", cfg.lag);
    cfg.steps = j.value("steps", cfg.steps);
    cfg.n_agents = j.value("n_agents", cfg.n_agents);
    if (j.contains("mix")) j.at("mix").get_to(cfg.mix);
    if (j.contains("cost_policy")) {
        const std::string policy = j.at("cost_policy").get<std::string>();
        if (policy == "fixed") {
            cfg.cost_policy = CostPolicy::fixed;
        } else if (policy == "gaussian") {
            cfg.cost_policy = CostPolicy::gaussian;
        } else {
            throw std::invalid_argument("unknown cost_policy: " + policy);
        }
    }
    cfg.info_cost = j.value("info_cost", cfg.info_cost);
    cfg.cost_mean = j.value("cost_mean", cfg.cost_mean);
    cfg.cost_sigma = j.value("cost_sigma", cfg.cost_sigma);
    if (j.contains("ga")) j.at("ga").get_to(cfg.ga);
    cfg.discrete_jumps = j.value("discrete_jumps", cfg.discrete_jumps);
    cfg.fixed_order_scheduling = j.value("fixed_order_scheduling", cfg.fixed_order_scheduling);
    cfg.informed_act_uninformed = j.value("informed_act_uninformed", cfg.informed_act_uninformed);
    cfg.keep_tape = j.value("keep_tape", cfg.keep_tape);
    cfg.seed = j.value("seed", cfg.seed);
}

SimConfig load_sim_config(const std::filesystem::path& path) {
    const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
    SimConfig cfg;
    j.get_to(cfg);
    cfg.validate();
    return cfg;
}

void write_prices_csv(const std::filesystem::path& path, const RunResult& run) {
    std::string out = "t,v,p,log_ret_v,log_ret_p,gamma\n";
    const bool has_gamma = !run.gamma.empty();
    for (std::size_t t = 0; t < run.p.size(); ++t) {
        out += std::to_string(t);
        out += ',';
        out += format_double(run.v[t]);
        out += ',';
        out += format_double(run.p[t]);
        out += ',';
        out += t == 0 ? "0" : format_double(std::log(run.v[t] / run.v[t - 1]));
        out += ',';
        out += t == 0 ? "0" : format_double(std::log(run.p[t] / run.p[t - 1]));
        out += ',';
        if (has_gamma && t > 0) out += format_double(run.gamma[t - 1]);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_trades_csv(const std::filesystem::path& path, const RunResult& run) {
    std::string out = "step,price,size,buy_agent,sell_agent\n";
    for (const Trade& trade : run.tape) {
        out += std::to_string(trade.step);
        out += ',';
        out += format_double(run.config.tick * static_cast<double>(trade.price));
        out += ",1,";
        out += std::to_string(trade.buyer);
        out += ',';
        out += std::to_string(trade.seller);
        out += '\n';
    }
    write_text_file(path, out);
}

namespace {

nlohmann::json finite_or_null(double value) {
    if (std::isfinite(value)) return value;
    return nullptr;
}

} // namespace

void write_profits_json(const std::filesystem::path& path, const RunResult& run) {
    static constexpr const char* kTypeNames[4] = {"informed", "uninformed", "zero_intelligence", "switcher"};
    nlohmann::json j;
    for (int i = 0; i < 4; ++i) {
        const TypeProfit& tp = run.profits[static_cast<std::size_t>(i)];
        j[kTypeNames[i]] = {{"total", tp.total}, {"orders", tp.orders}, {"mean", finite_or_null(tp.mean())}};
    }
    j["switcher"]["info_cost_paid"] = run.info_cost_paid;
    j["switcher"]["net_mean"] = finite_or_null(run.switcher_net_mean());
    j["volatility"] = run.volatility();
    write_text_file(path, j.dump(2) + "\n");
}

void write_config_json(const std::filesystem::path& path, const SimConfig& cfg) {
    nlohmann::json j = cfg;
    j["version"] = kVersion;
    write_text_file(path, j.dump(2) + "\n");
}

void write_calibration_csv(const std::filesystem::path& path, const std::vector<CostSample>& samples) {
    std::string out = "seed,gap\n";
    for (const CostSample& s : samples) {
        out += std::to_string(s.seed);
        out += ',';
        out += format_double(s.gap);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_fit_json(const std::filesystem::path& path, const GaussianFit& fit) {
    const nlohmann::json j = {{"a", fit.amplitude}, {"b", fit.mean},        {"c", fit.width},
                              {"sigma", fit.sigma()}, {"r2_adj", fit.r2_adj}, {"bins", fit.bins},
                              {"iterations", fit.iterations}};
    write_text_file(path, j.dump(2) + "\n");
}

GaussianFit read_fit_json(const std::filesystem::path& path) {
    const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
    GaussianFit fit;
    fit.amplitude = j.at("a").get<double>();
    fit.mean = j.at("b").get<double>();
    fit.width = j.at("c").get<double>();
    fit.r2_adj = j.value("r2_adj", 0.0);
    fit.bins = j.value("bins", 0);
    fit.iterations = j.value("iterations", 0);
    return fit;
}

PricesFile read_prices_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    PricesFile file;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty prices file");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<std::string, 6> fields;
        std::size_t field = 0;
        std::string current;
        for (char ch : line) {
            if (ch == ',') {
                if (field < fields.size()) fields[field] = current;
                current.clear();
                ++field;
            } else {
                current += ch;
            }
        }
        if (field < fields.size()) fields[field] = current;
        if (field + 1 != fields.size()) throw std::runtime_error("malformed prices row: " + line);
        file.v.push_back(std::stod(fields[1]));
        file.p.push_back(std::stod(fields[2]));
        if (!fields[5].empty()) file.gamma.push_back(std::stod(fields[5]));
    }
    return file;
}

} // namespace casim
