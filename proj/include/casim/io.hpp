#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "casim/calibration.hpp"
#include "casim/market.hpp"

#include <json.hpp>

namespace casim {

inline constexpr const char* kVersion = "0.1.0";

// All writers go through a temp file and rename, so partial output never
// lands under the final name.
void write_text_file(const std::filesystem::path& path, const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

// Full-precision doubles ("%.17g"): persisted series must round-trip exactly.
std::string format_double(double value);

void to_json(nlohmann::json& j, const AgentMix& mix);
void from_json(const nlohmann::json& j, AgentMix& mix);
void to_json(nlohmann::json& j, const GAConfig& ga);
void from_json(const nlohmann::json& j, GAConfig& ga);
void to_json(nlohmann::json& j, const SimConfig& cfg);
void from_json(const nlohmann::json& j, SimConfig& cfg);

SimConfig load_sim_config(const std::filesystem::path& path);

// prices.csv: t, v, p, log_ret_v, log_ret_p, gamma (gamma blank when the run
// had no switchers).
void write_prices_csv(const std::filesystem::path& path, const RunResult& run);

// trades.csv: step, price, size, buy_agent, sell_agent.
void write_trades_csv(const std::filesystem::path& path, const RunResult& run);

void write_profits_json(const std::filesystem::path& path, const RunResult& run);

void write_config_json(const std::filesystem::path& path, const SimConfig& cfg);

void write_calibration_csv(const std::filesystem::path& path, const std::vector<CostSample>& samples);

void write_fit_json(const std::filesystem::path& path, const GaussianFit& fit);

GaussianFit read_fit_json(const std::filesystem::path& path);

// Round-trip of a persisted run: price/fundamental series and gamma.
struct PricesFile {
    std::vector<double> v;
    std::vector<double> p;
    std::vector<double> gamma; // empty when the column was blank
};

PricesFile read_prices_csv(const std::filesystem::path& path);

} // namespace casim
