#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "harqbeck/channel.hpp"

namespace harqbeck {

// Config validation failure; what() carries the offending field path.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct McConfig {
  std::int64_t n = 0;
  std::uint64_t seed = 0;
};

struct OptimizeConfig {
  std::vector<double> epsilons;
  double rate_lo = 0.1;
  double rate_hi = 16.0;
  double tol_rate = 1e-6;
  double tol_ltat = 1e-6;
  int max_outer = 50;
  int max_dinkelbach = 30;
  double grid_step = 0.05;
};

struct OutputConfig {
  enum class Format { Csv, Json };
  Format format = Format::Csv;
  std::string path;  // empty: stdout
};

struct ExperimentConfig {
  ChannelModel channel;
  std::vector<double> rates;   // may be empty for the optimize command
  std::vector<double> snr_db;  // single value or strictly increasing sweep
  std::optional<McConfig> mc;
  std::optional<OptimizeConfig> optimize;
  OutputConfig output;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace harqbeck
