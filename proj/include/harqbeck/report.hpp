#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "harqbeck/config.hpp"

namespace harqbeck {

// Tabular command output. Cells are JSON scalars; doubles are emitted with
// 17 significant digits so the CSV round-trips 64-bit floats exactly.
struct SweepReport {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
};

std::string format_double(double v);

std::string to_csv(const SweepReport& report);
std::string to_json(const SweepReport& report);

// Serialize per config.output (path overridable); empty path writes to
// stdout.
void write_report(const SweepReport& report, const OutputConfig& output,
                  const std::optional<std::string>& path_override);

}  // namespace harqbeck
