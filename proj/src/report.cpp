#include "harqbeck/report.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace harqbeck {

namespace {

std::string format_cell(const nlohmann::json& v) {
  switch (v.type()) {
    case nlohmann::json::value_t::null:
      return "";
    case nlohmann::json::value_t::boolean:
      return v.get<bool>() ? "true" : "false";
    case nlohmann::json::value_t::number_integer:
      return std::to_string(v.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned:
      return std::to_string(v.get<std::uint64_t>());
    case nlohmann::json::value_t::number_float:
      return format_double(v.get<double>());
    case nlohmann::json::value_t::string:
      return v.get<std::string>();
    default:
      return v.dump();
  }
}

}  // namespace

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string to_csv(const SweepReport& report) {
  std::ostringstream os;
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    if (c) os << ',';
    os << report.columns[c];
  }
  os << '\n';
  for (const auto& row : report.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << format_cell(row[c]);
    }
    os << '\n';
  }
  return os.str();
}

std::string to_json(const SweepReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c)
      obj[report.columns[c]] = row[c];
    rows.push_back(std::move(obj));
  }
  return rows.dump(2) + "\n";
}

void write_report(const SweepReport& report, const OutputConfig& output,
                  const std::optional<std::string>& path_override) {
  const std::string text = output.format == OutputConfig::Format::Json
                               ? to_json(report)
                               : to_csv(report);
  const std::string path = path_override.value_or(output.path);
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

}  // namespace harqbeck
