#include "harqbeck/config.hpp"

#include <fstream>
#include <set>

namespace harqbeck {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void reject_unknown_keys(const json& j, const std::string& path,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) fail(path + "." + key, "unknown key");
}

const json& require(const json& j, const std::string& path,
                    const std::string& key) {
  if (!j.contains(key)) fail(path + "." + key, "missing");
  return j.at(key);
}

double require_number(const json& j, const std::string& path,
                      const std::string& key) {
  const json& v = require(j, path, key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

Complex parse_complex(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number())
    fail(path, "expected [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

Eigen::VectorXcd parse_complex_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array");
  Eigen::VectorXcd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out(i) = parse_complex(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

Eigen::MatrixXcd parse_complex_matrix(const json& v, const std::string& path,
                                      int K) {
  if (!v.is_array() || static_cast<int>(v.size()) != K)
    fail(path, "expected " + std::to_string(K) + " rows");
  Eigen::MatrixXcd out(K, K);
  for (int r = 0; r < K; ++r) {
    const json& row = v[r];
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != K)
      fail(row_path, "expected " + std::to_string(K) + " entries");
    for (int c = 0; c < K; ++c)
      out(r, c) =
          parse_complex(row[c], row_path + "[" + std::to_string(c) + "]");
  }
  return out;
}

std::vector<double> parse_positive_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(path, "expected numbers");
    out.push_back(v[i].get<double>());
  }
  return out;
}

ChannelModel parse_channel(const json& j) {
  const std::string path = "channel";
  if (!j.is_object()) fail(path, "expected an object");
  const json& kind_v = require(j, path, "kind");
  if (!kind_v.is_string()) fail(path + ".kind", "expected a string");
  const std::string kind = kind_v.get<std::string>();

  ChannelModel model;
  if (kind == "exponential") {
    reject_unknown_keys(j, path, {"kind", "K", "rho", "mean"});
    const double K_raw = require_number(j, path, "K");
    const int K = static_cast<int>(K_raw);
    if (K < 1 || K != K_raw) fail(path + ".K", "expected a positive integer");
    const double rho = require_number(j, path, "rho");
    if (!(rho >= 0.0 && rho < 1.0)) fail(path + ".rho", "expected rho in [0,1)");
    const Eigen::VectorXcd mean =
        parse_complex_vector(require(j, path, "mean"), path + ".mean");
    if (mean.size() != K) fail(path + ".mean", "length must equal K");
    try {
      model = build_exponential_model(K, rho, mean);
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
  } else if (kind == "explicit") {
    reject_unknown_keys(j, path, {"kind", "K", "mean", "covariance",
                                  "relation"});
    model.mean = parse_complex_vector(require(j, path, "mean"), path + ".mean");
    const int K = static_cast<int>(model.mean.size());
    if (j.contains("K") && j.at("K").get<double>() != K)
      fail(path + ".K", "inconsistent with mean length");
    model.covariance = parse_complex_matrix(require(j, path, "covariance"),
                                            path + ".covariance", K);
    model.relation = parse_complex_matrix(require(j, path, "relation"),
                                          path + ".relation", K);
    const ValidityReport report = validate(model);
    if (!report.ok()) fail(path, "invalid model\n" + report.summary());
  } else {
    fail(path + ".kind", "expected \"exponential\" or \"explicit\"");
  }
  return model;
}

McConfig parse_mc(const json& j) {
  const std::string path = "mc";
  if (!j.is_object()) fail(path, "expected an object");
  reject_unknown_keys(j, path, {"n", "seed"});
  McConfig mc;
  const double n = require_number(j, path, "n");
  if (n < 1 || n != std::floor(n)) fail(path + ".n", "expected an integer >= 1");
  mc.n = static_cast<std::int64_t>(n);
  const json& seed = require(j, path, "seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer())
    fail(path + ".seed", "expected an integer");
  mc.seed = seed.get<std::uint64_t>();
  return mc;
}

OptimizeConfig parse_optimize(const json& j) {
  const std::string path = "optimize";
  if (!j.is_object()) fail(path, "expected an object");
  reject_unknown_keys(j, path, {"epsilon", "rate_bounds", "tolerances",
                                "max_outer", "max_dinkelbach", "grid_step"});
  OptimizeConfig opt;
  const json& eps = require(j, path, "epsilon");
  if (eps.is_number()) {
    opt.epsilons = {eps.get<double>()};
  } else if (eps.is_array() && !eps.empty()) {
    opt.epsilons = parse_positive_list(eps, path + ".epsilon");
  } else {
    fail(path + ".epsilon", "expected a number or a non-empty array");
  }
  for (double e : opt.epsilons)
    if (!(e > 0.0 && e < 1.0)) fail(path + ".epsilon", "values must be in (0,1)");

  if (j.contains("rate_bounds")) {
    const json& b = j.at("rate_bounds");
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() ||
        !b[1].is_number())
      fail(path + ".rate_bounds", "expected [lo, hi]");
    opt.rate_lo = b[0].get<double>();
    opt.rate_hi = b[1].get<double>();
    if (!(opt.rate_lo > 0.0 && opt.rate_lo < opt.rate_hi))
      fail(path + ".rate_bounds", "need 0 < lo < hi");
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) fail(path + ".tolerances", "expected an object");
    reject_unknown_keys(t, path + ".tolerances", {"rate", "ltat"});
    if (t.contains("rate")) opt.tol_rate = t.at("rate").get<double>();
    if (t.contains("ltat")) opt.tol_ltat = t.at("ltat").get<double>();
    if (!(opt.tol_rate > 0.0 && opt.tol_ltat > 0.0))
      fail(path + ".tolerances", "values must be > 0");
  }
  if (j.contains("max_outer")) opt.max_outer = j.at("max_outer").get<int>();
  if (j.contains("max_dinkelbach"))
    opt.max_dinkelbach = j.at("max_dinkelbach").get<int>();
  if (opt.max_outer < 1 || opt.max_dinkelbach < 1)
    fail(path, "iteration caps must be >= 1");
  if (j.contains("grid_step")) {
    opt.grid_step = j.at("grid_step").get<double>();
    if (!(opt.grid_step > 0.0)) fail(path + ".grid_step", "must be > 0");
  }
  return opt;
}

OutputConfig parse_output(const json& j) {
  const std::string path = "output";
  if (!j.is_object()) fail(path, "expected an object");
  reject_unknown_keys(j, path, {"format", "path"});
  OutputConfig out;
  if (j.contains("format")) {
    const std::string format = j.at("format").get<std::string>();
    if (format == "csv")
      out.format = OutputConfig::Format::Csv;
    else if (format == "json")
      out.format = OutputConfig::Format::Json;
    else
      fail(path + ".format", "expected \"csv\" or \"json\"");
  }
  if (j.contains("path")) out.path = j.at("path").get<std::string>();
  return out;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) fail("config", "expected a JSON object");
  reject_unknown_keys(j, "config",
                      {"channel", "harq", "mc", "optimize", "output"});

  ExperimentConfig config;
  config.channel = parse_channel(require(j, "config", "channel"));
  const int K = config.channel.rounds();

  const json& harq = require(j, "config", "harq");
  if (!harq.is_object()) fail("harq", "expected an object");
  reject_unknown_keys(harq, "harq", {"rates", "snr_db"});
  if (harq.contains("rates")) {
    config.rates = parse_positive_list(harq.at("rates"), "harq.rates");
    if (static_cast<int>(config.rates.size()) != K)
      fail("harq.rates", "length must equal K");
    for (double r : config.rates)
      if (!(r > 0.0)) fail("harq.rates", "rates must be > 0");
  }
  const json& snr = require(harq, "harq", "snr_db");
  if (snr.is_number()) {
    config.snr_db = {snr.get<double>()};
  } else if (snr.is_array() && !snr.empty()) {
    for (const auto& v : snr) {
      if (!v.is_number()) fail("harq.snr_db", "expected numbers");
      config.snr_db.push_back(v.get<double>());
    }
    for (std::size_t i = 1; i < config.snr_db.size(); ++i)
      if (!(config.snr_db[i] > config.snr_db[i - 1]))
        fail("harq.snr_db", "sweep must be strictly increasing");
  } else {
    fail("harq.snr_db", "expected a number or a non-empty array");
  }

  if (j.contains("mc")) config.mc = parse_mc(j.at("mc"));
  if (j.contains("optimize")) config.optimize = parse_optimize(j.at("optimize"));
  if (j.contains("output")) config.output = parse_output(j.at("output"));
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace harqbeck
