#include "harqbeck/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "harqbeck/optimizer.hpp"

namespace harqbeck {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

HarqConfig harq_at(const ExperimentConfig& config, double snr_db) {
  const int K = config.channel.rounds();
  Eigen::VectorXd rates =
      Eigen::Map<const Eigen::VectorXd>(config.rates.data(), K);
  return {rates, Eigen::VectorXd::Constant(K, db_to_linear(snr_db))};
}

std::string join_rates(const Eigen::VectorXd& rates) {
  std::ostringstream os;
  for (int i = 0; i < rates.size(); ++i) {
    if (i) os << ';';
    os << format_double(rates(i));
  }
  return os.str();
}

// Uniform rates in [0.5, 8] with pairwise absolute gaps > 0.05.
Eigen::VectorXd random_separated_rates(std::mt19937_64& rng, int K) {
  std::uniform_real_distribution<double> uniform(0.5, 8.0);
  Eigen::VectorXd rates(K);
  while (true) {
    for (int i = 0; i < K; ++i) rates(i) = uniform(rng);
    double gap = 1.0;
    for (int i = 0; i < K; ++i)
      for (int j = i + 1; j < K; ++j)
        gap = std::min(gap, std::abs(rates(i) - rates(j)));
    if (gap > 0.05) return rates;
  }
}

ChannelModel reference_model() {
  const Complex h(1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2);
  return build_exponential_model(2, 0.8,
                                 Eigen::VectorXcd::Constant(2, h));
}

SuiteResult suite_g_oracle(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst_numeric = 0.0, worst_det = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 2 + trial % 4;  // 2..5
    const Eigen::VectorXd rates = random_separated_rates(rng, K);
    const double closed = g_closed(rates);
    const double numeric = g_numeric(rates, 1e-8);
    worst_numeric =
        std::max(worst_numeric, std::abs(closed - numeric) / numeric);
    if (K <= 4) {
      const double det = g_det_form(rates);
      worst_det = std::max(worst_det, std::abs(closed - det) / closed);
    }
  }
  const bool pass = worst_numeric < 1e-6 && worst_det < 1e-9;
  std::ostringstream os;
  os << "max |closed-numeric|/numeric = " << worst_numeric
     << ", max |closed-det|/closed = " << worst_det;
  return {"g-oracle", pass, os.str()};
}

SuiteResult suite_symmetry(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 1);
  double worst_closed = 0.0, worst_numeric = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const int K = 2 + trial % 4;
    Eigen::VectorXd rates = random_separated_rates(rng, K);
    const double closed = g_closed(rates);
    const double numeric = g_numeric(rates, 1e-8);
    std::vector<int> perm(K);
    for (int i = 0; i < K; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::VectorXd shuffled(K);
    for (int i = 0; i < K; ++i) shuffled(i) = rates(perm[i]);
    worst_closed = std::max(
        worst_closed, std::abs(g_closed(shuffled) - closed) / closed);
    worst_numeric = std::max(
        worst_numeric, std::abs(g_numeric(shuffled, 1e-8) - numeric) / numeric);
  }
  const bool pass = worst_closed < 1e-12 && worst_numeric < 1e-7;
  std::ostringstream os;
  os << "max permutation drift: closed " << worst_closed << ", numeric "
     << worst_numeric;
  return {"symmetry", pass, os.str()};
}

SuiteResult suite_convexity(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 2);
  const double h = 1e-3;
  double min_first = std::numeric_limits<double>::infinity();
  double min_second = std::numeric_limits<double>::infinity();  // / g
  for (int trial = 0; trial < 100; ++trial) {
    const int K = 2 + trial % 3;  // 2..4
    const Eigen::VectorXd rates = random_separated_rates(rng, K);
    const double center = g(rates);
    for (int t = 0; t < K; ++t) {
      Eigen::VectorXd up = rates, down = rates;
      up(t) += h;
      down(t) -= h;
      const double g_up = g(up), g_down = g(down);
      min_first = std::min(min_first, (g_up - g_down) / (2.0 * h));
      min_second =
          std::min(min_second, (g_up - 2.0 * center + g_down) / center);
    }
  }
  const bool pass = min_first > 0.0 && min_second >= -1e-8;
  std::ostringstream os;
  os << "min first difference " << min_first
     << ", min normalized second difference " << min_second;
  return {"convexity", pass, os.str()};
}

SuiteResult suite_scaling() {
  const Complex h(1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2);
  const ChannelModel model =
      build_exponential_model(4, 0.8, Eigen::VectorXcd::Constant(4, h));
  Eigen::VectorXd rates(4);
  rates << 3.0, 5.0, 2.0, 7.0;
  Eigen::VectorXd snr(4);
  snr << 40.0, 55.0, 70.0, 120.0;
  double worst = 0.0;
  for (double alpha : {2.0, 10.0, 316.0}) {
    const HarqConfig base{rates, snr};
    const HarqConfig scaled{rates, (alpha * snr).eval()};
    for (int k = 1; k <= 4; ++k) {
      const double expected =
          outage_asymptotic(model, base, k) * std::pow(alpha, -k);
      const double actual = outage_asymptotic(model, scaled, k);
      worst = std::max(worst, std::abs(actual - expected) / expected);
    }
  }
  std::ostringstream os;
  os << "max relative scaling error " << worst;
  return {"scaling", worst < 1e-12, os.str()};
}

SuiteResult suite_sampler(std::uint64_t seed) {
  std::ostringstream os;
  bool pass = true;

  // Moment check: 1e6 draws from the correlated reference model must
  // reproduce mean, covariance and relation within 5 standard errors of
  // each entry's estimator.
  const ChannelModel model = reference_model();
  const std::int64_t n = 1'000'000;
  const Eigen::MatrixXcd draws = sample(model, n, seed, 0);
  const int K = model.rounds();

  double worst_z = 0.0;
  for (int i = 0; i < K; ++i) {
    const Eigen::VectorXd re = draws.row(i).real().transpose();
    const Eigen::VectorXd im = draws.row(i).imag().transpose();
    for (const auto& [values, target] :
         {std::pair{re, model.mean(i).real()},
          std::pair{im, model.mean(i).imag()}}) {
      const double mean = values.mean();
      const double sd = std::sqrt((values.array() - mean).square().sum() /
                                  (n - 1));
      worst_z = std::max(worst_z,
                         std::abs(mean - target) / (sd / std::sqrt(double(n))));
    }
  }
  Eigen::MatrixXcd centered = draws;
  for (int i = 0; i < K; ++i) centered.row(i).array() -= model.mean(i);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      const Eigen::VectorXcd prod_cov =
          (centered.row(i).array() * centered.row(j).array().conjugate())
              .matrix()
              .transpose();
      const Eigen::VectorXcd prod_rel =
          (centered.row(i).array() * centered.row(j).array())
              .matrix()
              .transpose();
      for (const auto& [prod, target] :
           {std::pair{prod_cov, model.covariance(i, j)},
            std::pair{prod_rel, model.relation(i, j)}}) {
        for (const auto& [values, part] :
             {std::pair{Eigen::VectorXd(prod.real()), target.real()},
              std::pair{Eigen::VectorXd(prod.imag()), target.imag()}}) {
          const double mean = values.mean();
          const double sd = std::sqrt(
              (values.array() - mean).square().sum() / (n - 1));
          const double se = std::max(sd / std::sqrt(double(n)), 1e-12);
          worst_z = std::max(worst_z, std::abs(mean - part) / se);
        }
      }
    }
  }
  if (worst_z >= 5.0) pass = false;
  os << "max moment z-score " << worst_z;

  // Normalization: a K=1 non-circular density integrates to 1 by
  // trapezoidal quadrature.
  ChannelModel single;
  single.mean = Eigen::VectorXcd::Constant(1, Complex(0.5, 0.5));
  single.covariance = Eigen::MatrixXcd::Constant(1, 1, 1.0);
  single.relation = Eigen::MatrixXcd::Constant(1, 1, Complex(0.3, 0.2));
  const Eigen::MatrixXd V = real_covariance(single);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
  const double sigma = std::sqrt(es.eigenvalues().maxCoeff());
  const int points = 801;
  const double lo_x = single.mean(0).real() - 8.0 * sigma;
  const double lo_y = single.mean(0).imag() - 8.0 * sigma;
  const double step = 16.0 * sigma / (points - 1);
  double integral = 0.0;
  for (int ix = 0; ix < points; ++ix) {
    const double wx = (ix == 0 || ix == points - 1) ? 0.5 : 1.0;
    for (int iy = 0; iy < points; ++iy) {
      const double wy = (iy == 0 || iy == points - 1) ? 0.5 : 1.0;
      const Eigen::VectorXcd h = Eigen::VectorXcd::Constant(
          1, Complex(lo_x + ix * step, lo_y + iy * step));
      integral += wx * wy * std::exp(log_density(single, h));
    }
  }
  integral *= step * step;
  if (std::abs(integral - 1.0) > 1e-3) pass = false;
  os << "; K=1 density integral " << integral;
  return {"sampler", pass, os.str()};
}

SuiteResult suite_continuity(double delta_eq) {
  Eigen::VectorXd near(2), equal(2);
  near << 3.0, 3.0 + 1e-12;
  equal << 3.0, 3.0;
  const double reference = g_numeric(equal, 1e-8);
  const double dispatched = g(near, delta_eq);
  const double drift = std::abs(dispatched - reference) / reference;
  std::ostringstream os;
  os << "relative drift across dispatch switch " << drift << " (delta_eq "
     << delta_eq << ")";
  return {"continuity", drift < 1e-6, os.str()};
}

}  // namespace

SweepReport cmd_outage(const ExperimentConfig& config,
                       const RunOptions& options) {
  if (!config.mc) throw ConfigError("mc: required by the outage command");
  if (config.rates.empty())
    throw ConfigError("harq.rates: required by the outage command");

  SweepReport report;
  report.columns = {"snr_db", "k",         "p_out_mc",
                    "p_out_mc_stderr", "p_out_asy", "runtime_ms"};
  for (double snr_db : config.snr_db) {
    const auto start = Clock::now();
    const HarqConfig harq = harq_at(config, snr_db);
    const auto estimates =
        outage_mc_rounds(config.channel, harq, config.mc->n, config.mc->seed,
                         0, options.streams);
    std::vector<double> asy(estimates.size());
    for (std::size_t k = 0; k < estimates.size(); ++k)
      asy[k] = outage_asymptotic(config.channel, harq,
                                 static_cast<int>(k) + 1);
    const double runtime = options.timing ? elapsed_ms(start) : 0.0;
    for (std::size_t k = 0; k < estimates.size(); ++k)
      report.rows.push_back({snr_db, static_cast<std::int64_t>(k + 1),
                             estimates[k].value, estimates[k].stderr_, asy[k],
                             runtime});
  }
  return report;
}

SweepReport cmd_ltat(const ExperimentConfig& config,
                     const RunOptions& options) {
  if (config.rates.empty())
    throw ConfigError("harq.rates: required by the ltat command");

  SweepReport report;
  report.columns = {"snr_db", "ltat_asy", "ltat_mc", "runtime_ms"};
  for (double snr_db : config.snr_db) {
    const auto start = Clock::now();
    const HarqConfig harq = harq_at(config, snr_db);
    const double asy = ltat_asymptotic(config.channel, harq);
    json mc_cell;
    if (config.mc)
      mc_cell = ltat_mc(config.channel, harq, config.mc->n, config.mc->seed,
                        0, options.streams);
    const double runtime = options.timing ? elapsed_ms(start) : 0.0;
    report.rows.push_back({snr_db, asy, mc_cell, runtime});
  }
  return report;
}

SweepReport cmd_optimize(const ExperimentConfig& config,
                         const RunOptions& options) {
  if (!config.optimize)
    throw ConfigError("optimize: required by the optimize command");
  if (config.snr_db.size() != 1)
    throw ConfigError(
        "harq.snr_db: the optimize command needs a single SNR point");

  const OptimizeConfig& opt = *config.optimize;
  const int K = config.channel.rounds();
  RateOptProblem problem;
  problem.model = config.channel;
  problem.snr_linear =
      Eigen::VectorXd::Constant(K, db_to_linear(config.snr_db[0]));
  problem.rate_lo = opt.rate_lo;
  problem.rate_hi = opt.rate_hi;
  problem.tol_rate = opt.tol_rate;
  problem.tol_ltat = opt.tol_ltat;
  problem.max_outer = opt.max_outer;
  problem.max_dinkelbach = opt.max_dinkelbach;

  SweepReport report;
  report.columns = {"epsilon",    "feasible",         "rates",
                    "ltat_variable", "ltat_fixed",    "outage",
                    "outer_iterations"};
  if (options.grid_check) report.columns.push_back("ltat_grid");
  report.columns.push_back("runtime_ms");

  for (double epsilon : opt.epsilons) {
    const auto start = Clock::now();
    problem.epsilon = epsilon;
    const RateOptResult fixed = optimize_fixed_rate(problem);
    const RateOptResult variable = optimize_alternating(problem);

    std::vector<json> row;
    row.push_back(epsilon);
    row.push_back(variable.feasible);
    if (variable.feasible) {
      row.push_back(join_rates(variable.rates));
      row.push_back(variable.ltat);
      row.push_back(fixed.feasible ? json(fixed.ltat) : json());
      row.push_back(variable.outage);
      row.push_back(static_cast<std::int64_t>(variable.outer_iterations));
    } else {
      row.insert(row.end(), {json(), json(), json(), json(), json()});
    }
    if (options.grid_check) {
      const RateOptResult grid = optimize_grid(problem, opt.grid_step);
      row.push_back(grid.feasible ? json(grid.ltat) : json());
    }
    row.push_back(options.timing ? elapsed_ms(start) : 0.0);
    report.rows.push_back(std::move(row));
  }
  return report;
}

bool SelftestReport::ok() const {
  for (const auto& suite : suites)
    if (!suite.pass) return false;
  return true;
}

SelftestReport cmd_selftest(const SelftestOptions& options) {
  const std::vector<std::string> known = {"g-oracle", "symmetry", "convexity",
                                          "scaling",  "sampler",  "continuity"};
  if (!options.suite.empty() &&
      std::find(known.begin(), known.end(), options.suite) == known.end())
    throw std::invalid_argument("selftest: unknown suite " + options.suite);

  auto wanted = [&](const char* name) {
    return options.suite.empty() || options.suite == name;
  };
  SelftestReport report;
  if (wanted("g-oracle")) report.suites.push_back(suite_g_oracle(options.seed));
  if (wanted("symmetry")) report.suites.push_back(suite_symmetry(options.seed));
  if (wanted("convexity"))
    report.suites.push_back(suite_convexity(options.seed));
  if (wanted("scaling")) report.suites.push_back(suite_scaling());
  if (wanted("sampler")) report.suites.push_back(suite_sampler(options.seed));
  if (wanted("continuity"))
    report.suites.push_back(suite_continuity(options.delta_eq));
  return report;
}

}  // namespace harqbeck
