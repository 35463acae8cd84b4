#include "harqbeck/outage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "harqbeck/rng.hpp"

namespace harqbeck {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// 12-point Gauss-Legendre rule mapped to [0, 1].
constexpr int kGlOrder = 12;
constexpr double kGlAbscissa[kGlOrder / 2] = {
    0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
    0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
constexpr double kGlWeight[kGlOrder / 2] = {
    0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
    0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

struct GlRule {
  double node[kGlOrder];
  double weight[kGlOrder];
};

GlRule make_unit_rule() {
  GlRule r;
  for (int i = 0; i < kGlOrder / 2; ++i) {
    r.node[2 * i] = 0.5 * (1.0 - kGlAbscissa[i]);
    r.node[2 * i + 1] = 0.5 * (1.0 + kGlAbscissa[i]);
    r.weight[2 * i] = 0.5 * kGlWeight[i];
    r.weight[2 * i + 1] = 0.5 * kGlWeight[i];
  }
  return r;
}

const GlRule kUnitRule = make_unit_rule();

// Nested integral of prod_k exp(a_k u_k) over the simplex
// {u >= 0, sum u < budget}, with `panels` equal panels per level.
double simplex_nest(const Eigen::VectorXd& a, int level, double budget,
                    int panels) {
  if (level == a.size()) return 1.0;
  if (budget <= 0.0) return 0.0;
  const double width = budget / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = p * width;
    for (int q = 0; q < kGlOrder; ++q) {
      const double u = lo + width * kUnitRule.node[q];
      total += width * kUnitRule.weight[q] * std::exp(a(level) * u) *
               simplex_nest(a, level + 1, budget - u, panels);
    }
  }
  return total;
}

void check_rates_positive(const Eigen::VectorXd& rates, const char* who) {
  if (rates.size() < 1)
    throw std::invalid_argument(std::string(who) + ": empty rate vector");
  if ((rates.array() <= 0.0).any())
    throw std::invalid_argument(std::string(who) + ": rates must be > 0");
}

}  // namespace

void check(const HarqConfig& config) {
  if (config.rates.size() < 1)
    throw std::invalid_argument("HarqConfig: no rounds");
  if (config.snr_linear.size() != config.rates.size())
    throw std::invalid_argument("HarqConfig: rates/snr length mismatch");
  if ((config.rates.array() <= 0.0).any())
    throw std::invalid_argument("HarqConfig: rates must be > 0");
  if ((config.snr_linear.array() <= 0.0).any())
    throw std::invalid_argument("HarqConfig: SNRs must be > 0");
}

double min_relative_gap(const Eigen::VectorXd& rates) {
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < rates.size(); ++i)
    for (int j = i + 1; j < rates.size(); ++j)
      gap = std::min(gap, std::abs(rates(i) - rates(j)) /
                              std::max(rates(i), rates(j)));
  return gap;
}

double accumulated_info(const HarqConfig& config, const Eigen::VectorXcd& h,
                        int k) {
  if (k < 1 || k > config.rounds())
    throw std::invalid_argument("accumulated_info: round index out of range");
  double total = 0.0;
  for (int j = 0; j < k; ++j)
    total += std::log2(1.0 + config.snr_linear(j) * std::norm(h(j))) /
             config.rates(j);
  return total;
}

std::vector<std::uint64_t> outage_counts(const ChannelModel& model,
                                         const HarqConfig& config,
                                         std::uint64_t seed,
                                         std::uint64_t stream,
                                         std::int64_t i_begin,
                                         std::int64_t i_end) {
  const int K = model.rounds();
  if (config.rounds() != K)
    throw std::invalid_argument("outage_counts: config/model round mismatch");
  const RealGaussianForm form = real_form(model);
  const CounterRng rng(seed, stream);

  std::vector<std::uint64_t> below(K, 0);
  Eigen::VectorXd z(2 * K), x(2 * K);
  for (std::int64_t i = i_begin; i < i_end; ++i) {
    const std::uint64_t draw = static_cast<std::uint64_t>(i);
    for (int p = 0; p < K; ++p)
      rng.normal_pair(draw * K + p, z(2 * p), z(2 * p + 1));
    x = form.mean_real + form.factor * z;
    double info = 0.0;
    for (int k = 0; k < K; ++k) {
      const double mag2 = x(k) * x(k) + x(K + k) * x(K + k);
      info += std::log2(1.0 + config.snr_linear(k) * mag2) / config.rates(k);
      if (info < 1.0) ++below[k];
    }
  }
  return below;
}

std::vector<OutageEstimate> outage_mc_rounds(const ChannelModel& model,
                                             const HarqConfig& config,
                                             std::int64_t n,
                                             std::uint64_t seed,
                                             std::uint64_t stream,
                                             int shards) {
  if (n < 1) throw std::invalid_argument("outage_mc: n < 1");
  if (shards < 1) throw std::invalid_argument("outage_mc: shards < 1");
  const int K = model.rounds();

  std::vector<std::vector<std::uint64_t>> partial(shards);
  std::vector<std::thread> workers;
  workers.reserve(shards);
  for (int s = 0; s < shards; ++s) {
    const std::int64_t lo = n * s / shards;
    const std::int64_t hi = n * (s + 1) / shards;
    workers.emplace_back([&, s, lo, hi] {
      partial[s] = outage_counts(model, config, seed, stream, lo, hi);
    });
  }
  for (auto& w : workers) w.join();

  std::vector<OutageEstimate> estimates(K);
  for (int k = 0; k < K; ++k) {
    std::uint64_t below = 0;
    for (const auto& counts : partial) below += counts[k];
    const double value = static_cast<double>(below) / static_cast<double>(n);
    estimates[k] = {value, std::sqrt(value * (1.0 - value) / n), n};
  }
  return estimates;
}

OutageEstimate outage_mc(const ChannelModel& model, const HarqConfig& config,
                         int k, std::int64_t n, std::uint64_t seed,
                         std::uint64_t stream, int shards) {
  if (k < 1 || k > model.rounds())
    throw std::invalid_argument("outage_mc: round index out of range");
  return outage_mc_rounds(model, config, n, seed, stream, shards)[k - 1];
}

double g_closed(const Eigen::VectorXd& rates, double delta_eq) {
  check_rates_positive(rates, "g_closed");
  if (!(min_relative_gap(rates) > delta_eq))
    throw std::domain_error(
        "g_closed: near-equal rates, use g_numeric instead");
  const int K = static_cast<int>(rates.size());
  double total = (K % 2 == 0) ? 1.0 : -1.0;
  for (int p = 0; p < K; ++p) {
    double denom = 1.0;
    for (int k = 0; k < K; ++k)
      if (k != p) denom *= (rates(p) - rates(k)) / rates(k);
    total += std::exp2(rates(p)) / denom;
  }
  return total;
}

double g_det_form(const Eigen::VectorXd& rates) {
  check_rates_positive(rates, "g_det_form");
  const int K = static_cast<int>(rates.size());
  Eigen::MatrixXd a(K, K), b(K, K);
  for (int r = 0; r < K; ++r) {
    double power = 1.0;
    for (int c = 0; c < K - 1; ++c) {
      b(r, c) = power;
      power *= rates(r);
      a(r, c) = power;
    }
    b(r, K - 1) = power;
    a(r, K - 1) = std::exp2(rates(r));
  }
  const double sign = (K % 2 == 0) ? 1.0 : -1.0;
  return sign + a.partialPivLu().determinant() / b.partialPivLu().determinant();
}

double g_numeric(const Eigen::VectorXd& rates, double rel_tol) {
  check_rates_positive(rates, "g_numeric");
  if (!(rel_tol > 0.0 && rel_tol <= 1e-2))
    throw std::invalid_argument("g_numeric: rel_tol not in (0, 1e-2]");

  const Eigen::VectorXd a = rates * kLn2;
  const double scale = a.prod();
  double previous = std::numeric_limits<double>::quiet_NaN();
  constexpr int kMaxDepth = 12;
  for (int depth = 0; depth <= kMaxDepth; ++depth) {
    const double current = scale * simplex_nest(a, 0, 1.0, 1 << depth);
    if (depth > 0 &&
        std::abs(current - previous) < rel_tol * std::abs(current))
      return current;
    previous = current;
  }
  throw QuadratureError("g_numeric: no convergence at max refinement depth",
                        previous);
}

double g(const Eigen::VectorXd& rates, double delta_eq) {
  check_rates_positive(rates, "g");
  if (min_relative_gap(rates) > delta_eq) return g_closed(rates, delta_eq);
  return g_numeric(rates, 1e-8);
}

double outage_asymptotic(const ChannelModel& model, const HarqConfig& config,
                         int k) {
  if (k < 1 || k > model.rounds())
    throw std::invalid_argument("outage_asymptotic: round index out of range");
  if (config.rounds() != model.rounds())
    throw std::invalid_argument(
        "outage_asymptotic: config/model round mismatch");
  const double f0 = density_at_zero(model.leading(k));
  double value = std::pow(std::numbers::pi, k) * f0 *
                 g(config.rates.head(k));
  for (int j = 0; j < k; ++j) value /= config.snr_linear(j);
  return value;
}

double ltat_from_outage(const Eigen::VectorXd& rates,
                        const Eigen::VectorXd& p) {
  const int K = static_cast<int>(rates.size());
  if (p.size() != K)
    throw std::invalid_argument("ltat_from_outage: length mismatch");
  double denom = 1.0 / rates(0);  // p_out,0 = 1
  for (int k = 1; k < K; ++k) denom += p(k - 1) / rates(k);
  return (1.0 - p(K - 1)) / denom;
}

double ltat_asymptotic(const ChannelModel& model, const HarqConfig& config) {
  const int K = model.rounds();
  Eigen::VectorXd p(K);
  for (int k = 1; k <= K; ++k)
    p(k - 1) = std::clamp(outage_asymptotic(model, config, k), 0.0, 1.0);
  return ltat_from_outage(config.rates, p);
}

double ltat_mc(const ChannelModel& model, const HarqConfig& config,
               std::int64_t n, std::uint64_t seed, std::uint64_t stream,
               int shards) {
  const auto estimates = outage_mc_rounds(model, config, n, seed, stream,
                                          shards);
  Eigen::VectorXd p(model.rounds());
  for (int k = 0; k < model.rounds(); ++k) p(k) = estimates[k].value;
  return ltat_from_outage(config.rates, p);
}

}  // namespace harqbeck
