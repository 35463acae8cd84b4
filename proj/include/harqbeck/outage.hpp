#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "harqbeck/channel.hpp"

namespace harqbeck {

// Per-round transmission rates and transmit SNRs of one HARQ-IR session.
struct HarqConfig {
  Eigen::VectorXd rates;       // R_k, bits/s/Hz, all > 0
  Eigen::VectorXd snr_linear;  // gamma_k = P_k / N0, all > 0

  int rounds() const { return static_cast<int>(rates.size()); }
};

void check(const HarqConfig& config);  // throws std::invalid_argument

struct OutageEstimate {
  double value = 0.0;
  double stderr_ = 0.0;  // binomial standard error
  std::int64_t n = 0;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double best)
      : std::runtime_error(what), best_estimate(best) {}
  double best_estimate;
};

// Below this minimum pairwise relative rate gap the partial-fraction closed
// form of g is numerically catastrophic and the dispatcher switches to
// quadrature.
inline constexpr double kDeltaEq = 1e-6;

// min over pairs of |R_i - R_j| / max(R_i, R_j); +inf for a single rate.
double min_relative_gap(const Eigen::VectorXd& rates);

// Normalized accumulated mutual information after round k (1-based):
// sum_{j<=k} (1/R_j) log2(1 + gamma_j |h_j|^2). Outage at k iff < 1.
double accumulated_info(const HarqConfig& config, const Eigen::VectorXcd& h,
                        int k);

// Counts of outage events per round over draws [i_begin, i_end) of stream
// (seed, stream). counts[k-1] = #draws with accumulated_info(.,k) < 1.
std::vector<std::uint64_t> outage_counts(const ChannelModel& model,
                                         const HarqConfig& config,
                                         std::uint64_t seed,
                                         std::uint64_t stream,
                                         std::int64_t i_begin,
                                         std::int64_t i_end);

// Monte Carlo outage for every round from one coherent sample set of n
// full-K draws. Shards split the draw-index range; the pooled result is
// independent of the shard count.
std::vector<OutageEstimate> outage_mc_rounds(const ChannelModel& model,
                                             const HarqConfig& config,
                                             std::int64_t n,
                                             std::uint64_t seed,
                                             std::uint64_t stream,
                                             int shards = 1);

OutageEstimate outage_mc(const ChannelModel& model, const HarqConfig& config,
                         int k, std::int64_t n, std::uint64_t seed,
                         std::uint64_t stream, int shards = 1);

// Partial-fraction closed form of the g kernel, valid for pairwise-distinct
// rates: (-1)^K + sum_p 2^{R_p} / prod_{k!=p} (R_p - R_k)/R_k.
// Throws std::domain_error when min_relative_gap(rates) <= delta_eq.
double g_closed(const Eigen::VectorXd& rates, double delta_eq = kDeltaEq);

// det(A)/det(B) route to the same kernel (Vandermonde form); cross-check
// only, the partial-fraction sum is better conditioned.
double g_det_form(const Eigen::VectorXd& rates);

// g as the simplex integral (prod_k R_k ln2) * int_{u>=0, sum u<1}
// prod_k 2^{R_k u_k} du, by nested Gauss-Legendre with dyadic panel
// refinement until successive refinements agree to rel_tol.
double g_numeric(const Eigen::VectorXd& rates, double rel_tol);

// Dispatcher: closed form for well-separated rates, quadrature otherwise.
double g(const Eigen::VectorXd& rates, double delta_eq = kDeltaEq);

// High-SNR asymptote of the round-k outage probability:
// pi^k f_h(0) (prod_{j<=k} 1/gamma_j) g(R_1..R_k), on the leading-k
// sub-model. Raw value, deliberately not clamped to [0,1].
double outage_asymptotic(const ChannelModel& model, const HarqConfig& config,
                         int k);

// LTAT from per-round outage probabilities p[k-1] = p_out,k (p_out,0 = 1):
// (1 - p_out,K) / sum_k (1/R_k) p_out,k-1.
double ltat_from_outage(const Eigen::VectorXd& rates, const Eigen::VectorXd& p);

// LTAT with each asymptotic p_out,k clamped into [0,1] before combining.
double ltat_asymptotic(const ChannelModel& model, const HarqConfig& config);

double ltat_mc(const ChannelModel& model, const HarqConfig& config,
               std::int64_t n, std::uint64_t seed, std::uint64_t stream,
               int shards = 1);

}  // namespace harqbeck
