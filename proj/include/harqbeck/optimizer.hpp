#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "harqbeck/channel.hpp"
#include "harqbeck/outage.hpp"

namespace harqbeck {

// Maximize LTAT over per-round rates subject to the asymptotic outage
// constraint p_out,K <= epsilon, over the box [rate_lo, rate_hi]^K.
struct RateOptProblem {
  ChannelModel model;
  Eigen::VectorXd snr_linear;
  double epsilon = 1e-3;
  double rate_lo = 0.1;
  double rate_hi = 16.0;
  double tol_rate = 1e-6;
  double tol_ltat = 1e-6;
  int max_outer = 50;
  int max_dinkelbach = 30;

  int rounds() const { return model.rounds(); }
};

void check(const RateOptProblem& problem);  // throws std::invalid_argument

struct OuterIterate {
  Eigen::VectorXd rates;
  double ltat;
};

struct RateOptResult {
  Eigen::VectorXd rates;
  double ltat = 0.0;
  double outage = 0.0;  // raw asymptotic p_out,K at the solution
  bool feasible = false;
  int outer_iterations = 0;
  std::vector<OuterIterate> trace;
};

struct DinkelbachStep {
  double lambda;
  double residual;  // F(lambda) = N(R*) - lambda D(R*)
  double rate;
};

// Signals an instance with empty feasible set (p_out,K > epsilon even at
// the lowest admissible rate).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// LTAT objective at a rate vector, via the clamped asymptotic combiner.
double eval_ltat(const RateOptProblem& problem, const Eigen::VectorXd& rates);

// Raw asymptotic p_out,K at a rate vector (the constraint function).
double eval_outage(const RateOptProblem& problem, const Eigen::VectorXd& rates);

// Largest feasible R_j in [rate_lo, rate_hi] with the other coordinates
// fixed, by bisection (p_out,K is increasing in R_j).
double max_feasible_rate(const RateOptProblem& problem, Eigen::VectorXd rates,
                         int j);

// One coordinate update: maximize the LTAT ratio in R_j over the feasible
// interval by Dinkelbach iteration with golden-section inner solves.
double dinkelbach_subproblem(const RateOptProblem& problem,
                             Eigen::VectorXd rates, int j,
                             std::vector<DinkelbachStep>* steps = nullptr);

// Alternating rate selection: sweep the Dinkelbach subproblem over the
// coordinates until the LTAT improvement falls below tol_ltat. Warm-starts
// from the fixed-rate optimum unless an initial vector is given.
RateOptResult optimize_alternating(
    const RateOptProblem& problem,
    std::optional<Eigen::VectorXd> initial = std::nullopt);

// Exhaustive lattice baseline over [rate_lo, rate_hi]^K; K <= 4 only.
RateOptResult optimize_grid(const RateOptProblem& problem, double step);

// Conventional baseline: common rate R_1 = ... = R_K, 1-D golden-section.
RateOptResult optimize_fixed_rate(const RateOptProblem& problem);

}  // namespace harqbeck
