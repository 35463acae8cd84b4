#include "harqbeck/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace harqbeck {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

// Golden-section maximizer for a unimodal function on [a, b].
template <typename F>
double golden_section_max(F&& f, double a, double b, double tol) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    }
  }
  return 0.5 * (a + b);
}

// Golden-section with a coarse-scan unimodality guard. Concavity of the
// subproblem objective is taken from the analysis but numerical noise near
// the closed/numeric g dispatch boundary could break it; when the scan
// beats the golden-section result, fall back to a dense grid.
template <typename F>
double maximize_1d(F&& f, double a, double b, double tol) {
  if (b - a <= tol) return 0.5 * (a + b);
  double best_x = golden_section_max(f, a, b, tol);
  double best_f = f(best_x);

  constexpr int kScan = 17;
  double scan_x = best_x, scan_f = best_f;
  for (int i = 0; i <= kScan; ++i) {
    const double x = a + (b - a) * i / kScan;
    const double fx = f(x);
    if (fx > scan_f) {
      scan_f = fx;
      scan_x = x;
    }
  }
  if (scan_f > best_f + 1e-9 * (1.0 + std::abs(best_f))) {
    const double step = std::sqrt(tol) * (b - a);
    for (double x = a; x <= b; x += step) {
      const double fx = f(x);
      if (fx > scan_f) {
        scan_f = fx;
        scan_x = x;
      }
    }
    best_x = golden_section_max(f, std::max(a, scan_x - step),
                                std::min(b, scan_x + step), tol);
  }
  return best_x;
}

// Numerator/denominator of the per-coordinate LTAT ratio, scaled by R_j:
// N = R_j (1 - p_K), D = R_j sum_k p_{k-1}/R_k, with asymptotic
// probabilities clamped into [0,1].
struct RatioParts {
  double numerator;
  double denominator;
};

RatioParts ratio_parts(const RateOptProblem& problem,
                       const Eigen::VectorXd& rates, int j) {
  const int K = problem.rounds();
  const HarqConfig config{rates, problem.snr_linear};
  double denom = 1.0 / rates(0);
  double p_k = 0.0;
  for (int k = 1; k <= K; ++k) {
    p_k = std::clamp(outage_asymptotic(problem.model, config, k), 0.0, 1.0);
    if (k < K) denom += p_k / rates(k);
  }
  return {rates(j) * (1.0 - p_k), rates(j) * denom};
}

}  // namespace

void check(const RateOptProblem& problem) {
  if (problem.rounds() < 1)
    throw std::invalid_argument("RateOptProblem: no rounds");
  if (problem.snr_linear.size() != problem.rounds())
    throw std::invalid_argument("RateOptProblem: snr length mismatch");
  if ((problem.snr_linear.array() <= 0.0).any())
    throw std::invalid_argument("RateOptProblem: SNRs must be > 0");
  if (!(problem.epsilon > 0.0 && problem.epsilon < 1.0))
    throw std::invalid_argument("RateOptProblem: epsilon not in (0,1)");
  if (!(problem.rate_lo > 0.0 && problem.rate_lo < problem.rate_hi))
    throw std::invalid_argument("RateOptProblem: rate bounds not ordered");
  if (!(problem.tol_rate > 0.0 && problem.tol_ltat > 0.0))
    throw std::invalid_argument("RateOptProblem: tolerances must be > 0");
  if (problem.max_outer < 1 || problem.max_dinkelbach < 1)
    throw std::invalid_argument("RateOptProblem: iteration caps must be >= 1");
}

double eval_ltat(const RateOptProblem& problem, const Eigen::VectorXd& rates) {
  return ltat_asymptotic(problem.model, {rates, problem.snr_linear});
}

double eval_outage(const RateOptProblem& problem,
                   const Eigen::VectorXd& rates) {
  return outage_asymptotic(problem.model, {rates, problem.snr_linear},
                           problem.rounds());
}

double max_feasible_rate(const RateOptProblem& problem, Eigen::VectorXd rates,
                         int j) {
  auto p_at = [&](double rate) {
    rates(j) = rate;
    return eval_outage(problem, rates);
  };
  if (p_at(problem.rate_lo) > problem.epsilon)
    throw InfeasibleError("max_feasible_rate: infeasible at the lower bound");
  if (p_at(problem.rate_hi) <= problem.epsilon) return problem.rate_hi;

  double lo = problem.rate_lo;  // feasible
  double hi = problem.rate_hi;  // infeasible
  while (hi - lo > problem.tol_rate) {
    const double mid = 0.5 * (lo + hi);
    (p_at(mid) <= problem.epsilon ? lo : hi) = mid;
  }
  return lo;
}

double dinkelbach_subproblem(const RateOptProblem& problem,
                             Eigen::VectorXd rates, int j,
                             std::vector<DinkelbachStep>* steps) {
  const double r_feas = max_feasible_rate(problem, rates, j);
  const double lo = problem.rate_lo;
  if (r_feas - lo <= problem.tol_rate) return r_feas;

  auto parts_at = [&](double rate) {
    rates(j) = rate;
    return ratio_parts(problem, rates, j);
  };
  const RatioParts mid = parts_at(0.5 * (lo + r_feas));
  double lambda = mid.numerator / mid.denominator;

  double best = r_feas;
  for (int it = 0; it < problem.max_dinkelbach; ++it) {
    auto objective = [&](double rate) {
      const RatioParts p = parts_at(rate);
      return p.numerator - lambda * p.denominator;
    };
    best = maximize_1d(objective, lo, r_feas, problem.tol_rate);
    // A vanishing outage makes the objective flat in this coordinate; break
    // the tie toward the largest feasible rate.
    const double at_best = objective(best);
    if (objective(r_feas) >= at_best - 1e-12 * (1.0 + std::abs(at_best)))
      best = r_feas;
    const RatioParts p = parts_at(best);
    const double residual = p.numerator - lambda * p.denominator;
    if (steps) steps->push_back({lambda, residual, best});
    if (std::abs(residual) < problem.tol_ltat * p.denominator) break;
    lambda = p.numerator / p.denominator;
  }
  return best;
}

namespace {

// One run of the alternating (block-coordinate Dinkelbach) ascent from a
// feasible starting point.
RateOptResult ascend(const RateOptProblem& problem, Eigen::VectorXd rates) {
  const int K = problem.rounds();
  RateOptResult result;
  if (eval_outage(problem, rates) > problem.epsilon * (1.0 + 1e-9)) {
    result.rates = rates;
    result.feasible = false;
    return result;
  }

  double ltat = eval_ltat(problem, rates);
  result.trace.push_back({rates, ltat});
  int outer = 0;
  try {
    for (; outer < problem.max_outer; ++outer) {
      for (int j = 0; j < K; ++j)
        rates(j) = dinkelbach_subproblem(problem, rates, j);
      const double improved = eval_ltat(problem, rates);
      result.trace.push_back({rates, improved});
      const double gain = improved - ltat;
      ltat = std::max(ltat, improved);
      if (gain < problem.tol_ltat) {
        ++outer;
        break;
      }
    }
  } catch (const InfeasibleError&) {
    result.rates = rates;
    result.feasible = false;
    return result;
  }

  result.rates = rates;
  result.ltat = ltat;
  result.outage = eval_outage(problem, rates);
  result.feasible = result.outage <= problem.epsilon * (1.0 + 1e-9);
  result.outer_iterations = outer;
  return result;
}

}  // namespace

RateOptResult optimize_alternating(const RateOptProblem& problem,
                                   std::optional<Eigen::VectorXd> initial) {
  check(problem);
  const int K = problem.rounds();

  if (initial) {
    if (initial->size() != K)
      throw std::invalid_argument("optimize_alternating: bad initial size");
    return ascend(problem, *initial);
  }

  const RateOptResult warm = optimize_fixed_rate(problem);
  if (!warm.feasible) return warm;
  RateOptResult best = ascend(problem, warm.rates);
  if (K == 1) return best;

  // When the outage constraint is active and the LTAT is increasing in every
  // rate, every feasible boundary point is a fixed point of the coordinate
  // sweep, so the start decides the answer. Add a second start: a geometric
  // rate profile f * c^{-(j - (K-1)/2)}, scaled back to feasibility, with the
  // tilt c chosen by a 1-D search of the LTAT along that family.
  const double f = warm.rates(0);
  auto tilt_start = [&](double log_c) {
    Eigen::VectorXd s(K);
    for (int j = 0; j < K; ++j)
      s(j) = std::clamp(f * std::exp(-log_c * (j - 0.5 * (K - 1))),
                        problem.rate_lo, problem.rate_hi);
    auto scaled = [&](double t) {
      return (problem.rate_lo + t * (s.array() - problem.rate_lo))
          .matrix()
          .eval();
    };
    if (eval_outage(problem, s) > problem.epsilon) {
      double lo_t = 0.0, hi_t = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo_t + hi_t);
        (eval_outage(problem, scaled(mid)) <= problem.epsilon ? lo_t : hi_t) =
            mid;
      }
      s = scaled(lo_t);
    }
    return s;
  };
  const double best_log_c = maximize_1d(
      [&](double log_c) { return eval_ltat(problem, tilt_start(log_c)); },
      -1.0, 1.0, problem.tol_rate);
  const RateOptResult tilted = ascend(problem, tilt_start(best_log_c));
  return tilted.feasible && tilted.ltat > best.ltat ? tilted : best;
}

RateOptResult optimize_grid(const RateOptProblem& problem, double step) {
  check(problem);
  const int K = problem.rounds();
  if (K > 4)
    throw std::invalid_argument("optimize_grid: refused for K > 4");
  if (!(step > 0.0)) throw std::invalid_argument("optimize_grid: step <= 0");

  std::vector<double> values;
  for (double v = problem.rate_lo; v <= problem.rate_hi + 1e-12 * step;
       v += step)
    values.push_back(std::min(v, problem.rate_hi));
  if (values.back() < problem.rate_hi - 1e-12 * step)
    values.push_back(problem.rate_hi);
  const int points = static_cast<int>(values.size());
  Eigen::VectorXd rates(K);
  std::vector<int> index(K, 0);

  RateOptResult result;
  result.ltat = -std::numeric_limits<double>::infinity();
  bool done = false;
  while (!done) {
    for (int j = 0; j < K; ++j) rates(j) = values[index[j]];
    const double outage = eval_outage(problem, rates);
    if (outage <= problem.epsilon) {
      const double ltat = eval_ltat(problem, rates);
      // ">=" so that ties resolve to the lexicographically largest rates
      // (the scan advances in increasing lexicographic order).
      if (ltat >= result.ltat) {
        result.ltat = ltat;
        result.rates = rates;
        result.outage = outage;
        result.feasible = true;
      }
    }
    // lexicographic advance
    int j = K - 1;
    while (j >= 0 && ++index[j] == points) index[j--] = 0;
    done = j < 0;
  }
  if (result.feasible) {
    result.trace.push_back({result.rates, result.ltat});
    result.outer_iterations = 1;
  } else {
    result.rates = Eigen::VectorXd::Constant(K, problem.rate_lo);
    result.ltat = 0.0;
  }
  return result;
}

RateOptResult optimize_fixed_rate(const RateOptProblem& problem) {
  check(problem);
  const int K = problem.rounds();
  auto equal_rates = [K](double rate) {
    return Eigen::VectorXd::Constant(K, rate).eval();
  };
  auto p_at = [&](double rate) {
    return eval_outage(problem, equal_rates(rate));
  };

  RateOptResult result;
  if (p_at(problem.rate_lo) > problem.epsilon) {
    result.rates = equal_rates(problem.rate_lo);
    result.feasible = false;
    return result;
  }
  double r_feas = problem.rate_hi;
  if (p_at(problem.rate_hi) > problem.epsilon) {
    double lo = problem.rate_lo, hi = problem.rate_hi;
    while (hi - lo > problem.tol_rate) {
      const double mid = 0.5 * (lo + hi);
      (p_at(mid) <= problem.epsilon ? lo : hi) = mid;
    }
    r_feas = lo;
  }

  const double best = maximize_1d(
      [&](double rate) { return eval_ltat(problem, equal_rates(rate)); },
      problem.rate_lo, r_feas, problem.tol_rate);
  result.rates = equal_rates(best);
  result.ltat = eval_ltat(problem, result.rates);
  result.outage = eval_outage(problem, result.rates);
  result.feasible = result.outage <= problem.epsilon * (1.0 + 1e-9);
  result.outer_iterations = 1;
  result.trace.push_back({result.rates, result.ltat});
  return result;
}

}  // namespace harqbeck
