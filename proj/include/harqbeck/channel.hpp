#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace harqbeck {

using Complex = std::complex<double>;

// Thrown when the real covariance cannot be factorized within the jitter
// budget, or a density is requested for a singular model.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// K-round correlated non-circular complex Gaussian channel:
// h ~ mean + scattering, with covariance R = E[h~ h~^H] and relation
// (pseudo-covariance) C = E[h~ h~^T]. C = 0 gives circular (Rician /
// Rayleigh) statistics; nonzero C captures unequal I/Q moments.
struct ChannelModel {
  Eigen::VectorXcd mean;        // LOS component, E[h]
  Eigen::MatrixXcd covariance;  // R
  Eigen::MatrixXcd relation;    // C

  int rounds() const { return static_cast<int>(mean.size()); }

  // Sub-model of the first k rounds: leading k x k blocks, first k means.
  ChannelModel leading(int k) const;
};

// The 2K-dimensional real Gaussian equivalent of a ChannelModel:
// (Re h; Im h) ~ N(mean_real, cov_real).
struct RealGaussianForm {
  Eigen::VectorXd mean_real;
  Eigen::MatrixXd cov_real;   // V, symmetric PSD
  Eigen::MatrixXd factor;     // lower triangular, factor*factor^T ~ cov_real
  double jitter = 0.0;        // diagonal shift the factorization needed
};

struct ValidityCheck {
  std::string name;
  bool pass;
  std::string detail;
};

struct ValidityReport {
  std::vector<ValidityCheck> checks;
  bool ok() const;
  std::string summary() const;
};

ChannelModel build_exponential_model(int K, double rho,
                                     const Eigen::VectorXcd& mean);

ValidityReport validate(const ChannelModel& model);

// V = 1/2 [ Re(R+C)  Im(-R+C) ; Im(R+C)  Re(R-C) ].
Eigen::MatrixXd real_covariance(const ChannelModel& model);

RealGaussianForm real_form(const ChannelModel& model);

// Draws with global indices [i_begin, i_end) of stream (seed, stream),
// one column per draw. Identical indices give identical draws regardless
// of how the range is split.
Eigen::MatrixXcd sample_range(const ChannelModel& model, std::int64_t i_begin,
                              std::int64_t i_end, std::uint64_t seed,
                              std::uint64_t stream);

Eigen::MatrixXcd sample(const ChannelModel& model, std::int64_t n,
                        std::uint64_t seed, std::uint64_t stream);

// Log of the 2K-dimensional real Gaussian density at (Re h; Im h).
// Requires strictly positive definite V.
double log_density(const ChannelModel& model, const Eigen::VectorXcd& h);

// f_h(0), the leading constant of the asymptotic outage.
double density_at_zero(const ChannelModel& model);

}  // namespace harqbeck
