#include "harqbeck/channel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "harqbeck/rng.hpp"

namespace harqbeck {

namespace {

constexpr double kPsdTol = 1e-10;  // relative to the spectral norm of V
constexpr double kJitterLadder[] = {0.0, 1e-12, 1e-10, 1e-8};

}  // namespace

ChannelModel ChannelModel::leading(int k) const {
  if (k < 1 || k > rounds())
    throw std::invalid_argument("leading: round index out of range");
  return ChannelModel{mean.head(k), covariance.topLeftCorner(k, k),
                      relation.topLeftCorner(k, k)};
}

bool ValidityReport::ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string ValidityReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.pass ? "pass" : "FAIL") << " " << c.name;
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << "\n";
  }
  return os.str();
}

ChannelModel build_exponential_model(int K, double rho,
                                     const Eigen::VectorXcd& mean) {
  if (K < 1) throw std::invalid_argument("build_exponential_model: K < 1");
  if (mean.size() != K)
    throw std::invalid_argument(
        "build_exponential_model: mean length does not match K");
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::invalid_argument("build_exponential_model: rho not in [0,1)");

  ChannelModel model;
  model.mean = mean;
  model.covariance.resize(K, K);
  for (int m = 0; m < K; ++m)
    for (int n = 0; n < K; ++n)
      model.covariance(m, n) = std::pow(rho, std::abs(m - n));
  // Constant relation i*rho^K on every entry; rho = 0 degrades to the
  // circular (C = 0) case.
  const double c = rho == 0.0 ? 0.0 : std::pow(rho, K);
  model.relation = Complex(0.0, c) * Eigen::MatrixXcd::Ones(K, K);

  const ValidityReport report = validate(model);
  if (!report.ok())
    throw std::runtime_error("build_exponential_model: invalid model\n" +
                             report.summary());
  return model;
}

ValidityReport validate(const ChannelModel& model) {
  ValidityReport report;
  const int K = model.rounds();

  const bool dims_ok = K >= 1 && model.covariance.rows() == K &&
                       model.covariance.cols() == K &&
                       model.relation.rows() == K && model.relation.cols() == K;
  report.checks.push_back({"dimensions", dims_ok,
                           dims_ok ? "" : "mean/covariance/relation sizes"});
  if (!dims_ok) return report;

  const double r_scale = 1.0 + model.covariance.cwiseAbs().maxCoeff();
  const double herm_err =
      (model.covariance - model.covariance.adjoint()).cwiseAbs().maxCoeff();
  report.checks.push_back({"covariance_hermitian", herm_err <= 1e-12 * r_scale,
                           "max asymmetry " + std::to_string(herm_err)});

  double min_diag = model.covariance.real().diagonal().minCoeff();
  report.checks.push_back(
      {"covariance_positive_diagonal", min_diag > 0.0,
       "min diagonal " + std::to_string(min_diag)});

  const double c_scale = 1.0 + model.relation.cwiseAbs().maxCoeff();
  const double sym_err =
      (model.relation - model.relation.transpose()).cwiseAbs().maxCoeff();
  report.checks.push_back({"relation_symmetric", sym_err <= 1e-12 * c_scale,
                           "max asymmetry " + std::to_string(sym_err)});

  const Eigen::MatrixXd V = real_covariance(model);
  const double v_sym =
      (V - V.transpose()).cwiseAbs().maxCoeff();
  report.checks.push_back({"real_covariance_symmetric", v_sym <= 1e-12,
                           "max asymmetry " + std::to_string(v_sym)});

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  const bool psd = lo >= -kPsdTol * std::max(hi, 1.0);
  report.checks.push_back(
      {"real_covariance_psd", psd,
       "most negative eigenvalue " + std::to_string(lo)});
  return report;
}

Eigen::MatrixXd real_covariance(const ChannelModel& model) {
  const int K = model.rounds();
  const Eigen::MatrixXcd sum = model.covariance + model.relation;
  const Eigen::MatrixXcd diff = model.covariance - model.relation;
  Eigen::MatrixXd V(2 * K, 2 * K);
  V.topLeftCorner(K, K) = sum.real();
  V.topRightCorner(K, K) = (-model.covariance + model.relation).imag();
  V.bottomLeftCorner(K, K) = sum.imag();
  V.bottomRightCorner(K, K) = diff.real();
  return 0.5 * V;
}

RealGaussianForm real_form(const ChannelModel& model) {
  const ValidityReport report = validate(model);
  if (!report.ok())
    throw std::invalid_argument("real_form: invalid model\n" +
                                report.summary());
  const int K = model.rounds();
  RealGaussianForm form;
  form.mean_real.resize(2 * K);
  form.mean_real << model.mean.real(), model.mean.imag();
  form.cov_real = real_covariance(model);

  // Eigen's LLT can "succeed" on an exactly singular matrix with a zero
  // pivot; require strictly positive pivots before accepting a jitter level.
  const int d = 2 * K;
  const double pivot_floor =
      std::sqrt(1e-14 * std::max(form.cov_real.diagonal().maxCoeff(), 1e-300));
  for (double jitter : kJitterLadder) {
    Eigen::MatrixXd shifted =
        form.cov_real + jitter * Eigen::MatrixXd::Identity(d, d);
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success &&
        Eigen::MatrixXd(llt.matrixL()).diagonal().minCoeff() > pivot_floor) {
      form.factor = llt.matrixL();
      form.jitter = jitter;
      return form;
    }
  }
  throw FactorizationError(
      "real_form: covariance indefinite beyond jitter budget");
}

Eigen::MatrixXcd sample_range(const ChannelModel& model, std::int64_t i_begin,
                              std::int64_t i_end, std::uint64_t seed,
                              std::uint64_t stream) {
  if (i_begin < 0 || i_end < i_begin)
    throw std::invalid_argument("sample_range: bad index range");
  const RealGaussianForm form = real_form(model);
  const int K = model.rounds();
  const std::int64_t n = i_end - i_begin;
  const CounterRng rng(seed, stream);

  Eigen::MatrixXcd out(K, n);
  Eigen::VectorXd z(2 * K), x(2 * K);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint64_t draw = static_cast<std::uint64_t>(i_begin + i);
    for (int p = 0; p < K; ++p)
      rng.normal_pair(draw * K + p, z(2 * p), z(2 * p + 1));
    x = form.mean_real + form.factor * z;
    for (int j = 0; j < K; ++j) out(j, i) = Complex(x(j), x(K + j));
  }
  return out;
}

Eigen::MatrixXcd sample(const ChannelModel& model, std::int64_t n,
                        std::uint64_t seed, std::uint64_t stream) {
  if (n < 1) throw std::invalid_argument("sample: n < 1");
  return sample_range(model, 0, n, seed, stream);
}

double log_density(const ChannelModel& model, const Eigen::VectorXcd& h) {
  const int K = model.rounds();
  if (h.size() != K)
    throw std::invalid_argument("log_density: point dimension mismatch");
  const Eigen::MatrixXd V = real_covariance(model);
  Eigen::LLT<Eigen::MatrixXd> llt(V);
  const Eigen::MatrixXd L = llt.matrixL();
  const double pivot_floor =
      std::sqrt(1e-14 * std::max(V.diagonal().maxCoeff(), 1e-300));
  if (llt.info() != Eigen::Success || L.diagonal().minCoeff() <= pivot_floor)
    throw FactorizationError("log_density: V is not strictly positive definite");

  Eigen::VectorXd r(2 * K);
  r << (h - model.mean).real(), (h - model.mean).imag();
  const Eigen::VectorXd y = L.triangularView<Eigen::Lower>().solve(r);
  const double log_det = 2.0 * L.diagonal().array().log().sum();
  return -K * std::log(2.0 * std::numbers::pi) - 0.5 * log_det -
         0.5 * y.squaredNorm();
}

double density_at_zero(const ChannelModel& model) {
  return std::exp(
      log_density(model, Eigen::VectorXcd::Zero(model.rounds())));
}

}  // namespace harqbeck
