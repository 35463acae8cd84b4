#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "harqbeck/channel.hpp"

using namespace harqbeck;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

namespace {

const Complex kLos(1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2);

ChannelModel explicit_model(const VectorXcd& mean, const MatrixXcd& R,
                            const MatrixXcd& C) {
  return ChannelModel{mean, R, C};
}

// Random Hermitian positive definite matrix.
MatrixXcd random_hpd(std::mt19937_64& rng, int K) {
  std::normal_distribution<double> normal;
  MatrixXcd a(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  return a * a.adjoint() + 0.1 * MatrixXcd::Identity(K, K);
}

}  // namespace

TEST_CASE("exponential model: rho = 0 is the circular Rayleigh case") {
  const auto model = build_exponential_model(1, 0.0, VectorXcd::Zero(1));
  CHECK(model.covariance(0, 0) == Complex(1.0, 0.0));
  CHECK(model.relation(0, 0) == Complex(0.0, 0.0));
  CHECK(validate(model).ok());
}

TEST_CASE("exponential model: K=2 rho=0.8 reference entries") {
  const auto model =
      build_exponential_model(2, 0.8, VectorXcd::Constant(2, kLos));
  CHECK(model.covariance(0, 1).real() == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(model.covariance(1, 0).real() == doctest::Approx(0.8).epsilon(1e-15));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(model.relation(i, j).real() == 0.0);
      CHECK(model.relation(i, j).imag() ==
            doctest::Approx(0.64).epsilon(1e-15));
    }
}

TEST_CASE("exponential model: K=3 rho=0.5 real covariance is PSD") {
  const auto model = build_exponential_model(3, 0.5, VectorXcd::Zero(3));
  CHECK(model.covariance(0, 2).real() == doctest::Approx(0.25));
  CHECK(model.relation(1, 2).imag() == doctest::Approx(0.125));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(real_covariance(model),
                                             Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("exponential model rejects bad arguments") {
  CHECK_THROWS_AS(build_exponential_model(2, 0.8, VectorXcd::Zero(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_exponential_model(2, 1.0, VectorXcd::Zero(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_exponential_model(0, 0.5, VectorXcd::Zero(0)),
                  std::invalid_argument);
}

TEST_CASE("validate flags constructed violations") {
  auto model = build_exponential_model(2, 0.8, VectorXcd::Zero(2));
  SUBCASE("asymmetric relation") {
    model.relation(0, 1) += Complex(0.1, 0.0);
    const auto report = validate(model);
    CHECK_FALSE(report.ok());
    bool found = false;
    for (const auto& c : report.checks)
      if (c.name == "relation_symmetric" && !c.pass) found = true;
    CHECK(found);
  }
  SUBCASE("zero covariance diagonal") {
    model.covariance.setZero();
    const auto report = validate(model);
    CHECK_FALSE(report.ok());
    bool found = false;
    for (const auto& c : report.checks)
      if (c.name == "covariance_positive_diagonal" && !c.pass) found = true;
    CHECK(found);
  }
}

TEST_CASE("real_form: circular K=1 gives V = I/2") {
  const auto model = build_exponential_model(1, 0.0, VectorXcd::Zero(1));
  const auto form = real_form(model);
  CHECK((form.cov_real - 0.5 * MatrixXd::Identity(2, 2)).norm() < 1e-15);
  CHECK(form.jitter == 0.0);
}

TEST_CASE("real_form: maximally non-circular K=1 takes the jitter path") {
  const auto model = explicit_model(VectorXcd::Zero(1),
                                    MatrixXcd::Constant(1, 1, 1.0),
                                    MatrixXcd::Constant(1, 1, Complex(0, 1)));
  const auto form = real_form(model);
  MatrixXd expected(2, 2);
  expected << 0.5, 0.5, 0.5, 0.5;
  CHECK((form.cov_real - expected).norm() < 1e-15);
  CHECK(form.jitter > 0.0);
  const double err =
      (form.factor * form.factor.transpose() - form.cov_real)
          .cwiseAbs()
          .maxCoeff();
  CHECK(err <= form.jitter + 1e-12 * form.cov_real.cwiseAbs().maxCoeff());
}

TEST_CASE("real_form: K=2 rho=0.8 has PSD V with trace K") {
  const auto model =
      build_exponential_model(2, 0.8, VectorXcd::Constant(2, kLos));
  const auto form = real_form(model);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(form.cov_real,
                                             Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK(form.cov_real.trace() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("real_form round-trip reconstructs R and C from the V blocks") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int K = 1 + trial % 4;
    // scale the relation down so V stays PSD
    const MatrixXcd R = random_hpd(rng, K);
    MatrixXcd C = 0.05 * random_hpd(rng, K);
    C = ((C + C.transpose()) / 2.0).eval();
    const ChannelModel model = explicit_model(VectorXcd::Zero(K), R, C);
    if (!validate(model).ok()) continue;
    const MatrixXd V = real_covariance(model);
    const MatrixXd W = 2.0 * V;
    const MatrixXcd R_back =
        (W.topLeftCorner(K, K) + W.bottomRightCorner(K, K)) / 2.0 +
        Complex(0, 1) *
            (W.bottomLeftCorner(K, K) - W.topRightCorner(K, K)) / 2.0;
    const MatrixXcd C_back =
        (W.topLeftCorner(K, K) - W.bottomRightCorner(K, K)) / 2.0 +
        Complex(0, 1) *
            (W.bottomLeftCorner(K, K) + W.topRightCorner(K, K)) / 2.0;
    CHECK((R_back - R).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((C_back - C).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("log_density: circular unit cases equal log(1/pi)") {
  const auto rayleigh = build_exponential_model(1, 0.0, VectorXcd::Zero(1));
  CHECK(log_density(rayleigh, VectorXcd::Zero(1)) ==
        doctest::Approx(std::log(1.0 / std::numbers::pi)).epsilon(1e-14));

  const auto rician =
      build_exponential_model(1, 0.0, VectorXcd::Constant(1, kLos));
  CHECK(log_density(rician, rician.mean) ==
        doctest::Approx(std::log(1.0 / std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("log_density matches the circular complex Gaussian form for C=0") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    const int K = 1 + trial % 4;
    const MatrixXcd R = random_hpd(rng, K);
    VectorXcd mean(K), h(K);
    for (int i = 0; i < K; ++i) {
      mean(i) = Complex(normal(rng), normal(rng));
      h(i) = Complex(normal(rng), normal(rng));
    }
    const ChannelModel model =
        explicit_model(mean, R, MatrixXcd::Zero(K, K));
    const VectorXcd d = h - mean;
    const double expected = -K * std::log(std::numbers::pi) -
                            std::log(R.determinant().real()) -
                            (d.adjoint() * R.inverse() * d)(0).real();
    CHECK(log_density(model, h) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("density_at_zero analytic values") {
  const auto rayleigh = build_exponential_model(1, 0.0, VectorXcd::Zero(1));
  CHECK(density_at_zero(rayleigh) ==
        doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));

  const auto rician =
      build_exponential_model(1, 0.0, VectorXcd::Constant(1, Complex(1, 0)));
  CHECK(density_at_zero(rician) ==
        doctest::Approx(std::exp(-1.0) / std::numbers::pi).epsilon(1e-14));

  const auto beckmann =
      build_exponential_model(2, 0.8, VectorXcd::Constant(2, kLos));
  const double v = density_at_zero(beckmann);
  CHECK(v > 0.0);
  CHECK(v == std::exp(log_density(beckmann, VectorXcd::Zero(2))));
}

TEST_CASE("log_density rejects singular models") {
  const auto singular = explicit_model(
      VectorXcd::Zero(1), MatrixXcd::Constant(1, 1, 1.0),
      MatrixXcd::Constant(1, 1, Complex(0, 1)));
  CHECK_THROWS_AS(log_density(singular, VectorXcd::Zero(1)),
                  FactorizationError);
  CHECK_THROWS_AS(density_at_zero(singular), FactorizationError);
}

TEST_CASE("sample: deterministic by (seed, stream), streams differ") {
  const auto model =
      build_exponential_model(2, 0.8, VectorXcd::Constant(2, kLos));
  const auto a = sample(model, 64, 7, 0);
  const auto b = sample(model, 64, 7, 0);
  const auto c = sample(model, 64, 7, 1);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("sample: range splits reproduce the full run") {
  const auto model = build_exponential_model(2, 0.5, VectorXcd::Zero(2));
  const auto whole = sample(model, 100, 3, 2);
  const auto head = sample_range(model, 0, 40, 3, 2);
  const auto tail = sample_range(model, 40, 100, 3, 2);
  CHECK((whole.leftCols(40) - head).cwiseAbs().maxCoeff() == 0.0);
  CHECK((whole.rightCols(60) - tail).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sample: empirical moments of 1e6 draws") {
  const std::int64_t n = 1'000'000;
  SUBCASE("zero-mean circular case") {
    const auto model = build_exponential_model(1, 0.0, VectorXcd::Zero(1));
    const auto draws = sample(model, n, 5, 0);
    CHECK(std::abs(draws.mean()) < 4e-3);
  }
  SUBCASE("correlated Beckmann case: covariance and relation") {
    const auto model =
        build_exponential_model(2, 0.8, VectorXcd::Constant(2, kLos));
    MatrixXcd centered = sample(model, n, 6, 0);
    for (int i = 0; i < 2; ++i) centered.row(i).array() -= kLos;
    const MatrixXcd cov = centered * centered.adjoint() / double(n);
    const MatrixXcd rel = centered * centered.transpose() / double(n);
    CHECK((cov - model.covariance).cwiseAbs().maxCoeff() < 0.01);
    CHECK((rel - model.relation).cwiseAbs().maxCoeff() < 0.01);
  }
}
