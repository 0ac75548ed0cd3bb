#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "ckrr/cpd_solver.hpp"
#include "ckrr/errors.hpp"
#include "ckrr/rfrr.hpp"
#include "ckrr/rng.hpp"

using namespace ckrr;

namespace {

Matrix sphere_points(int d, int n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = normal(rng);
    x.row(i) /= x.row(i).norm();
  }
  return x;
}

Vector random_vector(int n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector y(n);
  for (int i = 0; i < n; ++i) y(i) = normal(rng);
  return y;
}

double rfrr_objective(const RfrrModel& m, const Matrix& X, const Vector& y) {
  const Vector fit = predict_rfrr(m, X);
  return (fit - y).squaredNorm() / y.size() + m.ridge * m.w.squaredNorm();
}

}  // namespace

TEST_CASE("k=0 RFRR equals KRR with the empirical-features kernel") {
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 20 + 3 * trial;
    const Matrix x = sphere_points(3, n, 10 + trial);
    const Vector y = random_vector(n, 20 + trial);
    const FeatureBasis psi =
        sample_random_feature_basis(Activation::Cos, 3, 40, 30 + trial, true);
    // Same draw without the 1/sqrt(m) feature scale: the kernel applies the
    // 1/m factor itself, so together they induce the identical Gram matrix.
    const auto psi_raw = std::make_shared<FeatureBasis>(
        sample_random_feature_basis(Activation::Cos, 3, 40, 30 + trial, false));
    const double lambda = 0.02;
    const RfrrModel rf = fit_rfrr(FeatureBasis{}, psi, x, y, lambda);
    const auto krr = fit(KernelSpec{EmpiricalFeaturesKernel{psi_raw}},
                         FeatureBasis{}, x, y, lambda);
    const Matrix z = sphere_points(3, 50, 40 + trial);
    CHECK((predict_rfrr(rf, z) - predict(krr, z)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("target inside the unpenalized span gives w = 0") {
  const Matrix x = sphere_points(3, 40, 51);
  const FeatureBasis phi =
      sample_random_feature_basis(Activation::Tanh, 3, 4, 52, false);
  const FeatureBasis psi =
      sample_random_feature_basis(Activation::Cos, 3, 200, 53, true);
  const Matrix a = feature_matrix(phi, x);
  Vector c(4);
  c << 1.0, -0.5, 0.25, 2.0;
  const Vector y = a.transpose() * c;
  const RfrrModel m = fit_rfrr(phi, psi, x, y, 0.1);
  CHECK(m.w.cwiseAbs().maxCoeff() < 1e-8);
  CHECK((m.u - c).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((predict_rfrr(m, x) - y).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("predict_rfrr") {
  const Matrix x = sphere_points(3, 15, 61);
  const FeatureBasis phi =
      sample_random_feature_basis(Activation::Relu, 3, 2, 62, false);
  const FeatureBasis psi =
      sample_random_feature_basis(Activation::Cos, 3, 30, 63, true);
  SUBCASE("zero coefficients give zeros") {
    RfrrModel m;
    m.unpenalized = phi;
    m.penalized = psi;
    m.u = Vector::Zero(2);
    m.w = Vector::Zero(30);
    m.ridge = 0.1;
    CHECK(predict_rfrr(m, x).isZero(0.0));
  }
  SUBCASE("independent re-evaluation path agrees") {
    const Vector y = random_vector(15, 64);
    const RfrrModel m = fit_rfrr(phi, psi, x, y, 0.05);
    const Matrix z = sphere_points(3, 25, 65);
    const Vector direct = feature_matrix(phi, z).transpose() * m.u +
                          feature_matrix(psi, z).transpose() * m.w;
    CHECK((predict_rfrr(m, z) - direct).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("returned coefficients are a stationary point of the objective") {
  const Matrix x = sphere_points(3, 25, 71);
  const Vector y = random_vector(25, 72);
  const FeatureBasis phi =
      sample_random_feature_basis(Activation::Tanh, 3, 3, 73, false);
  const FeatureBasis psi =
      sample_random_feature_basis(Activation::Cos, 3, 20, 74, true);
  RfrrModel m = fit_rfrr(phi, psi, x, y, 0.03);
  const double base = rfrr_objective(m, x, y);
  const double tol = 1e-6 * (1.0 + y.squaredNorm());
  for (int i = 0; i < m.u.size(); ++i) {
    const double h = 1e-5 * (1.0 + std::abs(m.u(i)));
    RfrrModel up = m, dn = m;
    up.u(i) += h;
    dn.u(i) -= h;
    CHECK(std::abs(rfrr_objective(up, x, y) - rfrr_objective(dn, x, y)) /
              (2.0 * h) < tol);
  }
  for (int i = 0; i < m.w.size(); i += 4) {
    const double h = 1e-5 * (1.0 + std::abs(m.w(i)));
    RfrrModel up = m, dn = m;
    up.w(i) += h;
    dn.w(i) -= h;
    CHECK(std::abs(rfrr_objective(up, x, y) - rfrr_objective(dn, x, y)) /
              (2.0 * h) < tol);
  }
  CHECK(base <= y.squaredNorm() / y.size() + 1e-12);
}

TEST_CASE("fit is linear in the targets") {
  const Matrix x = sphere_points(3, 30, 81);
  const FeatureBasis phi =
      sample_random_feature_basis(Activation::Cos, 3, 3, 82, false);
  const FeatureBasis psi =
      sample_random_feature_basis(Activation::Cos, 3, 60, 83, true);
  const Vector y1 = random_vector(30, 84);
  const Vector y2 = random_vector(30, 85);
  const Matrix z = sphere_points(3, 40, 86);
  const auto m1 = fit_rfrr(phi, psi, x, y1, 0.05);
  const auto m2 = fit_rfrr(phi, psi, x, y2, 0.05);
  const auto m12 = fit_rfrr(phi, psi, x, y1 + y2, 0.05);
  CHECK((predict_rfrr(m12, z) - predict_rfrr(m1, z) - predict_rfrr(m2, z))
            .cwiseAbs()
            .maxCoeff() < 1e-9);
}

TEST_CASE("more penalized features move RFRR toward exact conditional KRR") {
  // Exact kernel for cosine features with omega ~ N(0,I): (1/2)exp(-|x-y|^2/2).
  const int n = 80;
  const double lambda = 0.05;
  std::vector<double> dist500, dist4000;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = sphere_points(3, n, 900 + seed);
    const Matrix z = sphere_points(3, 200, 950 + seed);
    Vector y(n);
    for (int i = 0; i < n; ++i) y(i) = std::sin(x(i, 0)) + 0.5 * std::cos(x(i, 1));
    ReluUnitsBasis units;
    {
      Rng rng = make_rng(970 + seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      units.weights.resize(3, 3);
      units.bias.resize(3);
      for (int i = 0; i < 3; ++i) {
        // nonnegative bias keeps every unit active somewhere on the sphere
        units.bias[i] = std::abs(normal(rng));
        for (int j = 0; j < 3; ++j) units.weights(i, j) = normal(rng);
      }
    }
    const FeatureBasis phi(units);
    // The limit kernel is (1/2)exp(-|x-y|^2/2).  A kernel scaled by c with
    // ridge lambda yields the same predictions as the unscaled kernel with
    // ridge lambda/c, so the c=1/2 factor becomes a doubled ridge here.
    const auto exact = fit(KernelSpec{GaussianKernel{0.5}}, phi, x, y, 2.0 * lambda);
    const Vector exact_pred = predict(exact, z);
    for (int m : {500, 4000}) {
      const FeatureBasis psi = sample_random_feature_basis(
          Activation::Cos, 3, m, 1000 * (seed + 1) + m, true);
      const RfrrModel rf = fit_rfrr(phi, psi, x, y, lambda);
      (m == 500 ? dist500 : dist4000)
          .push_back((predict_rfrr(rf, z) - exact_pred).norm());
    }
  }
  std::sort(dist500.begin(), dist500.end());
  std::sort(dist4000.begin(), dist4000.end());
  CHECK(dist4000[5] < dist500[5]);
}

TEST_CASE("validation") {
  const Matrix x = sphere_points(3, 10, 91);
  const FeatureBasis psi =
      sample_random_feature_basis(Activation::Cos, 3, 5, 92, true);
  CHECK_THROWS_AS(fit_rfrr(FeatureBasis{}, psi, x, random_vector(10, 93), 0.0),
                  NonPositiveRidge);
  // duplicated unpenalized feature rows -> rank deficiency
  ReluUnitsBasis units;
  units.weights.resize(2, 3);
  units.weights.row(0) << 1.0, 0.0, 0.0;
  units.weights.row(1) << 1.0, 0.0, 0.0;
  units.bias.resize(2);
  units.bias << 5.0, 5.0;  // always-active identical units
  CHECK_THROWS_AS(
      fit_rfrr(FeatureBasis(units), psi, x, random_vector(10, 94), 0.1),
      RankDeficientFeatures);
}
