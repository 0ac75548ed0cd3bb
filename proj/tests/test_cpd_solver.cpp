#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>

#include "ckrr/cpd_solver.hpp"
#include "ckrr/errors.hpp"
#include "ckrr/rng.hpp"

using namespace ckrr;

namespace {

Matrix random_points(int d, int n, std::uint64_t seed, double scale = 3.0) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  Matrix x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = unif(rng);
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

double objective(const ConditionalKrrModel& m, const Matrix& G, const Matrix& F,
                 const Vector& y) {
  Vector fit = G * m.alpha;
  if (F.rows() > 0) fit += F.transpose() * m.beta;
  const double n = static_cast<double>(y.size());
  return (fit - y).squaredNorm() / n + m.ridge * m.alpha.dot(G * m.alpha);
}

}  // namespace

TEST_CASE("projection_matrix") {
  SUBCASE("k=0 gives the zero matrix") {
    const Projection p = projection_matrix(Matrix(0, 5));
    CHECK(p.rank == 0);
    CHECK(p.pi.isZero(0.0));
    CHECK(p.pi.rows() == 5);
  }
  SUBCASE("row of ones projects onto (1,1)") {
    const Projection p = projection_matrix(Matrix::Ones(1, 2));
    CHECK(p.rank == 1);
    CHECK(p.pi(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p.pi(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p.pi(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("idempotence and F-invariance for random full-rank F") {
    Matrix f(3, 10);
    Rng rng = make_rng(8);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 10; ++j) f(i, j) = normal(rng);
    const Projection p = projection_matrix(f);
    CHECK(p.rank == 3);
    CHECK((p.pi * p.pi - p.pi).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((p.pi * f.transpose() - f.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("rank-deficient F is rejected") {
    Matrix f(2, 6);
    f.row(0) = random_vector(6, 12).transpose();
    f.row(1) = 2.0 * f.row(0);
    CHECK_THROWS_AS(projection_matrix(f), RankDeficientFeatures);
  }
}

TEST_CASE("residual_gram") {
  const Matrix x = random_points(1, 12, 21);
  const Matrix g = gram(KernelSpec{FourierSeriesKernel{1.0, 30}}, x);
  SUBCASE("zero projection leaves G unchanged") {
    CHECK(residual_gram(g, Matrix::Zero(12, 12)) == g);
  }
  SUBCASE("kernel spanned by F collapses to zero") {
    const Vector f = random_vector(12, 22);
    const Matrix rank_one = f * f.transpose();
    const Projection p = projection_matrix(f.transpose());
    CHECK(residual_gram(rank_one, p.pi).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("stays PSD under random projections") {
    const Matrix f = random_points(4, 12, 23).transpose();
    const Projection p = projection_matrix(f);
    const Matrix kt = residual_gram(g, p.pi);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(kt);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * g.trace());
    // annihilates the row space of F
    CHECK((kt * f.transpose()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("fit: k=0 diagonal case") {
  // gamma large enough that the off-diagonal entry underflows to exactly 0.
  Matrix x(2, 1);
  x << 0.0, 10.0;
  const KernelSpec spec{GaussianKernel{10000.0}};
  REQUIRE(gram(spec, x) == Matrix::Identity(2, 2));
  Vector y(2);
  y << 3.0, 6.0;
  const auto model = fit(spec, FeatureBasis{}, x, y, 1.0);
  CHECK(model.alpha(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(model.alpha(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(model.beta.size() == 0);
}

TEST_CASE("fit: target inside span(F) is interpolated by beta alone") {
  const Matrix x = random_points(1, 25, 31, 3.1);
  const FeatureBasis basis(FourierPairsBasis{2});
  const Matrix f = feature_matrix(basis, x);
  Vector c(5);
  c << 0.5, -1.0, 2.0, 0.3, 1.1;
  const Vector y = f.transpose() * c;
  const auto model = fit(KernelSpec{FourierSeriesKernel{1.0, 40}}, basis, x, y, 0.05);
  CHECK(model.alpha.cwiseAbs().maxCoeff() < 1e-8);
  CHECK((model.beta - c).cwiseAbs().maxCoeff() < 1e-7);
  CHECK((predict(model, x) - y).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("two-stage fit agrees with the KKT oracle") {
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 20 + (trial % 5) * 8;
    const int k = trial % 4;
    KernelSpec spec;
    Matrix x;
    FeatureBasis basis;
    if (trial % 3 == 0) {
      spec = FourierSeriesKernel{1.0, 40};
      x = random_points(1, n, 100 + trial, 3.1);
      if (k > 0) basis = FeatureBasis(FourierPairsBasis{k});
    } else {
      spec = (trial % 3 == 1) ? KernelSpec{GaussianKernel{0.6}}
                              : KernelSpec{LaplaceKernel{0.5}};
      x = random_points(3, n, 100 + trial, 1.5);
      if (k > 0) {
        basis = sample_random_feature_basis(Activation::Tanh, 3, k, 200 + trial,
                                            false);
      }
    }
    const Vector y = random_vector(n, 300 + trial);
    const double lambda = 0.01 * (1 + trial % 3);
    const auto fast = fit(spec, basis, x, y, lambda);
    const auto oracle = fit_direct_oracle(spec, basis, x, y, lambda);
    const Matrix z = (x.cols() == 1) ? random_points(1, 100, 400 + trial, 3.1)
                                     : random_points(3, 100, 400 + trial, 1.5);
    const Vector pa = predict(fast, z);
    const Vector pb = predict(oracle, z);
    const double scale = std::max(pa.cwiseAbs().maxCoeff(), pb.cwiseAbs().maxCoeff());
    CHECK((pa - pb).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, scale));
    // CPD representer constraint
    const Matrix f = feature_matrix(basis, x);
    if (f.rows() > 0) {
      CHECK((f * fast.alpha).norm() <=
            1e-8 * std::max(1e-30, f.norm() * fast.alpha.norm()));
    }
    ++checked;
  }
  CHECK(checked == 12);
}

TEST_CASE("oracle sanity") {
  const Matrix x = random_points(1, 15, 41, 3.0);
  const KernelSpec spec{FourierSeriesKernel{1.0, 30}};
  SUBCASE("k=0 agrees with closed-form KRR") {
    const Vector y = random_vector(15, 42);
    const auto oracle = fit_direct_oracle(spec, FeatureBasis{}, x, y, 0.1);
    const Matrix g = gram(spec, x);
    const Vector closed =
        (g + 0.1 * 15.0 * Matrix::Identity(15, 15)).llt().solve(y);
    CHECK((oracle.alpha - closed).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("zero targets give a zero model") {
    const FeatureBasis basis(FourierPairsBasis{1});
    const auto oracle =
        fit_direct_oracle(spec, basis, x, Vector::Zero(15), 0.1);
    CHECK(oracle.alpha.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(oracle.beta.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("k=0 fit equals closed-form standard KRR") {
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 10 + trial;
    const Matrix x = random_points(2, n, 500 + trial, 1.2);
    const KernelSpec spec{Matern32Kernel{0.9}};
    const Vector y = random_vector(n, 600 + trial);
    const double lambda = 0.05;
    const auto model = fit(spec, FeatureBasis{}, x, y, lambda);
    const Matrix g = gram(spec, x);
    const Vector closed =
        (g + lambda * n * Matrix::Identity(n, n)).llt().solve(y);
    CHECK((model.alpha - closed).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("predict basics") {
  const Matrix x = random_points(1, 10, 51, 3.0);
  const KernelSpec spec{FourierSeriesKernel{1.0, 20}};
  const FeatureBasis basis(FourierPairsBasis{1});
  SUBCASE("zero coefficients give zero predictions") {
    ConditionalKrrModel m;
    m.kernel = spec;
    m.basis = basis;
    m.train_inputs = x;
    m.alpha = Vector::Zero(10);
    m.beta = Vector::Zero(3);
    m.ridge = 0.1;
    CHECK(predict(m, random_points(1, 6, 52)).isZero(0.0));
  }
  SUBCASE("fit map is linear in the targets") {
    const Vector y1 = random_vector(10, 53);
    const Vector y2 = random_vector(10, 54);
    const Matrix z = random_points(1, 30, 55, 3.0);
    const auto m1 = fit(spec, basis, x, y1, 0.02);
    const auto m2 = fit(spec, basis, x, y2, 0.02);
    const auto m12 = fit(spec, basis, x, y1 + y2, 0.02);
    CHECK((predict(m12, z) - predict(m1, z) - predict(m2, z))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("objective is no worse than pure linear regression on F") {
  const Matrix x = random_points(1, 30, 61, 3.1);
  const KernelSpec spec{FourierSeriesKernel{1.0, 50}};
  const FeatureBasis basis(FourierPairsBasis{2});
  const Vector y = random_vector(30, 62);
  const auto model = fit(spec, basis, x, y, 0.03);
  const Matrix g = gram(spec, x);
  const Matrix f = feature_matrix(basis, x);
  ConditionalKrrModel linear = model;
  linear.alpha = Vector::Zero(30);
  linear.beta =
      (f * f.transpose()).ldlt().solve(f * y);  // least squares on F only
  CHECK(objective(model, g, f, y) <= objective(linear, g, f, y) + 1e-12);
  CHECK(model.report.objective_value ==
        doctest::Approx(objective(model, g, f, y)).epsilon(1e-10));
}

TEST_CASE("parameter validation") {
  const Matrix x = random_points(1, 5, 71);
  const KernelSpec spec{FourierSeriesKernel{1.0, 10}};
  CHECK_THROWS_AS(fit(spec, FeatureBasis{}, x, random_vector(5, 72), 0.0),
                  NonPositiveRidge);
  CHECK_THROWS_AS(fit(spec, FeatureBasis{}, x, random_vector(5, 72), -1.0),
                  NonPositiveRidge);
}

TEST_CASE("model serialization round-trip") {
  const Matrix x = random_points(1, 18, 81, 3.0);
  const KernelSpec spec{FourierSeriesKernel{0.75, 25}};
  const FeatureBasis basis(FourierPairsBasis{2});
  const Vector y = random_vector(18, 82);
  const auto model = fit(spec, basis, x, y, 0.04);
  const std::string path = "ckrr_test_model.txt";
  save_model(model, path);
  const auto loaded = load_model(path);
  const Matrix z = random_points(1, 40, 83, 3.0);
  CHECK((predict(model, z) - predict(loaded, z)).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}
