#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <memory>
#include <random>

#include "ckrr/errors.hpp"
#include "ckrr/features.hpp"
#include "ckrr/rng.hpp"

using namespace ckrr;

namespace {

Matrix random_points(int d, int n, std::uint64_t seed, double scale = 2.0) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  Matrix x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = unif(rng);
  }
  return x;
}

std::string temp_path(const char* name) {
  return std::string("ckrr_test_") + name;
}

}  // namespace

TEST_CASE("fourier_pairs evaluation") {
  SUBCASE("k_max=1 at x=0 gives (1, cos 0, sin 0)") {
    Matrix x(1, 1);
    x(0, 0) = 0.0;
    const Matrix f = feature_matrix(FeatureBasis(FourierPairsBasis{1}), x);
    REQUIRE(f.rows() == 3);
    CHECK(f(0, 0) == 1.0);
    CHECK(f(1, 0) == 1.0);
    CHECK(f(2, 0) == 0.0);
  }
  SUBCASE("k_max=0 gives the all-ones row") {
    const Matrix x = random_points(1, 7, 3);
    const Matrix f = feature_matrix(FeatureBasis(FourierPairsBasis{0}), x);
    REQUIRE(f.rows() == 1);
    CHECK((f.array() == 1.0).all());
  }
  SUBCASE("orthogonality under the uniform measure on [0, 2pi]") {
    // Monte-Carlo inner products between distinct basis functions vanish.
    const int n = 1000000;
    Rng rng = make_rng(99);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * 3.14159265358979324);
    Matrix x(n, 1);
    for (int i = 0; i < n; ++i) x(i, 0) = unif(rng);
    const Matrix f = feature_matrix(FeatureBasis(FourierPairsBasis{2}), x);
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) {
        // sd of one product term is at most ~sqrt(1/2); 1e6 samples put the
        // empirical mean's sd near 7e-4, so 3e-3 is a > 4-sigma band
        CHECK(std::abs(f.row(i).dot(f.row(j)) / n) < 3e-3);
      }
    }
  }
}

TEST_CASE("random feature evaluation") {
  RandomFeatureBasis b;
  b.activation = Activation::Cos;
  b.omega.resize(2, 1);
  b.omega << 1.3, -0.4;
  b.bias.resize(2);
  b.bias << 0.2, 1.1;
  Matrix x(1, 1);
  x(0, 0) = 0.77;
  const Matrix f = feature_matrix(FeatureBasis(b), x);
  CHECK(f(0, 0) == doctest::Approx(std::cos(1.3 * 0.77 + 0.2)).epsilon(1e-15));
  CHECK(f(1, 0) == doctest::Approx(std::cos(-0.4 * 0.77 + 1.1)).epsilon(1e-15));

  SUBCASE("cos at x=0 with zero bias is 1") {
    b.bias.setZero();
    Matrix zero(1, 1);
    zero(0, 0) = 0.0;
    CHECK(feature_matrix(FeatureBasis(b), zero)(0, 0) == 1.0);
  }
  SUBCASE("relu clamps negative pre-activations") {
    b.activation = Activation::Relu;
    b.omega.setConstant(1.0);
    b.bias.setConstant(-0.3 - 0.77);  // omega.x + b = -0.3
    CHECK(feature_matrix(FeatureBasis(b), x)(0, 0) == 0.0);
  }
}

TEST_CASE("cosine random features approximate the Gaussian kernel") {
  const int m = 100000;
  const FeatureBasis basis =
      sample_random_feature_basis(Activation::Cos, 3, m, 4242, false);
  Matrix xy(2, 3);
  xy.row(0) << 0.3, -0.5, 0.8;
  xy.row(1) << -0.2, 0.4, 0.1;
  const Matrix f = feature_matrix(basis, xy);
  Vector prods(m);
  for (int i = 0; i < m; ++i) prods(i) = f(i, 0) * f(i, 1);
  const double mean = prods.mean();
  const double sd = std::sqrt((prods.array() - mean).square().sum() / (m - 1));
  const double expected =
      0.5 * std::exp(-(xy.row(0) - xy.row(1)).squaredNorm() / 2.0);
  CHECK(std::abs(mean - expected) < 3.0 * sd / std::sqrt(double(m)));
}

TEST_CASE("nystrom eigenfunctions") {
  const KernelSpec spec{GaussianKernel{0.8}};
  const Matrix x = random_points(2, 60, 17);
  const int k = 12;
  const NystromFit fit = fit_nystrom(spec, x, k);
  const auto& b = std::get<NystromBasis>(fit.basis.data());
  REQUIRE(b.eigenvalues.size() == k);
  const double n = static_cast<double>(x.rows());

  SUBCASE("training-point values are sqrt(N) alpha") {
    const Matrix f = feature_matrix(fit.basis, x);
    for (int i = 0; i < k; ++i) {
      for (int l = 0; l < 60; ++l) {
        CHECK(f(i, l) == doctest::Approx(std::sqrt(n) * b.alpha(l, i)).epsilon(1e-8));
      }
    }
  }
  SUBCASE("empirical orthonormality") {
    const Matrix f = feature_matrix(fit.basis, x);
    const Matrix gramf = f * f.transpose() / n;
    CHECK((gramf - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("eigenvalues decrease and stay positive") {
    for (int i = 0; i + 1 < k; ++i) CHECK(b.eigenvalues[i] >= b.eigenvalues[i + 1]);
    CHECK(b.eigenvalues[k - 1] > 0.0);
  }
  SUBCASE("duplicate points lose rank and the fit reports it") {
    Matrix dup(8, 1);
    for (int i = 0; i < 8; ++i) dup(i, 0) = (i % 2 == 0) ? 0.1 : 1.7;
    const NystromFit low = fit_nystrom(spec, dup, 5);
    CHECK(low.retained == 2);
    CHECK(low.basis.dimension() == 2);
  }
}

TEST_CASE("gaussian field basis") {
  SUBCASE("single-term field is sqrt(lambda) xi phi") {
    auto sys = std::make_shared<EigenfunctionSystem>();
    sys->eigenvalues = Vector::Constant(1, 4.0);
    sys->phi = [](int, const Vector& x) { return std::cos(x[0]); };
    const FeatureBasis basis = sample_gaussian_field_basis(sys, 1, 1, 5);
    const double xi = std::get<GaussianFieldBasis>(basis.data()).xi(0, 0);
    const Matrix x = random_points(1, 6, 6);
    const Matrix f = feature_matrix(basis, x);
    for (int j = 0; j < 6; ++j) {
      CHECK(f(0, j) ==
            doctest::Approx(2.0 * xi * std::cos(x(j, 0))).epsilon(1e-14));
    }
  }
  SUBCASE("same seed reproduces feature matrices bit-exactly") {
    auto sys = std::make_shared<EigenfunctionSystem>(fourier_eigensystem(1.0, 20));
    const Matrix x = random_points(1, 10, 7);
    const FeatureBasis a = sample_gaussian_field_basis(sys, 3, 41, 123);
    const FeatureBasis b = sample_gaussian_field_basis(sys, 3, 41, 123);
    CHECK(feature_matrix(a, x) == feature_matrix(b, x));
  }
  SUBCASE("empirical covariance of many fields matches the truncated series") {
    const int fields = 2000;
    auto sys = std::make_shared<EigenfunctionSystem>(fourier_eigensystem(1.0, 10));
    const int J = static_cast<int>(sys->eigenvalues.size());
    const FeatureBasis basis = sample_gaussian_field_basis(sys, fields, J, 77);
    const Matrix probes = random_points(1, 10, 78, 3.0);
    const Matrix f = feature_matrix(basis, probes);
    for (int pair = 0; pair < 5; ++pair) {
      const int a = 2 * pair, b = 2 * pair + 1;
      Vector prods(fields);
      for (int i = 0; i < fields; ++i) prods(i) = f(i, a) * f(i, b);
      const double mean = prods.mean();
      const double var = (prods.array() - mean).square().sum() / (fields - 1);
      double expected = 0.0;
      for (int j = 0; j < J; ++j) {
        expected += sys->eigenvalues[j] *
                    sys->phi(j, probes.row(a).transpose()) *
                    sys->phi(j, probes.row(b).transpose());
      }
      CHECK(std::abs(mean - expected) < 5.0 * std::sqrt(var / fields));
    }
  }
}

TEST_CASE("determinism of sampled bases") {
  const Matrix x = random_points(3, 8, 9);
  for (auto act : {Activation::Cos, Activation::Relu, Activation::Tanh}) {
    const FeatureBasis a = sample_random_feature_basis(act, 3, 15, 31, true);
    const FeatureBasis b = sample_random_feature_basis(act, 3, 15, 31, true);
    CHECK(feature_matrix(a, x) == feature_matrix(b, x));
  }
}

TEST_CASE("relu unit import") {
  SUBCASE("single unit evaluates ReLU(w.x + b)") {
    const std::string path = temp_path("relu1.csv");
    {
      std::FILE* f = std::fopen(path.c_str(), "w");
      std::fputs("0, 1, 0\n", f);
      std::fclose(f);
    }
    const FeatureBasis basis = load_relu_units(path);
    REQUIRE(basis.dimension() == 1);
    Matrix x(1, 2);
    x << 3.0, 5.0;
    CHECK(feature_matrix(basis, x)(0, 0) == 3.0);
    std::remove(path.c_str());
  }
  SUBCASE("empty file gives a zero-dimensional basis") {
    const std::string path = temp_path("relu0.csv");
    std::fclose(std::fopen(path.c_str(), "w"));
    CHECK(load_relu_units(path).dimension() == 0);
    std::remove(path.c_str());
  }
  SUBCASE("write/load round-trip") {
    Rng rng = make_rng(55);
    std::normal_distribution<double> normal(0.0, 1.0);
    ReluUnitsBasis units;
    units.weights.resize(20, 4);
    units.bias.resize(20);
    for (int i = 0; i < 20; ++i) {
      units.bias[i] = normal(rng);
      for (int j = 0; j < 4; ++j) units.weights(i, j) = normal(rng);
    }
    const std::string path = temp_path("relu20.csv");
    save_relu_units(units, path);
    const FeatureBasis loaded = load_relu_units(path);
    const Matrix x = random_points(4, 9, 56);
    CHECK((feature_matrix(FeatureBasis(units), x) - feature_matrix(loaded, x))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    std::remove(path.c_str());
  }
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(parse_activation("gelu"), ConfigError);
  const Matrix x = random_points(2, 5, 61);
  CHECK_THROWS_AS(feature_matrix(FeatureBasis(FourierPairsBasis{2}), x),
                  DimensionMismatch);
  CHECK_THROWS_AS(fit_nystrom(KernelSpec{GaussianKernel{1.0}}, x, 9),
                  ConfigError);
}
