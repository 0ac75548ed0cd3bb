#include "ckrr/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "ckrr/errors.hpp"
#include "ckrr/features.hpp"

namespace ckrr {
namespace {

void check_point(const Vector& x, int expect_dim, const char* what) {
  if (expect_dim >= 0 && x.size() != expect_dim)
    throw DimensionMismatch(std::string(what) + ": expected dimension " +
                            std::to_string(expect_dim) + ", got " + std::to_string(x.size()));
  if (!x.allFinite()) throw ConfigError(std::string(what) + ": non-finite input coordinate");
}

// cos(ix)cos(iy) + sin(ix)sin(iy), accumulated in a form that is exactly
// symmetric in (x, y).
double fourier_partial(double s, int from, int to, double x, double y) {
  double acc = 0.0;
  for (int i = from; i <= to; ++i) {
    const double w = std::pow(static_cast<double>(i), -2.0 * s);
    acc += w * (std::cos(i * x) * std::cos(i * y) + std::sin(i * x) * std::sin(i * y));
  }
  return acc;
}

struct Evaluator {
  const Vector& x;
  const Vector& y;

  double operator()(const FourierSeriesKernel& k) const {
    check_point(x, 1, "fourier_series");
    check_point(y, 1, "fourier_series");
    return 1.0 + fourier_partial(k.s, 1, k.truncation, x[0], y[0]);
  }
  double operator()(const FourierTailKernel& k) const {
    check_point(x, 1, "fourier_tail");
    check_point(y, 1, "fourier_tail");
    if (k.cutoff < 0 || k.cutoff > k.truncation)
      throw ConfigError("fourier_tail: cutoff outside [0, truncation]");
    return fourier_partial(k.s, k.cutoff + 1, k.truncation, x[0], y[0]);
  }
  double operator()(const GaussianKernel& k) const {
    check_point(x, static_cast<int>(y.size()), "gaussian");
    check_point(y, -1, "gaussian");
    return std::exp(-k.gamma * (x - y).squaredNorm());
  }
  double operator()(const LaplaceKernel& k) const {
    check_point(x, static_cast<int>(y.size()), "laplace");
    check_point(y, -1, "laplace");
    return std::exp(-k.gamma * (x - y).norm());
  }
  double operator()(const Matern32Kernel& k) const {
    check_point(x, static_cast<int>(y.size()), "matern32");
    check_point(y, -1, "matern32");
    const double t = std::sqrt(3.0) * (x - y).norm() / k.lengthscale;
    return (1.0 + t) * std::exp(-t);
  }
  double operator()(const NngpErfKernel& k) const {
    check_point(x, static_cast<int>(y.size()), "nngp_erf");
    check_point(y, -1, "nngp_erf");
    const double sxy = k.bias_variance + k.weight_variance * x.dot(y);
    const double sxx = k.bias_variance + k.weight_variance * x.dot(x);
    const double syy = k.bias_variance + k.weight_variance * y.dot(y);
    const double denom = std::sqrt((1.0 + 2.0 * sxx) * (1.0 + 2.0 * syy));
    return (2.0 / M_PI) * std::asin(2.0 * sxy / denom);
  }
  double operator()(const EmpiricalFeaturesKernel& k) const {
    if (!k.basis) throw ConfigError("empirical_features: missing basis");
    const int m = k.basis->dimension();
    if (m == 0) return 0.0;
    Matrix pts(2, x.size());
    pts.row(0) = x.transpose();
    pts.row(1) = y.transpose();
    const Matrix f = feature_matrix(*k.basis, pts);
    return f.col(0).dot(f.col(1)) / static_cast<double>(m);
  }
};

}  // namespace

double eval_kernel(const KernelSpec& spec, const Vector& x, const Vector& y) {
  return std::visit(Evaluator{x, y}, spec);
}

Matrix gram(const KernelSpec& spec, const Matrix& X) {
  const Eigen::Index n = X.rows();
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector xi = X.row(i).transpose();
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = eval_kernel(spec, xi, X.row(j).transpose());
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

Matrix cross_gram(const KernelSpec& spec, const Matrix& X, const Matrix& Z) {
  if (X.cols() != Z.cols() && X.rows() > 0 && Z.rows() > 0)
    throw DimensionMismatch("cross_gram: point dimensions differ");
  Matrix g(X.rows(), Z.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Vector xi = X.row(i).transpose();
    for (Eigen::Index j = 0; j < Z.rows(); ++j)
      g(i, j) = eval_kernel(spec, xi, Z.row(j).transpose());
  }
  return g;
}

}  // namespace ckrr
