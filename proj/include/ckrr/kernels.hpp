#pragma once

#include <Eigen/Dense>
#include <memory>
#include <variant>

namespace ckrr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class FeatureBasis;

// K(x,y) = 1 + sum_{i=1..J} i^{-2s} (cos(ix)cos(iy) + sin(ix)sin(iy)), x,y scalar.
struct FourierSeriesKernel {
  double s = 1.0;
  int truncation = 300;  // J
};

// Tail of the Fourier-series kernel: the sum starts at harmonic cutoff+1.
// Does not contain the constant mode.
struct FourierTailKernel {
  double s = 1.0;
  int truncation = 300;
  int cutoff = 0;  // k
};

// exp(-gamma * ||x-y||^2)
struct GaussianKernel {
  double gamma = 1.0;
};

// exp(-gamma * ||x-y||)
struct LaplaceKernel {
  double gamma = 1.0;
};

// (1 + sqrt(3) r / l) exp(-sqrt(3) r / l), r = ||x-y||
struct Matern32Kernel {
  double lengthscale = 1.0;
};

// NNGP kernel of an infinitely wide erf network (Williams' arcsine formula):
//   sigma(x,y) = bias_variance + weight_variance * <x,y>
//   K(x,y) = (2/pi) asin( 2 sigma(x,y) / sqrt((1+2 sigma(x,x))(1+2 sigma(y,y))) )
// The inner product is not divided by the input dimension.
struct NngpErfKernel {
  double weight_variance = 1.0;
  double bias_variance = 0.0;
};

// K(x,y) = (1/m) psi(x) . psi(y) for an m-dimensional feature map psi,
// the Monte-Carlo estimate of E[f(w,x) f(w,y)].
struct EmpiricalFeaturesKernel {
  std::shared_ptr<const FeatureBasis> basis;
};

using KernelSpec = std::variant<FourierSeriesKernel, FourierTailKernel, GaussianKernel,
                                LaplaceKernel, Matern32Kernel, NngpErfKernel,
                                EmpiricalFeaturesKernel>;

double eval_kernel(const KernelSpec& spec, const Vector& x, const Vector& y);

// N x N Gram matrix; upper triangle evaluated, lower mirrored, so the result
// is symmetric bit-exact.
Matrix gram(const KernelSpec& spec, const Matrix& X);

// N x M matrix of K(X_i, Z_j).
Matrix cross_gram(const KernelSpec& spec, const Matrix& X, const Matrix& Z);

}  // namespace ckrr
