#include "ckrr/fourier_fast.hpp"

#include <cmath>

#include "ckrr/errors.hpp"

namespace ckrr {
namespace {

// Rows: constant (unless suppressed), then per harmonic i in (cutoff, J] the
// scaled cosine and sine rows i^-s cos(ix), i^-s sin(ix).  Harmonics at or
// below the cutoff are simply absent, matching the tail kernel.
Matrix lift(const Matrix& X, double s, int truncation, int cutoff,
            bool include_constant) {
  if (X.rows() > 0 && X.cols() != 1) {
    throw DimensionMismatch("fourier kernels expect one-dimensional inputs");
  }
  const Eigen::Index n = X.rows();
  const int first = cutoff + 1;
  const Eigen::Index rows =
      (include_constant ? 1 : 0) +
      2 * static_cast<Eigen::Index>(std::max(0, truncation - cutoff));
  Matrix v(rows, n);
  Eigen::Index r = 0;
  if (include_constant) {
    v.row(r++).setOnes();
  }
  for (int i = first; i <= truncation; ++i) {
    const double w = std::pow(static_cast<double>(i), -s);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double ix = i * X(j, 0);
      v(r, j) = w * std::cos(ix);
      v(r + 1, j) = w * std::sin(ix);
    }
    r += 2;
  }
  return v;
}

struct LiftPlan {
  double s = 0.0;
  int truncation = 0;
  int cutoff = 0;
  bool include_constant = false;
  bool applicable = false;
};

LiftPlan plan_for(const KernelSpec& spec) {
  LiftPlan p;
  if (const auto* fs = std::get_if<FourierSeriesKernel>(&spec)) {
    p = {fs->s, fs->truncation, 0, true, true};
  } else if (const auto* ft = std::get_if<FourierTailKernel>(&spec)) {
    p = {ft->s, ft->truncation, ft->cutoff, false, true};
  }
  return p;
}

}  // namespace

Matrix fast_gram(const KernelSpec& spec, const Matrix& X) {
  const LiftPlan p = plan_for(spec);
  if (!p.applicable) {
    return gram(spec, X);
  }
  const Matrix v = lift(X, p.s, p.truncation, p.cutoff, p.include_constant);
  Matrix g = v.transpose() * v;
  // Mirror the upper triangle so the result is bit-exactly symmetric.
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < g.cols(); ++j) {
      g(j, i) = g(i, j);
    }
  }
  return g;
}

Matrix fast_cross_gram(const KernelSpec& spec, const Matrix& X,
                       const Matrix& Z) {
  const LiftPlan p = plan_for(spec);
  if (!p.applicable) {
    return cross_gram(spec, X, Z);
  }
  const Matrix vx = lift(X, p.s, p.truncation, p.cutoff, p.include_constant);
  const Matrix vz = lift(Z, p.s, p.truncation, p.cutoff, p.include_constant);
  return vx.transpose() * vz;
}

}  // namespace ckrr
