#pragma once

#include "ckrr/kernels.hpp"

namespace ckrr {

// Gram assembly through the truncated feature map of the Fourier-series
// kernel: K = V(X)^T V(Y) with V holding {1, i^-s cos(ix), i^-s sin(ix)} rows.
// Turns the O(N^2 J) entrywise evaluation into one O(N J) lift plus a matrix
// product.  Falls back to the entrywise path for non-Fourier kernels; results
// agree with gram()/cross_gram() to roundoff.
Matrix fast_gram(const KernelSpec& spec, const Matrix& X);
Matrix fast_cross_gram(const KernelSpec& spec, const Matrix& X, const Matrix& Z);

}  // namespace ckrr
