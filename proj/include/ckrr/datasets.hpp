#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ckrr/kernels.hpp"

namespace ckrr {

// One harmonic of a trigonometric target: a*cos(n x) + b*sin(n x).
// n == 0 contributes the constant a.
struct HarmonicCoeff {
  int n = 0;
  double a = 0.0;
  double b = 0.0;
};

using FourierTarget = std::vector<HarmonicCoeff>;

// Parses "n:a:b,n:a:b,..." (b optional, defaults to 0).
FourierTarget parse_fourier_target(const std::string& text);

double eval_fourier_target(const FourierTarget& target, double x);
// Same, but keeps only harmonics with n <= max_harmonic.
double eval_fourier_target_low(const FourierTarget& target, double x,
                               int max_harmonic);

struct Dataset {
  Matrix X;      // N x d, row per sample
  Vector y;      // noisy labels
  Vector clean;  // noiseless targets (empty for loaded data)
};

// X ~ U[0, 2*pi], y = f(x) + noise with noise ~ N(0, sigma2).
Dataset gen_fourier_dataset(int n, const FourierTarget& target, double sigma2,
                            std::uint64_t seed);

enum class SphereTarget { SinCos, Zero };
SphereTarget parse_sphere_target(const std::string& name);

// X uniform on the unit sphere in R^d (normalized Gaussians),
// y = sin(x_1) + 0.5*cos(x_2) (+ noise) for SinCos, pure noise for Zero.
Dataset gen_sphere_dataset(int n, int d, SphereTarget target, double sigma2,
                           std::uint64_t seed);

// CSV with a header row; label_column names the target column, every other
// column becomes a feature.
Dataset load_csv_dataset(const std::string& path,
                         const std::string& label_column);

void save_csv_dataset(const Dataset& data, const std::string& path);

// Deterministic fold assignment: a seeded shuffle of 0..N-1 dealt round-robin.
std::vector<int> fold_assignment(int n, int folds, std::uint64_t seed);

// Per-feature affine map fitted on the training columns only; constant
// features map to zero.  Applied in place to both matrices.
void standardize_features(Matrix& train_x, Matrix& test_x);

}  // namespace ckrr
