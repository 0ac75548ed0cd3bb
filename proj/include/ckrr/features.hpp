#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>

#include "ckrr/kernels.hpp"

namespace ckrr {

// A finite spectral system with evaluable eigenfunctions, used as the
// Karhunen-Loeve ingredient of Gaussian-field bases.  The expansion
// sum_j eigenvalues[j] phi(j,x) phi(j,y) reproduces the covariance kernel.
struct EigenfunctionSystem {
  Vector eigenvalues;  // positive, nonincreasing
  std::function<double(int, const Vector&)> phi;
  std::string descriptor;
};

// System for the Fourier-series kernel on [0, 2*pi]: functions
// {1, cos x, sin x, cos 2x, ...} with eigenvalues {1, s-decay pairs}.
EigenfunctionSystem fourier_eigensystem(double s, int max_harmonic);

enum class Activation { Cos, Relu, Tanh };

Activation parse_activation(const std::string& tag);
std::string activation_name(Activation a);

struct EmptyBasis {};

// {1} u {cos ix, sin ix : 1 <= i <= k_max}; 2*k_max+1 functions.
struct FourierPairsBasis {
  int k_max = 0;
};

// Empirical eigenfunctions of (1/N) Gram: phi_i(x) = (1/(sqrt(N) l_i)) sum_j a_i(j) K(x, X_j).
struct NystromBasis {
  KernelSpec kernel;
  Matrix train_inputs;  // N x d
  Vector eigenvalues;   // k, decreasing positive
  Matrix alpha;         // N x k, unit-norm columns
  int retained = 0;     // numerical rank kept by fit_nystrom before truncation to k
};

// g_i(x) = sum_{j<J} sqrt(lambda_j) xi_ij phi_j(x)
struct GaussianFieldBasis {
  std::shared_ptr<const EigenfunctionSystem> system;
  Matrix xi;  // k x J
  std::uint64_t seed = 0;
};

// f_i(x) = act(omega_i . x + b_i), optionally scaled by 1/sqrt(m).
struct RandomFeatureBasis {
  Activation activation = Activation::Cos;
  Matrix omega;  // m x d
  Vector bias;   // m
  bool penalized_scale = false;  // true: multiply all features by 1/sqrt(m)
  std::uint64_t seed = 0;
};

// f_i(x) = ReLU(w_i . x + b_i), weights imported from file.
struct ReluUnitsBasis {
  Matrix weights;  // k x d
  Vector bias;     // k
};

class FeatureBasis {
 public:
  using Data = std::variant<EmptyBasis, FourierPairsBasis, NystromBasis, GaussianFieldBasis,
                            RandomFeatureBasis, ReluUnitsBasis>;

  FeatureBasis() : data_(EmptyBasis{}) {}
  explicit FeatureBasis(Data data) : data_(std::move(data)) {}

  int dimension() const;
  const Data& data() const { return data_; }

 private:
  Data data_;
};

// k x N matrix, row i = f_i evaluated at every point of X.
Matrix feature_matrix(const FeatureBasis& basis, const Matrix& X);

struct NystromFit {
  FeatureBasis basis;
  int retained = 0;  // eigenvalues surviving the drop tolerance
};

// Eigen-decomposes (1/N) gram(spec, X), drops eigenvalues <= drop_tol * largest,
// keeps min(k, retained) leading eigenfunctions.
NystromFit fit_nystrom(const KernelSpec& spec, const Matrix& X, int k,
                       double drop_tol = 1e-10);

FeatureBasis sample_gaussian_field_basis(std::shared_ptr<const EigenfunctionSystem> system,
                                         int k, int truncation, std::uint64_t seed);

enum class OmegaScale { Identity, InverseDim };  // omega ~ N(0, I) or N(0, I/d)

FeatureBasis sample_random_feature_basis(Activation activation, int d, int count,
                                         std::uint64_t seed, bool penalized_scale,
                                         OmegaScale scale = OmegaScale::Identity);

// CSV, one row per unit: b, w_1, ..., w_d.  Empty file gives a 0-dimensional basis.
FeatureBasis load_relu_units(const std::string& path);
void save_relu_units(const ReluUnitsBasis& units, const std::string& path);

}  // namespace ckrr
