#pragma once

#include <string>

#include "ckrr/features.hpp"
#include "ckrr/kernels.hpp"

namespace ckrr {

struct FitReport {
  int feature_rank = 0;
  double residual_gram_min_eig = 0.0;
  double objective_value = 0.0;
};

// Fitted conditional KRR model: f(x) = sum_i alpha_i K(X_i, x) + sum_j beta_j f_j(x),
// with F alpha = 0.
struct ConditionalKrrModel {
  KernelSpec kernel;
  FeatureBasis basis;
  Matrix train_inputs;
  Vector alpha;
  Vector beta;
  double ridge = 0.0;
  FitReport report;
};

struct Projection {
  Matrix pi;  // N x N orthogonal projector onto the row space of F
  int rank = 0;
};

// Pi = F^T (F F^T)^-1 F via SVD; throws RankDeficientFeatures if the numerical
// rank of F is below its row count.
Projection projection_matrix(const Matrix& F, double rank_tol = 1e-10);

// (I - Pi) G (I - Pi), explicitly symmetrized.
Matrix residual_gram(const Matrix& G, const Matrix& pi);

// Two-stage solver (linear regression on the feature span, then KRR with the
// residual Gram).  The ridge system carries lambda * N: the objective is
// (1/N) sum (f(x_i)-y_i)^2 + lambda |f|^2, so the solve is (Kt + lambda N I) a = r.
ConditionalKrrModel fit(const KernelSpec& spec, const FeatureBasis& basis, const Matrix& X,
                        const Vector& y, double lambda);

// Same model from precomputed G = gram(spec, X) and F = feature_matrix(basis, X).
ConditionalKrrModel fit_with_gram(const KernelSpec& spec, const FeatureBasis& basis,
                                  const Matrix& X, const Matrix& G, const Matrix& F,
                                  const Vector& y, double lambda);

// Constrained-least-squares reference: solves the KKT system of
//   min |G a + F^T b - y|^2 + lambda N a^T G a   s.t.  F a = 0
// by a rank-revealing factorization.  Test oracle; no shortcuts shared with fit().
ConditionalKrrModel fit_direct_oracle(const KernelSpec& spec, const FeatureBasis& basis,
                                      const Matrix& X, const Vector& y, double lambda);

Vector predict(const ConditionalKrrModel& model, const Matrix& Z);

// Evaluate from precomputed cross-Gram (train x M) and feature matrix (k x M).
Vector predict_with_gram(const ConditionalKrrModel& model, const Matrix& crossG,
                         const Matrix& FZ);

// Versioned text serialization of (kernel, basis, train inputs, alpha, beta).
// Gaussian-field bases are not serializable.
void save_model(const ConditionalKrrModel& model, const std::string& path);
ConditionalKrrModel load_model(const std::string& path);

}  // namespace ckrr
