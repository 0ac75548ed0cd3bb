#pragma once

#include "ckrr/features.hpp"

namespace ckrr {

struct RfrrReport {
  int rank_a = 0;
  double objective_value = 0.0;
};

// Ridge regression with k unpenalized features phi and m penalized features psi
// (psi carries its own 1/sqrt(m) scale).  Objective:
//   (1/N) sum (u.phi(x_i) + w.psi(x_i) - y_i)^2 + lambda |w|^2
struct RfrrModel {
  FeatureBasis unpenalized;  // phi, k functions
  FeatureBasis penalized;    // psi, m functions
  Vector u;
  Vector w;
  double ridge = 0.0;
  RfrrReport report;
};

// N x N kernel-trick solve: w = Bt (Bt^T Bt + lambda N I)^-1 r with Bt = B (I - Pi_A).
RfrrModel fit_rfrr(const FeatureBasis& phi, const FeatureBasis& psi, const Matrix& X,
                   const Vector& y, double lambda);

Vector predict_rfrr(const RfrrModel& model, const Matrix& Z);

}  // namespace ckrr
