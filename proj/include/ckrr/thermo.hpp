#pragma once

#include <cstdint>

#include "ckrr/risk_theory.hpp"

namespace ckrr {

// One Monte-Carlo draw of the soft-thresholding coefficients
// M_{l,m} = xi_{.l}^T G^-1 xi_{.m}, G = sum_j lambda_j xi_{.j} xi_{.j}^T.
struct MSample {
  Eigen::MatrixXd M;   // J x J
  int resamples = 0;   // draws rejected for ill-conditioned G
  double trace_check;  // sum_j lambda_j M_jj, equals k up to roundoff
};

MSample sample_M(const Spectrum& spec, int k, std::uint64_t seed);

// Monte-Carlo estimate of the per-mode eigenvalue ratio mu_i/lambda_i of the
// expected residual kernel under k random Gaussian features.
struct ThermoEstimate {
  Spectrum spectrum;
  int k = 0;
  int trials = 0;
  Eigen::VectorXd rho;     // I_max means of 1 - 2 lambda_i M_ii + sum_j lambda_j^2 M_ij^2
  Eigen::VectorXd stderrs;
  double kappa = 0.0;      // from sum lambda_i/(lambda_i+kappa) = k
  std::uint64_t seed = 0;
  int resamples = 0;
  int threads = 1;
};

ThermoEstimate estimate_ratio(const Spectrum& spec, int k, int trials, int I_max,
                              std::uint64_t seed, int threads = 1);

// Least-squares scalar of rho_i ~ c * kappa^2/(lambda_i+kappa)^2.
double fit_c(const ThermoEstimate& est);

}  // namespace ckrr
