#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

namespace ckrr {

// Finite decreasing positive eigenvalue sequence.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  std::string generator;  // optional tag, e.g. "power a=2", for reporting

  static Spectrum power_law(double a, int J);
  static Spectrum exponential(double rate, int J);
  // Fourier-series kernel spectrum: the unit eigenvalue of the constant first,
  // then each i^{-2s} with multiplicity 2, so "first k" matches
  // span{1, cos x, sin x, ...}.
  static Spectrum fourier(double s, int max_harmonic);

  void validate() const;  // throws ConfigError if not positive nonincreasing
};

// Coefficients of the target on the leading eigenfunctions, plus noise level.
struct TargetCoeffs {
  Eigen::VectorXd u;
  double sigma2 = 0.0;
};

struct RiskReport {
  double kappa = 0.0;
  Eigen::VectorXd learnabilities;
  double e_noise = 0.0;
  double predicted_mse = 0.0;
  int tail_from = 0;
};

// Unique root of sum_i lambda_i/(lambda_i+x) + lambda/x = N (bracketing bisection).
double solve_kappa_ridge(const Spectrum& spec, int N, double lambda);

// Unique root of sum_i lambda_i/(lambda_i+x) = k, 0 < k < J.
double solve_kappa_features(const Spectrum& spec, double k);

// Omniscient risk prediction.  tail_from = 0: full-kernel KRR,
// E = E_noise (sum (1-L_i)^2 u_i^2 + sigma^2).  tail_from = k > 0: residual
// kernel KRR on the tail spectrum, E' = E'_noise sigma^2.
RiskReport predicted_mse(const Spectrum& spec, const TargetCoeffs& coeffs, int N, double lambda,
                         int tail_from = 0);

struct AdvantageResult {
  double lhs = 0.0;         // sum_{i<=k} kappa^2 u_i^2 / (lambda_i+kappa)^2
  double rhs = 0.0;         // sigma^2 (E'_noise/E_noise - 1)
  double correction = 0.0;  // c_user * sigma^2 (k+1) / (N E_noise), heuristic constant
  bool holds = false;       // lhs > rhs + correction
  double slack = 0.0;
};

AdvantageResult advantage_condition(const Spectrum& spec, const TargetCoeffs& coeffs, int N,
                                    double lambda, int k, double c_user = 1.0);

}  // namespace ckrr
