#include "ckrr/thermo.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <mutex>
#include <random>

#include "ckrr/errors.hpp"
#include "ckrr/parallel.hpp"
#include "ckrr/rng.hpp"

namespace ckrr {
namespace {

constexpr double kMaxCondition = 1e14;
constexpr int kMaxResamples = 64;

struct Draw {
  Eigen::MatrixXd xi;      // k x J, drawn row-major
  Eigen::MatrixXd g_inv_xi;  // G^-1 xi, k x J
  int resamples = 0;
};

// Draws xi until the feature Gram G = xi diag(lambda) xi^T is well conditioned.
Draw draw_features(const Spectrum& spec, int k, Rng& rng) {
  const auto& lams = spec.eigenvalues;
  const int J = static_cast<int>(lams.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  Draw d;
  d.xi.resize(k, J);
  for (int attempt = 0;; ++attempt) {
    if (attempt > kMaxResamples)
      throw NumericalError("sample_M: feature Gram persistently ill-conditioned");
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < J; ++j) d.xi(i, j) = normal(rng);
    Eigen::MatrixXd g = d.xi * lams.asDiagonal() * d.xi.transpose();
    g = ((g + g.transpose()) * 0.5).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo > 0.0 && hi / lo < kMaxCondition) {
      d.g_inv_xi = Eigen::LDLT<Eigen::MatrixXd>(g).solve(d.xi);
      d.resamples = attempt;
      return d;
    }
  }
}

}  // namespace

MSample sample_M(const Spectrum& spec, int k, std::uint64_t seed) {
  spec.validate();
  const int J = static_cast<int>(spec.eigenvalues.size());
  if (k < 1) throw ConfigError("sample_M: k must be >= 1");
  if (J < k) throw ConfigError("sample_M: spectrum shorter than k");
  Rng rng = make_rng(seed);
  const Draw d = draw_features(spec, k, rng);

  MSample out;
  out.M = d.xi.transpose() * d.g_inv_xi;  // J x J
  out.resamples = d.resamples;
  out.trace_check = spec.eigenvalues.dot(out.M.diagonal());
  return out;
}

ThermoEstimate estimate_ratio(const Spectrum& spec, int k, int trials, int I_max,
                              std::uint64_t seed, int threads) {
  spec.validate();
  const auto& lams = spec.eigenvalues;
  const int J = static_cast<int>(lams.size());
  if (trials < 2) throw ConfigError("estimate_ratio: trials must be >= 2");
  if (I_max < 1 || I_max > J) throw ConfigError("estimate_ratio: I_max must be in [1, J]");
  if (k < 1 || k > J) throw ConfigError("estimate_ratio: k must be in [1, J]");

  Eigen::MatrixXd per_trial(trials, I_max);
  std::vector<int> resamples(trials, 0);
  const Eigen::VectorXd lam2 = lams.array().square();

  if (k == J) {
    // Square xi is invertible a.s., so M = xi^T (xi Lambda xi^T)^-1 xi =
    // Lambda^-1 for every draw and each ratio 1 - 2 lambda_i/lambda_i +
    // lambda_i^2/lambda_i^2 is identically zero.
    per_trial.setZero();
  } else
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    Rng rng = make_rng(seed ^ static_cast<std::uint64_t>(t));
    const Draw d = draw_features(spec, k, rng);
    // Rows of M only for the modes we report: M_i. = xi_{.i}^T (G^-1 xi).
    const Eigen::MatrixXd rows = d.xi.leftCols(I_max).transpose() * d.g_inv_xi;  // I_max x J
    for (int i = 0; i < I_max; ++i) {
      const double quad = lam2.dot(rows.row(i).array().square().matrix());
      per_trial(static_cast<Eigen::Index>(t), i) = 1.0 - 2.0 * lams[i] * rows(i, i) + quad;
    }
    resamples[t] = d.resamples;
  });

  ThermoEstimate est;
  est.spectrum = spec;
  est.k = k;
  est.trials = trials;
  est.seed = seed;
  est.threads = threads;
  est.rho = per_trial.colwise().mean();
  est.stderrs.resize(I_max);
  for (int i = 0; i < I_max; ++i) {
    const double var =
        (per_trial.col(i).array() - est.rho[i]).square().sum() / static_cast<double>(trials - 1);
    est.stderrs[i] = std::sqrt(var / static_cast<double>(trials));
  }
  for (int r : resamples) est.resamples += r;
  // k = J saturates the defining sum, so the root degenerates to 0.
  est.kappa = k < spec.eigenvalues.size()
                  ? solve_kappa_features(spec, static_cast<double>(k))
                  : 0.0;
  return est;
}

double fit_c(const ThermoEstimate& est) {
  if (est.rho.size() < 2) throw ConfigError("fit_c: need at least 2 modes");
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < est.rho.size(); ++i) {
    const double d = est.spectrum.eigenvalues[i] + est.kappa;
    const double g = est.kappa * est.kappa / (d * d);
    num += est.rho[i] * g;
    den += g * g;
  }
  if (den == 0.0) throw NumericalError("fit_c: degenerate design");
  return num / den;
}

}  // namespace ckrr
