#include "ckrr/risk_theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ckrr/errors.hpp"

namespace ckrr {

Spectrum Spectrum::power_law(double a, int J) {
  Spectrum s;
  s.eigenvalues.resize(J);
  for (int i = 0; i < J; ++i) s.eigenvalues[i] = std::pow(static_cast<double>(i + 1), -a);
  s.generator = "power a=" + std::to_string(a);
  return s;
}

Spectrum Spectrum::exponential(double rate, int J) {
  Spectrum s;
  s.eigenvalues.resize(J);
  for (int i = 0; i < J; ++i) s.eigenvalues[i] = std::exp(-rate * (i + 1));
  s.generator = "exp rate=" + std::to_string(rate);
  return s;
}

Spectrum Spectrum::fourier(double s_par, int max_harmonic) {
  Spectrum s;
  s.eigenvalues.resize(1 + 2 * max_harmonic);
  s.eigenvalues[0] = 1.0;
  for (int i = 1; i <= max_harmonic; ++i) {
    const double lam = std::pow(static_cast<double>(i), -2.0 * s_par);
    s.eigenvalues[2 * i - 1] = lam;
    s.eigenvalues[2 * i] = lam;
  }
  s.generator = "fourier s=" + std::to_string(s_par);
  return s;
}

void Spectrum::validate() const {
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (!(eigenvalues[i] > 0.0)) throw ConfigError("spectrum: eigenvalues must be positive");
    if (i > 0 && eigenvalues[i] > eigenvalues[i - 1])
      throw ConfigError("spectrum: eigenvalues must be nonincreasing");
  }
}

namespace {

// Root of a strictly decreasing function by bracket expansion + bisection.
double bisect_decreasing(const std::function<double(double)>& f, const char* what) {
  double lo = 1.0, hi = 1.0;
  int guard = 0;
  while (f(lo) <= 0.0) {
    lo /= 16.0;
    if (++guard > 4096 || lo < 1e-290) throw NoRoot(std::string(what) + ": no positive root");
  }
  guard = 0;
  while (f(hi) >= 0.0) {
    hi *= 16.0;
    if (++guard > 4096 || hi > 1e290) throw NoRoot(std::string(what) + ": no positive root");
  }
  // f(lo) > 0 > f(hi); bisect in log space for scale independence.
  double llo = std::log(lo), lhi = std::log(hi);
  for (int it = 0; it < 200 && lhi - llo > 1e-15; ++it) {
    const double mid = 0.5 * (llo + lhi);
    if (f(std::exp(mid)) > 0.0)
      llo = mid;
    else
      lhi = mid;
  }
  return std::exp(0.5 * (llo + lhi));
}

double learnability_sum(const Eigen::VectorXd& lams, double kappa, int from = 0) {
  double acc = 0.0;
  for (Eigen::Index i = from; i < lams.size(); ++i) acc += lams[i] / (lams[i] + kappa);
  return acc;
}

}  // namespace

double solve_kappa_ridge(const Spectrum& spec, int N, double lambda) {
  spec.validate();
  if (N < 1) throw ConfigError("solve_kappa_ridge: N must be >= 1");
  if (lambda < 0.0) throw ConfigError("solve_kappa_ridge: lambda must be >= 0");
  const auto& lams = spec.eigenvalues;
  if (lambda == 0.0 && N >= lams.size())
    throw NoRoot("solve_kappa_ridge: lambda = 0 and N >= spectrum length");
  if (lams.size() == 0) return lambda / static_cast<double>(N);
  return bisect_decreasing(
      [&](double x) { return learnability_sum(lams, x) + lambda / x - static_cast<double>(N); },
      "solve_kappa_ridge");
}

double solve_kappa_features(const Spectrum& spec, double k) {
  spec.validate();
  if (!(k > 0.0) || k >= static_cast<double>(spec.eigenvalues.size()))
    throw ConfigError("solve_kappa_features: k must lie in (0, J)");
  return bisect_decreasing([&](double x) { return learnability_sum(spec.eigenvalues, x) - k; },
                           "solve_kappa_features");
}

RiskReport predicted_mse(const Spectrum& spec, const TargetCoeffs& coeffs, int N, double lambda,
                         int tail_from) {
  spec.validate();
  const auto& lams = spec.eigenvalues;
  if (tail_from < 0 || tail_from >= lams.size())
    throw ConfigError("predicted_mse: tail_from must be in [0, J)");
  if (coeffs.sigma2 < 0.0) throw ConfigError("predicted_mse: sigma2 must be >= 0");

  RiskReport rep;
  rep.tail_from = tail_from;
  Spectrum tail;
  tail.eigenvalues = lams.tail(lams.size() - tail_from);
  rep.kappa = solve_kappa_ridge(tail, N, lambda);

  rep.learnabilities.resize(tail.eigenvalues.size());
  double l2 = 0.0;
  for (Eigen::Index i = 0; i < tail.eigenvalues.size(); ++i) {
    rep.learnabilities[i] = tail.eigenvalues[i] / (tail.eigenvalues[i] + rep.kappa);
    l2 += rep.learnabilities[i] * rep.learnabilities[i];
  }
  if (static_cast<double>(N) <= l2)
    throw OverfittingDivergence("predicted_mse: N <= sum of squared learnabilities");
  rep.e_noise = static_cast<double>(N) / (static_cast<double>(N) - l2);

  if (tail_from == 0) {
    double bias = 0.0;
    for (Eigen::Index i = 0; i < coeffs.u.size() && i < lams.size(); ++i) {
      const double one_minus = 1.0 - rep.learnabilities[i];
      bias += one_minus * one_minus * coeffs.u[i] * coeffs.u[i];
    }
    rep.predicted_mse = rep.e_noise * (bias + coeffs.sigma2);
  } else {
    rep.predicted_mse = rep.e_noise * coeffs.sigma2;
  }
  return rep;
}

AdvantageResult advantage_condition(const Spectrum& spec, const TargetCoeffs& coeffs, int N,
                                    double lambda, int k, double c_user) {
  if (k < 0 || k >= spec.eigenvalues.size())
    throw ConfigError("advantage_condition: k must be in [0, J)");
  const RiskReport full = predicted_mse(spec, coeffs, N, lambda, 0);
  const RiskReport resid = predicted_mse(spec, coeffs, N, lambda, k);

  AdvantageResult res;
  for (int i = 0; i < k && i < coeffs.u.size(); ++i) {
    const double d = spec.eigenvalues[i] + full.kappa;
    res.lhs += full.kappa * full.kappa * coeffs.u[i] * coeffs.u[i] / (d * d);
  }
  res.rhs = coeffs.sigma2 * (resid.e_noise / full.e_noise - 1.0);
  res.correction =
      c_user * coeffs.sigma2 * static_cast<double>(k + 1) / (static_cast<double>(N) * full.e_noise);
  // The noise side is a cost (the hidden constant in the O(.) term absorbs any
  // negative finite-truncation excess), so it never drops below zero: with
  // u = 0 unpenalizing pure noise is never predicted to help.
  res.slack = res.lhs - std::max(res.rhs + res.correction, 0.0);
  res.holds = res.slack > 0.0;
  return res;
}

}  // namespace ckrr
