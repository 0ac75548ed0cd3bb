#include "ckrr/rfrr.hpp"

#include <Eigen/Cholesky>

#include "ckrr/cpd_solver.hpp"
#include "ckrr/errors.hpp"

namespace ckrr {

RfrrModel fit_rfrr(const FeatureBasis& phi, const FeatureBasis& psi, const Matrix& X,
                   const Vector& y, double lambda) {
  if (lambda <= 0.0) throw NonPositiveRidge();
  const Eigen::Index n = X.rows();
  if (y.size() != n) throw DimensionMismatch("fit_rfrr: |y| != N");

  const Matrix A = feature_matrix(phi, X);  // k x N
  const Matrix B = feature_matrix(psi, X);  // m x N
  const Eigen::Index k = A.rows();
  const double lam_n = lambda * static_cast<double>(n);

  RfrrModel model;
  model.unpenalized = phi;
  model.penalized = psi;
  model.ridge = lambda;

  const Projection proj = projection_matrix(A);  // throws RankDeficientFeatures
  const Matrix ip = Matrix::Identity(n, n) - proj.pi;
  const Vector r = ip * y;
  const Matrix bt = B * ip;  // m x N

  Matrix sys = bt.transpose() * bt;
  sys.diagonal().array() += lam_n;
  Eigen::LLT<Matrix> llt(sys);
  if (llt.info() != Eigen::Success)
    throw NumericalError("fit_rfrr: penalized system not positive definite");
  model.w = bt * llt.solve(r);

  if (k > 0) {
    const Matrix aat = A * A.transpose();
    model.u = Eigen::LLT<Matrix>(aat).solve(A * (y - B.transpose() * model.w));
  } else {
    model.u.resize(0);
  }

  Vector resid = B.transpose() * model.w - y;
  if (k > 0) resid += A.transpose() * model.u;
  model.report.rank_a = proj.rank;
  model.report.objective_value =
      resid.squaredNorm() / static_cast<double>(n) + lambda * model.w.squaredNorm();
  return model;
}

Vector predict_rfrr(const RfrrModel& model, const Matrix& Z) {
  Vector out = feature_matrix(model.penalized, Z).transpose() * model.w;
  if (model.u.size() > 0) out += feature_matrix(model.unpenalized, Z).transpose() * model.u;
  return out;
}

}  // namespace ckrr
