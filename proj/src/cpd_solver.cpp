#include "ckrr/cpd_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "ckrr/errors.hpp"

namespace ckrr {

Projection projection_matrix(const Matrix& F, double rank_tol) {
  const Eigen::Index k = F.rows();
  const Eigen::Index n = F.cols();
  if (k > n) throw RankDeficientFeatures(static_cast<int>(n), static_cast<int>(k));
  if (k == 0) return Projection{Matrix::Zero(n, n), 0};

  Eigen::JacobiSVD<Matrix> svd(F, Eigen::ComputeThinV);
  const double cutoff = rank_tol * svd.singularValues()[0];
  int rank = 0;
  while (rank < svd.singularValues().size() && svd.singularValues()[rank] > cutoff) ++rank;
  if (rank < k) throw RankDeficientFeatures(rank, static_cast<int>(k));

  const Matrix v = svd.matrixV().leftCols(rank);
  Matrix pi = v * v.transpose();
  pi = ((pi + pi.transpose()) * 0.5).eval();
  return Projection{std::move(pi), rank};
}

Matrix residual_gram(const Matrix& G, const Matrix& pi) {
  if (G.rows() != G.cols() || pi.rows() != pi.cols() || G.rows() != pi.rows())
    throw DimensionMismatch("residual_gram: shape mismatch");
  const Matrix ip = Matrix::Identity(G.rows(), G.rows()) - pi;
  Matrix kt = ip * G * ip;
  kt = ((kt + kt.transpose()) * 0.5).eval();
  return kt;
}

namespace {

double objective(const Matrix& G, const Matrix& F, const Vector& y, const Vector& alpha,
                 const Vector& beta, double lambda) {
  const Eigen::Index n = y.size();
  Vector resid = G * alpha - y;
  if (F.rows() > 0) resid += F.transpose() * beta;
  return resid.squaredNorm() / static_cast<double>(n) + lambda * alpha.dot(G * alpha);
}

// (F F^T)^-1 F resid through the SVD F = U S V^T (so U S^-1 V^T resid), with
// the same rank cutoff as the projector.
Vector solve_feature_normal(const Matrix& F, const Vector& resid, double rank_tol) {
  Eigen::JacobiSVD<Matrix> svd(F, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cutoff = rank_tol * svd.singularValues()[0];
  Vector t = svd.matrixV().transpose() * resid;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double sv = svd.singularValues()[i];
    t[i] = sv > cutoff ? t[i] / sv : 0.0;
  }
  return svd.matrixU() * t;
}

}  // namespace

ConditionalKrrModel fit_with_gram(const KernelSpec& spec, const FeatureBasis& basis,
                                  const Matrix& X, const Matrix& G, const Matrix& F,
                                  const Vector& y, double lambda) {
  if (lambda <= 0.0) throw NonPositiveRidge();
  const Eigen::Index n = X.rows();
  if (G.rows() != n || y.size() != n || F.cols() != n)
    throw DimensionMismatch("fit: inconsistent shapes");

  ConditionalKrrModel model;
  model.kernel = spec;
  model.basis = basis;
  model.train_inputs = X;
  model.ridge = lambda;

  const double lam_n = lambda * static_cast<double>(n);
  if (F.rows() == 0) {
    Matrix sys = G;
    sys.diagonal().array() += lam_n;
    Eigen::LLT<Matrix> llt(sys);
    if (llt.info() != Eigen::Success)
      throw NumericalError("fit: Gram + lambda N I is not positive definite");
    model.alpha = llt.solve(y);
    model.beta.resize(0);
    model.report.feature_rank = 0;
    model.report.residual_gram_min_eig =
        Eigen::SelfAdjointEigenSolver<Matrix>(G, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    model.report.objective_value = objective(G, F, y, model.alpha, model.beta, lambda);
    return model;
  }

  const Projection proj = projection_matrix(F);
  const Matrix ip = Matrix::Identity(n, n) - proj.pi;
  const Vector r = ip * y;
  const Matrix kt = residual_gram(G, proj.pi);

  Matrix sys = kt;
  sys.diagonal().array() += lam_n;
  Eigen::LLT<Matrix> llt(sys);
  if (llt.info() != Eigen::Success)
    throw NumericalError(
        "fit: residual Gram + lambda N I is not positive definite; "
        "the kernel is not CPD w.r.t. the feature class");
  const Vector alpha_prime = llt.solve(r);
  model.alpha = ip * alpha_prime;
  model.beta = solve_feature_normal(F, y - G * model.alpha, 1e-10);

  model.report.feature_rank = proj.rank;
  model.report.residual_gram_min_eig =
      Eigen::SelfAdjointEigenSolver<Matrix>(kt, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  model.report.objective_value = objective(G, F, y, model.alpha, model.beta, lambda);
  return model;
}

ConditionalKrrModel fit(const KernelSpec& spec, const FeatureBasis& basis, const Matrix& X,
                        const Vector& y, double lambda) {
  return fit_with_gram(spec, basis, X, gram(spec, X), feature_matrix(basis, X), y, lambda);
}

ConditionalKrrModel fit_direct_oracle(const KernelSpec& spec, const FeatureBasis& basis,
                                      const Matrix& X, const Vector& y, double lambda) {
  if (lambda <= 0.0) throw NonPositiveRidge();
  const Eigen::Index n = X.rows();
  const Matrix G = gram(spec, X);
  const Matrix F = feature_matrix(basis, X);
  const Eigen::Index k = F.rows();
  const double lam_n = lambda * static_cast<double>(n);

  // KKT system of the constrained quadratic program, unknowns (alpha, beta, nu):
  //   G (G a + F^T b - y) + lambda N G a + F^T nu = 0
  //   F (G a + F^T b - y) = 0
  //   F a = 0
  const Eigen::Index m = n + 2 * k;
  Matrix kkt = Matrix::Zero(m, m);
  Vector rhs = Vector::Zero(m);
  kkt.block(0, 0, n, n) = G * G + lam_n * G;
  kkt.block(0, n, n, k) = G * F.transpose();
  kkt.block(0, n + k, n, k) = F.transpose();
  kkt.block(n, 0, k, n) = F * G;
  kkt.block(n, n, k, k) = F * F.transpose();
  kkt.block(n + k, 0, k, n) = F;
  rhs.head(n) = G * y;
  rhs.segment(n, k) = F * y;

  Eigen::FullPivLU<Matrix> lu(kkt);
  if (!lu.isInvertible()) throw NumericalError("fit_direct_oracle: singular KKT system");
  const Vector sol = lu.solve(rhs);

  ConditionalKrrModel model;
  model.kernel = spec;
  model.basis = basis;
  model.train_inputs = X;
  model.ridge = lambda;
  model.alpha = sol.head(n);
  model.beta = sol.segment(n, k);
  model.report.feature_rank = static_cast<int>(k);
  model.report.objective_value = objective(G, F, y, model.alpha, model.beta, lambda);
  return model;
}

Vector predict_with_gram(const ConditionalKrrModel& model, const Matrix& crossG,
                         const Matrix& FZ) {
  Vector out = crossG.transpose() * model.alpha;
  if (model.beta.size() > 0) out += FZ.transpose() * model.beta;
  return out;
}

Vector predict(const ConditionalKrrModel& model, const Matrix& Z) {
  return predict_with_gram(model, cross_gram(model.kernel, model.train_inputs, Z),
                           feature_matrix(model.basis, Z));
}

}  // namespace ckrr
