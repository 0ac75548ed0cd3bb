#include "ckrr/features.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ckrr/errors.hpp"
#include "ckrr/rng.hpp"

namespace ckrr {

EigenfunctionSystem fourier_eigensystem(double s, int max_harmonic) {
  EigenfunctionSystem sys;
  sys.eigenvalues.resize(1 + 2 * max_harmonic);
  sys.eigenvalues[0] = 1.0;
  for (int i = 1; i <= max_harmonic; ++i) {
    const double lam = std::pow(static_cast<double>(i), -2.0 * s);
    sys.eigenvalues[2 * i - 1] = lam;
    sys.eigenvalues[2 * i] = lam;
  }
  sys.phi = [](int j, const Vector& x) {
    if (x.size() != 1) throw DimensionMismatch("fourier eigenfunction expects dimension 1");
    if (j == 0) return 1.0;
    const int harmonic = (j + 1) / 2;
    return (j % 2 == 1) ? std::cos(harmonic * x[0]) : std::sin(harmonic * x[0]);
  };
  sys.descriptor = "fourier s=" + std::to_string(s) + " J=" + std::to_string(max_harmonic);
  return sys;
}

Activation parse_activation(const std::string& tag) {
  if (tag == "cos") return Activation::Cos;
  if (tag == "relu") return Activation::Relu;
  if (tag == "tanh") return Activation::Tanh;
  throw ConfigError("unknown activation: " + tag);
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Cos: return "cos";
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
  }
  return "?";
}

namespace {

double apply_activation(Activation a, double t) {
  switch (a) {
    case Activation::Cos: return std::cos(t);
    case Activation::Relu: return t > 0.0 ? t : 0.0;
    case Activation::Tanh: return std::tanh(t);
  }
  return 0.0;
}

struct DimVisitor {
  int operator()(const EmptyBasis&) const { return 0; }
  int operator()(const FourierPairsBasis& b) const { return 2 * b.k_max + 1; }
  int operator()(const NystromBasis& b) const { return static_cast<int>(b.eigenvalues.size()); }
  int operator()(const GaussianFieldBasis& b) const { return static_cast<int>(b.xi.rows()); }
  int operator()(const RandomFeatureBasis& b) const { return static_cast<int>(b.omega.rows()); }
  int operator()(const ReluUnitsBasis& b) const { return static_cast<int>(b.weights.rows()); }
};

struct MatrixVisitor {
  const Matrix& X;

  Matrix operator()(const EmptyBasis&) const { return Matrix(0, X.rows()); }

  Matrix operator()(const FourierPairsBasis& b) const {
    const Eigen::Index n = X.rows();
    if (n > 0 && X.cols() != 1)
      throw DimensionMismatch("fourier_pairs expects 1-d inputs");
    Matrix f(2 * b.k_max + 1, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double x = X(j, 0);
      f(0, j) = 1.0;
      for (int i = 1; i <= b.k_max; ++i) {
        f(2 * i - 1, j) = std::cos(i * x);
        f(2 * i, j) = std::sin(i * x);
      }
    }
    return f;
  }

  Matrix operator()(const NystromBasis& b) const {
    // phi_i(x) = (1/(sqrt(N) l_i)) sum_j alpha_i(j) K(x, X_j)
    const double n = static_cast<double>(b.train_inputs.rows());
    const Matrix cross = cross_gram(b.kernel, b.train_inputs, X);  // N x M
    Matrix f = b.alpha.transpose() * cross;                        // k x M
    for (Eigen::Index i = 0; i < f.rows(); ++i)
      f.row(i) /= std::sqrt(n) * b.eigenvalues[i];
    return f;
  }

  Matrix operator()(const GaussianFieldBasis& b) const {
    const int J = static_cast<int>(b.xi.cols());
    const Eigen::Index n = X.rows();
    Matrix phi(J, n);
    for (int j = 0; j < J; ++j)
      for (Eigen::Index c = 0; c < n; ++c)
        phi(j, c) = b.system->phi(j, X.row(c).transpose());
    Matrix scaled = b.xi;  // k x J
    for (int j = 0; j < J; ++j) scaled.col(j) *= std::sqrt(b.system->eigenvalues[j]);
    return scaled * phi;
  }

  Matrix operator()(const RandomFeatureBasis& b) const {
    if (X.rows() > 0 && X.cols() != b.omega.cols())
      throw DimensionMismatch("random_feature: input dimension mismatch");
    Matrix t = b.omega * X.transpose();  // m x N
    t.colwise() += b.bias;
    for (Eigen::Index i = 0; i < t.rows(); ++i)
      for (Eigen::Index j = 0; j < t.cols(); ++j)
        t(i, j) = apply_activation(b.activation, t(i, j));
    if (b.penalized_scale && t.rows() > 0) t /= std::sqrt(static_cast<double>(t.rows()));
    return t;
  }

  Matrix operator()(const ReluUnitsBasis& b) const {
    if (X.rows() > 0 && b.weights.rows() > 0 && X.cols() != b.weights.cols())
      throw DimensionMismatch("relu_units: input dimension mismatch");
    Matrix t = b.weights * X.transpose();
    t.colwise() += b.bias;
    return t.cwiseMax(0.0);
  }
};

}  // namespace

int FeatureBasis::dimension() const { return std::visit(DimVisitor{}, data_); }

Matrix feature_matrix(const FeatureBasis& basis, const Matrix& X) {
  if (!X.allFinite()) throw ConfigError("feature_matrix: non-finite inputs");
  return std::visit(MatrixVisitor{X}, basis.data());
}

NystromFit fit_nystrom(const KernelSpec& spec, const Matrix& X, int k, double drop_tol) {
  const int n = static_cast<int>(X.rows());
  if (k < 1 || k > n) throw ConfigError("fit_nystrom: k must be in [1, N]");
  Matrix g = gram(spec, X) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  if (es.info() != Eigen::Success) throw NumericalError("fit_nystrom: eigendecomposition failed");

  // SelfAdjointEigenSolver sorts ascending; reorder to decreasing eigenvalue,
  // breaking exact ties by ascending original index.
  const int total = n;
  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return es.eigenvalues()[a] > es.eigenvalues()[b];
  });

  const double top = es.eigenvalues()[order[0]];
  int retained = 0;
  while (retained < total && es.eigenvalues()[order[retained]] > drop_tol * top) ++retained;

  const int kept = std::min(k, retained);
  if (kept < 1) throw NumericalError("fit_nystrom: no eigenvalue above drop tolerance");
  NystromBasis b;
  b.kernel = spec;
  b.train_inputs = X;
  b.eigenvalues.resize(kept);
  b.alpha.resize(n, kept);
  for (int i = 0; i < kept; ++i) {
    b.eigenvalues[i] = es.eigenvalues()[order[i]];
    b.alpha.col(i) = es.eigenvectors().col(order[i]);
  }
  b.retained = retained;
  return NystromFit{FeatureBasis(std::move(b)), retained};
}

FeatureBasis sample_gaussian_field_basis(std::shared_ptr<const EigenfunctionSystem> system,
                                         int k, int truncation, std::uint64_t seed) {
  if (!system) throw ConfigError("gaussian_field: missing eigenfunction system");
  if (k < 1) throw ConfigError("gaussian_field: k must be >= 1");
  if (truncation > system->eigenvalues.size())
    throw ConfigError("gaussian_field: truncation exceeds spectrum length");
  GaussianFieldBasis b;
  b.seed = seed;
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  b.xi.resize(k, truncation);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < truncation; ++j) b.xi(i, j) = normal(rng);
  if (truncation == system->eigenvalues.size()) {
    b.system = std::move(system);
  } else {
    auto trimmed = std::make_shared<EigenfunctionSystem>(*system);
    trimmed->eigenvalues.conservativeResize(truncation);
    b.system = std::move(trimmed);
  }
  return FeatureBasis(std::move(b));
}

FeatureBasis sample_random_feature_basis(Activation activation, int d, int count,
                                         std::uint64_t seed, bool penalized_scale,
                                         OmegaScale scale) {
  if (count < 1 || d < 1) throw ConfigError("random_feature: count and d must be >= 1");
  RandomFeatureBasis b;
  b.activation = activation;
  b.penalized_scale = penalized_scale;
  b.seed = seed;
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = scale == OmegaScale::InverseDim ? 1.0 / std::sqrt(static_cast<double>(d)) : 1.0;
  b.omega.resize(count, d);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < d; ++j) b.omega(i, j) = sd * normal(rng);
  b.bias.resize(count);
  if (activation == Activation::Cos) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    for (int i = 0; i < count; ++i) b.bias[i] = u(rng);
  } else {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < count; ++i) b.bias[i] = u(rng);
  }
  return FeatureBasis(std::move(b));
}

FeatureBasis load_relu_units(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("relu_units: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        row.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("relu_units: parse error at " + path + ":" + std::to_string(lineno));
      }
    }
    if (row.size() < 2)
      throw ConfigError("relu_units: row " + std::to_string(lineno) + " needs bias plus weights");
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("relu_units: inconsistent row width at line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  ReluUnitsBasis b;
  if (rows.empty()) {
    b.weights.resize(0, 0);
    b.bias.resize(0);
  } else {
    const int k = static_cast<int>(rows.size());
    const int d = static_cast<int>(rows.front().size()) - 1;
    b.weights.resize(k, d);
    b.bias.resize(k);
    for (int i = 0; i < k; ++i) {
      b.bias[i] = rows[i][0];
      for (int j = 0; j < d; ++j) b.weights(i, j) = rows[i][j + 1];
    }
  }
  return FeatureBasis(std::move(b));
}

void save_relu_units(const ReluUnitsBasis& units, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("relu_units: cannot write " + path);
  out.precision(17);
  for (Eigen::Index i = 0; i < units.weights.rows(); ++i) {
    out << units.bias[i];
    for (Eigen::Index j = 0; j < units.weights.cols(); ++j) out << "," << units.weights(i, j);
    out << "\n";
  }
}

}  // namespace ckrr
