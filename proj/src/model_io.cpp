#include <fstream>
#include <sstream>

#include "ckrr/cpd_solver.hpp"
#include "ckrr/errors.hpp"

namespace ckrr {
namespace {

constexpr const char* kMagic = "CKRRMODEL 1";

void write_matrix(std::ostream& out, const char* name, const Matrix& m) {
  out << name << " " << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
    out << "\n";
  }
}

void write_vector(std::ostream& out, const char* name, const Vector& v) {
  out << name << " " << v.size() << "\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  out << "\n";
}

Matrix read_matrix(std::istream& in, const std::string& expect) {
  std::string name;
  Eigen::Index rows, cols;
  if (!(in >> name >> rows >> cols) || name != expect)
    throw ConfigError("model file: expected matrix " + expect);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(in >> m(i, j))) throw ConfigError("model file: truncated matrix " + expect);
  return m;
}

Vector read_vector(std::istream& in, const std::string& expect) {
  std::string name;
  Eigen::Index size;
  if (!(in >> name >> size) || name != expect)
    throw ConfigError("model file: expected vector " + expect);
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i)
    if (!(in >> v[i])) throw ConfigError("model file: truncated vector " + expect);
  return v;
}

struct KernelWriter {
  std::ostream& out;
  void operator()(const FourierSeriesKernel& k) const {
    out << "kernel fourier_series " << k.s << " " << k.truncation << "\n";
  }
  void operator()(const FourierTailKernel& k) const {
    out << "kernel fourier_tail " << k.s << " " << k.truncation << " " << k.cutoff << "\n";
  }
  void operator()(const GaussianKernel& k) const { out << "kernel gaussian " << k.gamma << "\n"; }
  void operator()(const LaplaceKernel& k) const { out << "kernel laplace " << k.gamma << "\n"; }
  void operator()(const Matern32Kernel& k) const {
    out << "kernel matern32 " << k.lengthscale << "\n";
  }
  void operator()(const NngpErfKernel& k) const {
    out << "kernel nngp_erf " << k.weight_variance << " " << k.bias_variance << "\n";
  }
  void operator()(const EmpiricalFeaturesKernel&) const {
    throw ConfigError("model file: empirical_features kernels are not serializable");
  }
};

KernelSpec read_kernel(std::istream& in) {
  std::string name, tag;
  if (!(in >> name >> tag) || name != "kernel") throw ConfigError("model file: expected kernel");
  if (tag == "fourier_series") {
    FourierSeriesKernel k;
    in >> k.s >> k.truncation;
    return k;
  }
  if (tag == "fourier_tail") {
    FourierTailKernel k;
    in >> k.s >> k.truncation >> k.cutoff;
    return k;
  }
  if (tag == "gaussian") {
    GaussianKernel k;
    in >> k.gamma;
    return k;
  }
  if (tag == "laplace") {
    LaplaceKernel k;
    in >> k.gamma;
    return k;
  }
  if (tag == "matern32") {
    Matern32Kernel k;
    in >> k.lengthscale;
    return k;
  }
  if (tag == "nngp_erf") {
    NngpErfKernel k;
    in >> k.weight_variance >> k.bias_variance;
    return k;
  }
  throw ConfigError("model file: unknown kernel tag " + tag);
}

struct BasisWriter {
  std::ostream& out;
  void operator()(const EmptyBasis&) const { out << "basis empty\n"; }
  void operator()(const FourierPairsBasis& b) const {
    out << "basis fourier_pairs " << b.k_max << "\n";
  }
  void operator()(const NystromBasis& b) const {
    out << "basis nystrom\n";
    std::visit(KernelWriter{out}, b.kernel);
    write_matrix(out, "train_inputs", b.train_inputs);
    write_vector(out, "eigenvalues", b.eigenvalues);
    write_matrix(out, "alpha", b.alpha);
  }
  void operator()(const GaussianFieldBasis&) const {
    throw ConfigError("model file: gaussian_field bases are not serializable");
  }
  void operator()(const RandomFeatureBasis& b) const {
    out << "basis random_feature " << activation_name(b.activation) << " "
        << (b.penalized_scale ? 1 : 0) << "\n";
    write_matrix(out, "omega", b.omega);
    write_vector(out, "bias", b.bias);
  }
  void operator()(const ReluUnitsBasis& b) const {
    out << "basis relu_units\n";
    write_matrix(out, "weights", b.weights);
    write_vector(out, "bias", b.bias);
  }
};

FeatureBasis read_basis(std::istream& in) {
  std::string name, tag;
  if (!(in >> name >> tag) || name != "basis") throw ConfigError("model file: expected basis");
  if (tag == "empty") return FeatureBasis();
  if (tag == "fourier_pairs") {
    FourierPairsBasis b;
    in >> b.k_max;
    return FeatureBasis(b);
  }
  if (tag == "nystrom") {
    NystromBasis b;
    b.kernel = read_kernel(in);
    b.train_inputs = read_matrix(in, "train_inputs");
    b.eigenvalues = read_vector(in, "eigenvalues");
    b.alpha = read_matrix(in, "alpha");
    b.retained = static_cast<int>(b.eigenvalues.size());
    return FeatureBasis(std::move(b));
  }
  if (tag == "random_feature") {
    std::string act;
    int scaled;
    in >> act >> scaled;
    RandomFeatureBasis b;
    b.activation = parse_activation(act);
    b.penalized_scale = scaled != 0;
    b.omega = read_matrix(in, "omega");
    b.bias = read_vector(in, "bias");
    return FeatureBasis(std::move(b));
  }
  if (tag == "relu_units") {
    ReluUnitsBasis b;
    b.weights = read_matrix(in, "weights");
    b.bias = read_vector(in, "bias");
    return FeatureBasis(std::move(b));
  }
  throw ConfigError("model file: unknown basis tag " + tag);
}

}  // namespace

void save_model(const ConditionalKrrModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_model: cannot write " + path);
  out.precision(17);
  out << kMagic << "\n";
  std::visit(KernelWriter{out}, model.kernel);
  out << "ridge " << model.ridge << "\n";
  write_matrix(out, "train_inputs", model.train_inputs);
  write_vector(out, "alpha", model.alpha);
  write_vector(out, "beta", model.beta);
  std::visit(BasisWriter{out}, model.basis.data());
}

ConditionalKrrModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_model: cannot open " + path);
  std::string l1, l2;
  in >> l1 >> l2;
  if (l1 + " " + l2 != kMagic) throw ConfigError("load_model: bad magic header in " + path);
  ConditionalKrrModel model;
  model.kernel = read_kernel(in);
  std::string name;
  if (!(in >> name >> model.ridge) || name != "ridge")
    throw ConfigError("model file: expected ridge");
  model.train_inputs = read_matrix(in, "train_inputs");
  model.alpha = read_vector(in, "alpha");
  model.beta = read_vector(in, "beta");
  model.basis = read_basis(in);
  return model;
}

}  // namespace ckrr
