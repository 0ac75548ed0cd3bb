#include "ckrr/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "ckrr/errors.hpp"
#include "ckrr/rng.hpp"

namespace ckrr {

FourierTarget parse_fourier_target(const std::string& text) {
  FourierTarget target;
  std::stringstream terms(text);
  std::string term;
  while (std::getline(terms, term, ',')) {
    if (term.empty()) continue;
    HarmonicCoeff c;
    std::stringstream parts(term);
    std::string field;
    int idx = 0;
    while (std::getline(parts, field, ':')) {
      try {
        if (idx == 0) {
          c.n = std::stoi(field);
        } else if (idx == 1) {
          c.a = std::stod(field);
        } else if (idx == 2) {
          c.b = std::stod(field);
        } else {
          throw ConfigError("too many fields in target term '" + term + "'");
        }
      } catch (const std::invalid_argument&) {
        throw ConfigError("bad target term '" + term + "'");
      }
      ++idx;
    }
    if (idx < 2 || c.n < 0) {
      throw ConfigError("bad target term '" + term + "'");
    }
    target.push_back(c);
  }
  return target;
}

double eval_fourier_target(const FourierTarget& target, double x) {
  double v = 0.0;
  for (const auto& c : target) {
    v += c.a * std::cos(c.n * x) + c.b * std::sin(c.n * x);
  }
  return v;
}

double eval_fourier_target_low(const FourierTarget& target, double x,
                               int max_harmonic) {
  double v = 0.0;
  for (const auto& c : target) {
    if (c.n > max_harmonic) continue;
    v += c.a * std::cos(c.n * x) + c.b * std::sin(c.n * x);
  }
  return v;
}

Dataset gen_fourier_dataset(int n, const FourierTarget& target, double sigma2,
                            std::uint64_t seed) {
  if (n <= 0) throw ConfigError("dataset size must be positive");
  if (sigma2 < 0.0) throw ConfigError("noise variance must be nonnegative");
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2));
  Dataset data;
  data.X.resize(n, 1);
  for (int i = 0; i < n; ++i) data.X(i, 0) = unif(rng);
  data.clean.resize(n);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    data.clean(i) = eval_fourier_target(target, data.X(i, 0));
    data.y(i) = data.clean(i) + (sigma2 > 0.0 ? gauss(rng) : 0.0);
  }
  return data;
}

SphereTarget parse_sphere_target(const std::string& name) {
  if (name == "sincos") return SphereTarget::SinCos;
  if (name == "zero") return SphereTarget::Zero;
  throw ConfigError("unknown sphere target '" + name + "'");
}

Dataset gen_sphere_dataset(int n, int d, SphereTarget target, double sigma2,
                           std::uint64_t seed) {
  if (n <= 0 || d <= 0) throw ConfigError("dataset dimensions must be positive");
  if (sigma2 < 0.0) throw ConfigError("noise variance must be nonnegative");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Dataset data;
  data.X.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) data.X(i, j) = gauss(rng);
    const double norm = data.X.row(i).norm();
    if (norm > 0.0) data.X.row(i) /= norm;
  }
  data.clean.resize(n);
  data.y.resize(n);
  std::normal_distribution<double> noise(0.0, std::sqrt(sigma2));
  for (int i = 0; i < n; ++i) {
    switch (target) {
      case SphereTarget::SinCos:
        data.clean(i) = std::sin(data.X(i, 0)) +
                        0.5 * std::cos(d > 1 ? data.X(i, 1) : data.X(i, 0));
        break;
      case SphereTarget::Zero:
        data.clean(i) = 0.0;
        break;
    }
    data.y(i) = data.clean(i) + (sigma2 > 0.0 ? noise(rng) : 0.0);
  }
  return data;
}

Dataset load_csv_dataset(const std::string& path,
                         const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty dataset file '" + path + "'");
  std::vector<std::string> header;
  {
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) header.push_back(cell);
  }
  int label_idx = -1;
  for (int j = 0; j < static_cast<int>(header.size()); ++j) {
    if (header[j] == label_column) label_idx = j;
  }
  if (label_idx < 0) {
    throw ConfigError("label column '" + label_column + "' not found in '" +
                      path + "'");
  }
  const int width = static_cast<int>(header.size());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("non-numeric cell '" + cell + "' in '" + path + "'");
      }
    }
    if (static_cast<int>(vals.size()) != width) {
      throw ConfigError("ragged row in '" + path + "'");
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw ConfigError("no data rows in '" + path + "'");
  const int n = static_cast<int>(rows.size());
  Dataset data;
  data.X.resize(n, width - 1);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    int c = 0;
    for (int j = 0; j < width; ++j) {
      if (j == label_idx) {
        data.y(i) = rows[i][j];
      } else {
        data.X(i, c++) = rows[i][j];
      }
    }
  }
  return data;
}

void save_csv_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write dataset file '" + path + "'");
  const int d = static_cast<int>(data.X.cols());
  for (int j = 0; j < d; ++j) out << "x" << (j + 1) << ",";
  out << "y\n";
  char buf[64];
  for (int i = 0; i < data.X.rows(); ++i) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.X(i, j));
      out << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", data.y(i));
    out << buf << "\n";
  }
}

std::vector<int> fold_assignment(int n, int folds, std::uint64_t seed) {
  if (folds < 2 || folds > n) throw ConfigError("fold count must be in [2, N]");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(n);
  for (int i = 0; i < n; ++i) fold[order[i]] = i % folds;
  return fold;
}

void standardize_features(Matrix& train_x, Matrix& test_x) {
  if (train_x.cols() != test_x.cols()) {
    throw DimensionMismatch("train/test feature dimensions differ");
  }
  const double n = static_cast<double>(train_x.rows());
  for (Eigen::Index j = 0; j < train_x.cols(); ++j) {
    const double mean = train_x.col(j).mean();
    const double var = (train_x.col(j).array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
      train_x.col(j) = (train_x.col(j).array() - mean) / sd;
      test_x.col(j) = (test_x.col(j).array() - mean) / sd;
    } else {
      train_x.col(j).setZero();
      test_x.col(j).setZero();
    }
  }
}

}  // namespace ckrr
