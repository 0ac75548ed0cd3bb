#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ckrr/datasets.hpp"
#include "ckrr/features.hpp"
#include "ckrr/kernels.hpp"

namespace ckrr {

using ConfigMap = std::map<std::string, std::string>;

// "key = value" lines, '#' comments, blank lines ignored.
ConfigMap parse_config_file(const std::string& path);
// Each entry is "key=value"; later entries win.
void apply_overrides(ConfigMap& config, const std::vector<std::string>& sets);

enum class BasisRecipe {
  FourierPairs,   // 1-d synthetic: low harmonics unpenalized
  Nystrom,        // tabular data, per-fold empirical eigenfunctions
  RandomFeature,  // sphere data, RFRR with random unpenalized features
  ReluUnits,      // sphere data, RFRR with imported ReLU units
  GaussianField,  // 1-d synthetic: random fields in the RKHS
};

struct ExperimentConfig {
  // Kernel family and parameters.
  std::string kernel = "fourier_series";
  double s = 1.0;
  int truncation = 300;
  double gamma = 1.0;
  double lengthscale = 1.0;
  double weight_variance = 1.0;
  double bias_variance = 0.0;

  BasisRecipe basis = BasisRecipe::FourierPairs;
  std::vector<int> k_grid{0};
  std::vector<double> lambda_grid{1e-2};
  std::vector<int> n_grid{100};
  std::vector<double> sigma2_grid{0.25};
  std::string axis = "N";  // swept axis of the cost pipeline

  FourierTarget target;            // 1-d synthetic family
  std::string sphere_target = "";  // "" = not a sphere run
  int sphere_dim = 3;

  std::string data_path;  // tabular CSV family
  std::string label_column = "y";
  bool standardize = false;
  int cv_folds = 0;

  int reps = 20;
  int test_size = 1000;
  std::uint64_t seed = 0;
  int threads = 1;

  Activation activation = Activation::Cos;
  int feature_count = 2000;  // penalized random features m
  OmegaScale omega_scale = OmegaScale::Identity;
  std::string relu_units_path;
  int field_modes = 0;  // harmonic count of the gaussian-field samples (0 = truncation)
  double drop_tol = 1e-10;

  std::string out_csv;
  std::string out_svg;
};

ExperimentConfig make_experiment_config(const ConfigMap& map);

struct SweepRow {
  std::string axis;
  double value = 0.0;
  double train_mse = 0.0;
  double test_mse = 0.0;
  double test_mse_ci95 = 0.0;
  double c_con = 0.0;  // NaN when not applicable
  double c_con_ci95 = 0.0;
  int reps = 0;  // successful repetitions; 0 marks a skipped cell
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

SweepResult run_conditioning_cost(const ExperimentConfig& config);
SweepResult run_k_sweep(const ExperimentConfig& config);
SweepResult run_lambda_sweep(const ExperimentConfig& config);

}  // namespace ckrr
