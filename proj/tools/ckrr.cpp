// Command-line front end: dataset generation, model fitting/prediction and the
// experiment sweeps, all driven by key=value config files plus --set overrides.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ckrr/cpd_solver.hpp"
#include "ckrr/datasets.hpp"
#include "ckrr/emit.hpp"
#include "ckrr/errors.hpp"
#include "ckrr/experiments.hpp"
#include "ckrr/fourier_fast.hpp"
#include "ckrr/risk_theory.hpp"
#include "ckrr/thermo.hpp"

namespace {

using ckrr::ConfigMap;

std::string get_str(const ConfigMap& map, const std::string& key,
                    const std::string& fallback = "") {
  const auto it = map.find(key);
  return it == map.end() ? fallback : it->second;
}

std::string require_str(const ConfigMap& map, const std::string& key) {
  const auto it = map.find(key);
  if (it == map.end() || it->second.empty()) {
    throw ckrr::ConfigError("missing required key '" + key + "'");
  }
  return it->second;
}

double get_double(const ConfigMap& map, const std::string& key, double fallback) {
  const auto it = map.find(key);
  if (it == map.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ckrr::ConfigError("key '" + key + "': expected a number, got '" +
                            it->second + "'");
  }
}

int get_int(const ConfigMap& map, const std::string& key, int fallback) {
  const double v = get_double(map, key, fallback);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw ckrr::ConfigError("key '" + key + "': expected an integer");
  }
  return i;
}

std::uint64_t get_seed(const ConfigMap& map) {
  return static_cast<std::uint64_t>(get_double(map, "seed", 0));
}

ckrr::KernelSpec kernel_from_map(const ConfigMap& map) {
  const std::string name = get_str(map, "kernel", "fourier_series");
  if (name == "fourier_series") {
    return ckrr::FourierSeriesKernel{get_double(map, "s", 1.0),
                                     get_int(map, "truncation", 300)};
  }
  if (name == "fourier_tail") {
    return ckrr::FourierTailKernel{get_double(map, "s", 1.0),
                                   get_int(map, "truncation", 300),
                                   get_int(map, "cutoff", 0)};
  }
  if (name == "gaussian") return ckrr::GaussianKernel{get_double(map, "gamma", 1.0)};
  if (name == "laplace") return ckrr::LaplaceKernel{get_double(map, "gamma", 1.0)};
  if (name == "matern32") {
    return ckrr::Matern32Kernel{get_double(map, "lengthscale", 1.0)};
  }
  if (name == "nngp_erf") {
    return ckrr::NngpErfKernel{get_double(map, "weight_variance", 1.0),
                               get_double(map, "bias_variance", 0.0)};
  }
  throw ckrr::ConfigError("unknown kernel '" + name + "'");
}

ckrr::Spectrum spectrum_from_map(const ConfigMap& map) {
  const std::string name = get_str(map, "spectrum", "power");
  const int J = get_int(map, "J", 1000);
  if (name == "power") return ckrr::Spectrum::power_law(get_double(map, "a", 2.0), J);
  if (name == "exp") return ckrr::Spectrum::exponential(get_double(map, "rate", 0.05), J);
  if (name == "fourier") return ckrr::Spectrum::fourier(get_double(map, "s", 1.0), J);
  throw ckrr::ConfigError("unknown spectrum '" + name + "' (power|exp|fourier)");
}

int run_gen(const ConfigMap& map) {
  const std::string family = get_str(map, "family", "fourier");
  const int n = get_int(map, "N", 100);
  const double sigma2 = get_double(map, "sigma2", 0.0);
  ckrr::Dataset data;
  if (family == "fourier") {
    data = ckrr::gen_fourier_dataset(
        n, ckrr::parse_fourier_target(require_str(map, "target")), sigma2,
        get_seed(map));
  } else if (family == "sphere") {
    data = ckrr::gen_sphere_dataset(
        n, get_int(map, "d", 3),
        ckrr::parse_sphere_target(get_str(map, "sphere_target", "sincos")), sigma2,
        get_seed(map));
  } else {
    throw ckrr::ConfigError("family must be fourier or sphere");
  }
  const std::string out = require_str(map, "out_csv");
  ckrr::save_csv_dataset(data, out);
  std::cout << "wrote " << n << " samples to " << out << "\n";
  return 0;
}

ckrr::FeatureBasis basis_from_map(const ConfigMap& map, const ckrr::KernelSpec& kernel,
                                  const ckrr::Matrix& X) {
  const std::string recipe = get_str(map, "basis", "none");
  const int k = get_int(map, "k", 0);
  if (recipe == "none" || k == 0) return ckrr::FeatureBasis{};
  if (recipe == "fourier_pairs") {
    return ckrr::FeatureBasis(ckrr::FourierPairsBasis{k});
  }
  if (recipe == "nystrom") {
    const auto nyst =
        ckrr::fit_nystrom(kernel, X, k, get_double(map, "drop_tol", 1e-10));
    if (nyst.retained < k) {
      throw ckrr::NumericalError("nystrom retained only " +
                                 std::to_string(nyst.retained) + " of " +
                                 std::to_string(k) + " requested eigenfunctions");
    }
    return nyst.basis;
  }
  if (recipe == "relu_units") {
    return ckrr::load_relu_units(require_str(map, "relu_units"));
  }
  throw ckrr::ConfigError("fit basis must be none, fourier_pairs, nystrom or relu_units");
}

int run_fit(const ConfigMap& map) {
  const ckrr::Dataset data = ckrr::load_csv_dataset(
      require_str(map, "data"), get_str(map, "label_column", "y"));
  const ckrr::KernelSpec kernel = kernel_from_map(map);
  const ckrr::FeatureBasis basis = basis_from_map(map, kernel, data.X);
  const double lambda = get_double(map, "lambda", 1e-2);
  const auto model = ckrr::fit(kernel, basis, data.X, data.y, lambda);
  const std::string out = require_str(map, "out_model");
  ckrr::save_model(model, out);
  const ckrr::Vector pred = ckrr::predict(model, data.X);
  std::cout << "fit N=" << data.X.rows() << " k=" << basis.dimension()
            << " lambda=" << ckrr::format_number(lambda) << " train_mse="
            << ckrr::format_number((pred - data.y).squaredNorm() / data.y.size())
            << "\nwrote model to " << out << "\n";
  return 0;
}

int run_predict(const ConfigMap& map) {
  const auto model = ckrr::load_model(require_str(map, "model"));
  const ckrr::Dataset data = ckrr::load_csv_dataset(
      require_str(map, "data"), get_str(map, "label_column", "y"));
  const ckrr::Vector pred = ckrr::predict(model, data.X);
  std::ostringstream out;
  out << "index,pred\n";
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    out << i << ',' << ckrr::format_number(pred(i)) << "\n";
  }
  const std::string path = require_str(map, "out_csv");
  ckrr::write_text_file(path, out.str());
  std::cout << "wrote " << pred.size() << " predictions to " << path << "\n";
  return 0;
}

int run_sweep(const ConfigMap& map,
              ckrr::SweepResult (*runner)(const ckrr::ExperimentConfig&)) {
  ConfigMap local = map;
  // CLI-only keys that make_experiment_config would reject.
  local.erase("family");
  const ckrr::ExperimentConfig cfg = ckrr::make_experiment_config(local);
  if (cfg.out_csv.empty()) throw ckrr::ConfigError("missing required key 'out_csv'");
  const ckrr::SweepResult result = runner(cfg);
  ckrr::emit_outputs(result, cfg.out_csv, cfg.out_svg);
  std::cout << "wrote " << result.rows.size() << " rows to " << cfg.out_csv << "\n";
  return 0;
}

int run_thermo(const ConfigMap& map) {
  const ckrr::Spectrum spec = spectrum_from_map(map);
  const int k = get_int(map, "k", 10);
  const int trials = get_int(map, "trials", 50);
  const int imax = get_int(map, "imax", 400);
  const auto est = ckrr::estimate_ratio(spec, k, trials, imax, get_seed(map),
                                        get_int(map, "threads", 1));
  const double c = ckrr::fit_c(est);
  std::ostringstream out;
  out << "mode_index,lambda_i,rho_mean,rho_stderr,g_i,fitted_c,kappa\n";
  for (Eigen::Index i = 0; i < est.rho.size(); ++i) {
    const double lam = spec.eigenvalues(i);
    const double g = est.kappa * est.kappa /
                     ((lam + est.kappa) * (lam + est.kappa));
    out << (i + 1) << ',' << ckrr::format_number(lam) << ','
        << ckrr::format_number(est.rho(i)) << ','
        << ckrr::format_number(est.stderrs(i)) << ',' << ckrr::format_number(g)
        << ',' << ckrr::format_number(c) << ',' << ckrr::format_number(est.kappa)
        << "\n";
  }
  const std::string path = require_str(map, "out_csv");
  ckrr::write_text_file(path, out.str());
  std::cout << "spectrum " << spec.generator << " k=" << k << " trials=" << trials
            << ": fitted c=" << ckrr::format_number(c)
            << " kappa=" << ckrr::format_number(est.kappa) << "; wrote " << path
            << "\n";
  return 0;
}

int run_risk(const ConfigMap& map) {
  const ckrr::Spectrum spec = spectrum_from_map(map);
  const int n = get_int(map, "N", 100);
  const double lambda = get_double(map, "lambda", 1e-2);
  const int k = get_int(map, "k", 0);
  ckrr::TargetCoeffs coeffs;
  coeffs.sigma2 = get_double(map, "sigma2", 0.0);
  {
    std::stringstream ss(get_str(map, "u", ""));
    std::vector<double> u;
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) u.push_back(std::stod(item));
    }
    coeffs.u = Eigen::Map<const Eigen::VectorXd>(u.data(), u.size());
  }
  const ckrr::RiskReport full = ckrr::predicted_mse(spec, coeffs, n, lambda, 0);
  const ckrr::RiskReport resid = ckrr::predicted_mse(spec, coeffs, n, lambda, k);
  const ckrr::AdvantageResult adv = ckrr::advantage_condition(
      spec, coeffs, n, lambda, k, get_double(map, "c_user", 1.0));
  std::ostringstream out;
  out << "kappa,e_noise,e_noise_resid,predicted_mse,lhs4,rhs4,holds\n"
      << ckrr::format_number(full.kappa) << ',' << ckrr::format_number(full.e_noise)
      << ',' << ckrr::format_number(resid.e_noise) << ','
      << ckrr::format_number(full.predicted_mse) << ','
      << ckrr::format_number(adv.lhs) << ','
      << ckrr::format_number(adv.rhs + adv.correction) << ','
      << (adv.holds ? 1 : 0) << "\n";
  const std::string path = require_str(map, "out_csv");
  ckrr::write_text_file(path, out.str());
  std::cout << "spectrum " << spec.generator << " N=" << n
            << " lambda=" << ckrr::format_number(lambda) << " k=" << k << "\n"
            << "  kappa             " << ckrr::format_number(full.kappa) << "\n"
            << "  overfitting coeff " << ckrr::format_number(full.e_noise)
            << " (residual kernel: " << ckrr::format_number(resid.e_noise) << ")\n"
            << "  predicted mse     " << ckrr::format_number(full.predicted_mse)
            << "\n"
            << "  advantage lhs     " << ckrr::format_number(adv.lhs) << "\n"
            << "  advantage rhs     "
            << ckrr::format_number(adv.rhs + adv.correction) << "\n"
            << "  conditioning on the first " << k << " modes is predicted to "
            << (adv.holds ? "help" : "hurt") << "\n"
            << "wrote " << path << "\n";
  return 0;
}

int run_nystrom(const ConfigMap& map) {
  const ckrr::Dataset data = ckrr::load_csv_dataset(
      require_str(map, "data"), get_str(map, "label_column", "y"));
  const ckrr::KernelSpec kernel = kernel_from_map(map);
  const int k = get_int(map, "k", 10);
  const auto nyst =
      ckrr::fit_nystrom(kernel, data.X, k, get_double(map, "drop_tol", 1e-10));
  const auto& basis = std::get<ckrr::NystromBasis>(nyst.basis.data());
  std::ostringstream out;
  out << "index,eigenvalue\n";
  for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i) {
    out << (i + 1) << ',' << ckrr::format_number(basis.eigenvalues(i)) << "\n";
  }
  const std::string path = require_str(map, "out_csv");
  ckrr::write_text_file(path, out.str());
  std::cout << "retained " << nyst.retained << " eigenvalues, kept "
            << basis.eigenvalues.size() << "; wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conditional kernel ridge regression toolkit"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const ConfigMap&);
  };
  const Sub subs[] = {
      {"gen", "generate a synthetic dataset CSV", run_gen},
      {"fit", "fit a conditional KRR model on a CSV dataset", run_fit},
      {"predict", "evaluate a saved model on a CSV dataset", run_predict},
      {"sweep-k", "test MSE vs unpenalized dimension k", nullptr},
      {"sweep-lambda", "test MSE vs ridge parameter", nullptr},
      {"cost", "cost-of-conditioning sweep", nullptr},
      {"thermo", "Monte-Carlo soft-thresholding ratio estimate", run_thermo},
      {"risk", "omniscient risk prediction and advantage report", run_risk},
      {"nystrom", "empirical kernel eigenvalues of a dataset", run_nystrom},
  };

  struct Parsed {
    std::string config_path;
    std::vector<std::string> sets;
    CLI::App* cmd = nullptr;
  };
  std::vector<Parsed> parsed(std::size(subs));
  for (std::size_t i = 0; i < std::size(subs); ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    cmd->add_option("--config", parsed[i].config_path, "key = value config file");
    cmd->add_option("--set", parsed[i].sets, "override: key=value (repeatable)");
    parsed[i].cmd = cmd;
  }

  try {
    app.parse(argc, argv);
    for (std::size_t i = 0; i < std::size(subs); ++i) {
      if (!parsed[i].cmd->parsed()) continue;
      ConfigMap map;
      if (!parsed[i].config_path.empty()) {
        map = ckrr::parse_config_file(parsed[i].config_path);
      }
      ckrr::apply_overrides(map, parsed[i].sets);
      const std::string name = subs[i].name;
      if (name == "sweep-k") return run_sweep(map, ckrr::run_k_sweep);
      if (name == "sweep-lambda") return run_sweep(map, ckrr::run_lambda_sweep);
      if (name == "cost") return run_sweep(map, ckrr::run_conditioning_cost);
      return subs[i].run(map);
    }
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ckrr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ckrr::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
