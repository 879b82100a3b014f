// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters
//
// Subcommands: simulate (scenario -> files), estimate (measurements ->
// coefficients, optional SVG rendering), cv (hyperparameter selection),
// sweep (Monte Carlo parameter sweeps -> CSV).

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sfot/eval.hpp"
#include "sfot/io.hpp"
#include "sfot/svg.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    grid[i] = lo * std::pow(hi / lo, count > 1 ? static_cast<double>(i) / (count - 1) : 0.0);
  }
  return grid;
}

// Candidate order decides cross-validation tie-breaks: stronger
// regularization first (descending lambda/gamma, ascending eta).
std::vector<sfot::HyperParams> lambda_candidates(std::vector<double> lambdas) {
  std::sort(lambdas.rbegin(), lambdas.rend());
  std::vector<sfot::HyperParams> grid;
  for (double l : lambdas) {
    sfot::HyperParams h;
    h.lambda = l;
    grid.push_back(h);
  }
  return grid;
}

std::vector<sfot::HyperParams> ot_candidates(std::vector<double> gammas,
                                             std::vector<double> etas) {
  std::sort(gammas.rbegin(), gammas.rend());
  std::sort(etas.begin(), etas.end());
  std::vector<sfot::HyperParams> grid;
  for (double g : gammas) {
    for (double e : etas) {
      sfot::HyperParams h;
      h.gamma = g;
      h.eta = e;
      grid.push_back(h);
    }
  }
  return grid;
}

struct EstimateArgs {
  std::string measurements_path;
  std::string method = "tikhonov";
  std::string out_dir = ".";
  double lambda = 1e-2;
  double gamma = 0.1;
  double eta = 10.0;
  int phase_grid = 50;
  int num_waves = 50;
  double rel_gap = 1e-5;
  double feas_tol = 1e-7;
  int max_iters = 50000;
  bool render = false;
  int render_res = 96;
};

int run_estimate(const EstimateArgs& args) {
  const sfot::MeasurementSet measurements =
      sfot::read_measurements(args.measurements_path);
  const sfot::PlaneWaveDictionary dict = sfot::PlaneWaveDictionary::uniform(
      args.num_waves, measurements.frequency_hz,
      measurements.speed_of_sound_mps);

  sfot::MethodSpec spec;
  spec.method = sfot::method_from_name(args.method);
  spec.solver.rel_gap = args.rel_gap;
  spec.solver.feas_tol = args.feas_tol;
  spec.solver.max_iters = args.max_iters;
  sfot::HyperParams hypers;
  hypers.lambda = args.lambda;
  hypers.gamma = args.gamma;
  hypers.eta = args.eta;

  const sfot::CoefficientVector estimate = sfot::estimate_with_method(
      measurements, dict, spec, hypers, args.phase_grid);

  fs::create_directories(args.out_dir);
  sfot::EstimateFile file;
  file.method = args.method;
  file.hypers = hypers;
  file.dictionary = dict;
  file.coefficients = estimate;
  const fs::path estimate_path = fs::path(args.out_dir) / "estimate.json";
  sfot::write_estimate(estimate_path, file);
  std::cout << "wrote " << estimate_path.string() << "\n";

  if (args.render) {
    const sfot::Region region;  // 0.6 m x 0.6 m around the array
    const fs::path field_path = fs::path(args.out_dir) / "field.svg";
    const fs::path stems_path = fs::path(args.out_dir) / "coefficients.svg";
    sfot::render_field_svg(field_path, dict, estimate, region, args.render_res);
    sfot::render_coefficients_svg(stems_path, dict, estimate);
    std::cout << "wrote " << field_path.string() << "\n";
    std::cout << "wrote " << stems_path.string() << "\n";
  }
  return kExitOk;
}

int run_simulate(const std::string& config_path, const std::string& out_dir) {
  const sfot::ScenarioConfig config = sfot::read_scenario_config(config_path);
  auto [scene, measurements] = sfot::simulate_scenario(config);
  fs::create_directories(out_dir);
  const fs::path scenario_path = fs::path(out_dir) / "scenario.json";
  const fs::path measurements_path = fs::path(out_dir) / "measurements.json";
  sfot::write_scenario(scenario_path, scene, config);
  sfot::write_measurements(measurements_path, measurements);
  std::cout << "wrote " << scenario_path.string() << "\n";
  std::cout << "wrote " << measurements_path.string() << "\n";
  return kExitOk;
}

struct CvArgs {
  std::string measurements_path;
  std::string method = "lasso";
  std::vector<double> lambda_grid;
  std::vector<double> gamma_grid;
  std::vector<double> eta_grid;
  int folds = 3;
  int phase_grid = 50;
  int num_waves = 50;
  double rel_gap = 1e-5;
  double feas_tol = 1e-7;
  int max_iters = 50000;
};

int run_cv(const CvArgs& args) {
  const sfot::MeasurementSet measurements =
      sfot::read_measurements(args.measurements_path);
  const sfot::PlaneWaveDictionary dict = sfot::PlaneWaveDictionary::uniform(
      args.num_waves, measurements.frequency_hz,
      measurements.speed_of_sound_mps);

  sfot::MethodSpec spec;
  spec.method = sfot::method_from_name(args.method);
  spec.solver.rel_gap = args.rel_gap;
  spec.solver.feas_tol = args.feas_tol;
  spec.solver.max_iters = args.max_iters;

  const std::vector<double> default_grid = log_grid(1e-4, 1e2, 7);
  std::vector<sfot::HyperParams> grid;
  if (spec.method == sfot::Method::ot) {
    grid = ot_candidates(args.gamma_grid.empty() ? default_grid : args.gamma_grid,
                         args.eta_grid.empty() ? default_grid : args.eta_grid);
  } else {
    grid = lambda_candidates(args.lambda_grid.empty() ? default_grid
                                                      : args.lambda_grid);
  }

  const sfot::EstimatorFn fit = [&](const sfot::MeasurementSet& m,
                                    const sfot::PlaneWaveDictionary& d,
                                    const sfot::HyperParams& h) {
    return sfot::estimate_with_method(m, d, spec, h, args.phase_grid);
  };
  const sfot::HyperParams best =
      sfot::cross_validate(fit, measurements, dict, grid, args.folds);
  if (spec.method == sfot::Method::ot) {
    std::printf("best: gamma=%.17g eta=%.17g\n", best.gamma, best.eta);
  } else {
    std::printf("best: lambda=%.17g\n", best.lambda);
  }
  return kExitOk;
}

struct SweepArgs {
  std::string config_path;
  std::string out_path;
  std::string out_dir = ".";
  int threads = 0;          // 0 = value from config
  std::int64_t seed = -1;   // <0 = value from config
  bool timing = false;
};

int run_sweep(const SweepArgs& args) {
  sfot::RunConfig config = sfot::read_run_config(args.config_path);
  if (args.threads > 0) config.threads = args.threads;
  if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
  const bool timing = config.timing || args.timing;

  const std::vector<sfot::EvaluationReport> reports =
      sfot::monte_carlo(config.sweep, config.trials, config.seed, config.threads);

  fs::path out_path = args.out_path.empty()
                          ? fs::path(args.out_dir) / "sweep.csv"
                          : fs::path(args.out_path);
  if (out_path.has_parent_path()) {
    fs::create_directories(out_path.parent_path());
  }
  std::ofstream out(out_path);
  if (!out) {
    throw sfot::IoError("cannot write " + out_path.string());
  }
  sfot::write_csv(out, reports, timing);
  std::cout << "wrote " << out_path.string() << "\n";

  bool any_failed = false;
  for (const auto& report : reports) {
    if (report.failed) {
      any_failed = true;
      std::cerr << sfot::sweep_param_name(report.param) << "="
                << report.value << " " << sfot::method_name(report.method)
                << " FAILED: " << report.error << "\n";
    } else {
      std::printf("%s=%g %s: mean nmse %.6g (stderr %.3g, %zu trials)\n",
                  sfot::sweep_param_name(report.param).c_str(), report.value,
                  sfot::method_name(report.method).c_str(), report.mean_nmse,
                  report.stderr_nmse, report.trials.size());
    }
  }
  return any_failed ? kExitSolver : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sound-field estimation with optimal-transport barycenters"};
  app.require_subcommand(1);

  std::string sim_config, sim_out_dir = ".";
  auto* sim = app.add_subcommand("simulate",
                                 "draw a scenario and write scenario/measurement files");
  sim->add_option("--config", sim_config, "scenario config JSON")->required();
  sim->add_option("--out-dir", sim_out_dir, "output directory");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate",
                                      "estimate coefficients from a measurements file");
  estimate->add_option("--measurements", est.measurements_path, "measurements JSON")
      ->required();
  estimate->add_option("--method", est.method, "ot|tikhonov|lasso|ladlasso");
  estimate->add_option("--out-dir", est.out_dir, "output directory");
  estimate->add_option("--lambda", est.lambda, "baseline regularization weight");
  estimate->add_option("--gamma", est.gamma, "ground-cost mass penalty");
  estimate->add_option("--eta", est.eta, "data-fit weight");
  estimate->add_option("--phase-grid", est.phase_grid, "phase-circle nodes K");
  estimate->add_option("--num-waves", est.num_waves, "dictionary size L");
  estimate->add_option("--rel-gap", est.rel_gap, "solver relative gap");
  estimate->add_option("--feas-tol", est.feas_tol, "solver feasibility tolerance");
  estimate->add_option("--max-iters", est.max_iters, "solver iteration cap");
  estimate->add_flag("--render", est.render, "write field + coefficient SVGs");
  estimate->add_option("--render-res", est.render_res, "heatmap resolution");

  CvArgs cv;
  auto* cvcmd = app.add_subcommand("cv", "cross-validate hyperparameters");
  cvcmd->add_option("--measurements", cv.measurements_path, "measurements JSON")
      ->required();
  cvcmd->add_option("--method", cv.method, "ot|tikhonov|lasso|ladlasso");
  cvcmd->add_option("--lambda-grid", cv.lambda_grid, "candidate lambdas");
  cvcmd->add_option("--gamma-grid", cv.gamma_grid, "candidate gammas");
  cvcmd->add_option("--eta-grid", cv.eta_grid, "candidate etas");
  cvcmd->add_option("--folds", cv.folds, "cross-validation folds");
  cvcmd->add_option("--phase-grid", cv.phase_grid, "phase-circle nodes K");
  cvcmd->add_option("--num-waves", cv.num_waves, "dictionary size L");
  cvcmd->add_option("--rel-gap", cv.rel_gap, "solver relative gap");
  cvcmd->add_option("--feas-tol", cv.feas_tol, "solver feasibility tolerance");
  cvcmd->add_option("--max-iters", cv.max_iters, "solver iteration cap");

  SweepArgs sweep;
  auto* sweepcmd = app.add_subcommand("sweep", "Monte Carlo parameter sweep -> CSV");
  sweepcmd->add_option("--config", sweep.config_path, "run config JSON")->required();
  sweepcmd->add_option("--out", sweep.out_path, "output CSV path");
  sweepcmd->add_option("--out-dir", sweep.out_dir, "output directory");
  sweepcmd->add_option("--threads", sweep.threads, "worker threads");
  sweepcmd->add_option("--seed", sweep.seed, "master seed override");
  sweepcmd->add_flag("--timing", sweep.timing, "emit measured wall_ms in the CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(sim_config, sim_out_dir);
    if (estimate->parsed()) return run_estimate(est);
    if (cvcmd->parsed()) return run_cv(cv);
    if (sweepcmd->parsed()) return run_sweep(sweep);
  } catch (const sfot::ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kExitConfig;
  } catch (const sfot::ConvergenceError& ex) {
    std::cerr << "solver failure: " << ex.what() << "\n";
    return kExitSolver;
  } catch (const sfot::IoError& ex) {
    std::cerr << "io error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
