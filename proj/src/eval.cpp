// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#include "sfot/eval.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace sfot {

std::string method_name(Method method) {
  switch (method) {
    case Method::ot: return "ot";
    case Method::tikhonov: return "tikhonov";
    case Method::lasso: return "lasso";
    case Method::ladlasso: return "ladlasso";
  }
  throw std::logic_error("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
  if (name == "ot") return Method::ot;
  if (name == "tikhonov") return Method::tikhonov;
  if (name == "lasso") return Method::lasso;
  if (name == "ladlasso") return Method::ladlasso;
  throw ConfigError("unknown method '" + name +
                    "' (expected ot|tikhonov|lasso|ladlasso)");
}

std::string sweep_param_name(SweepParam param) {
  switch (param) {
    case SweepParam::sigma_delta: return "sigma_delta";
    case SweepParam::num_sensors: return "num_sensors";
    case SweepParam::frequency: return "frequency";
  }
  throw std::logic_error("sweep_param_name: unknown parameter");
}

SweepParam sweep_param_from_name(const std::string& name) {
  if (name == "sigma_delta") return SweepParam::sigma_delta;
  if (name == "num_sensors") return SweepParam::num_sensors;
  if (name == "frequency") return SweepParam::frequency;
  throw ConfigError("unknown sweep parameter '" + name +
                    "' (expected sigma_delta|num_sensors|frequency)");
}

double nmse(const PlaneWaveDictionary& dict, const CoefficientVector& estimate,
            const GroundTruth& truth, const Region& region, int nx, int ny) {
  if (nx < 1 || ny < 1) {
    throw std::domain_error("nmse: resolution must be at least 1x1");
  }
  if (estimate.size() != dict.size()) {
    throw std::invalid_argument("nmse: estimate/dictionary size mismatch");
  }
  const double k = dict.wavenumber_radpm;
  const double dx = region.width() / nx;
  const double dy = region.height() / ny;
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double x = region.xmin + (i + 0.5) * dx;
    for (int j = 0; j < ny; ++j) {
      const Point2 r{x, region.ymin + (j + 0.5) * dy};
      const Complex reference = field_pressure_waves(
          truth.true_directions_rad, truth.true_amplitudes, k, r);
      const Complex predicted = field_pressure(dict, estimate, r);
      num += std::norm(predicted - reference);
      den += std::norm(reference);
    }
  }
  if (!(den > 0.0)) {
    throw std::domain_error("nmse: reference field vanishes on the grid");
  }
  return num / den;
}

double nmse(const PlaneWaveDictionary& dict, const CoefficientVector& estimate,
            const GroundTruth& truth, const EvalGrid& grid) {
  return nmse(dict, estimate, truth, grid.region, grid.nx, grid.ny);
}

MeasurementSet subset_sensors(const MeasurementSet& measurements,
                              const std::vector<int>& indices) {
  MeasurementSet sub;
  sub.pressures.resize(indices.size());
  sub.array.positions_m.reserve(indices.size());
  for (size_t i = 0; i < indices.size(); ++i) {
    sub.pressures[static_cast<int>(i)] = measurements.pressures[indices[i]];
    sub.array.positions_m.push_back(measurements.array.positions_m[indices[i]]);
  }
  sub.frequency_hz = measurements.frequency_hz;
  sub.speed_of_sound_mps = measurements.speed_of_sound_mps;
  sub.provenance = measurements.provenance;
  return sub;
}

HyperParams cross_validate(const EstimatorFn& estimator,
                           const MeasurementSet& measurements,
                           const PlaneWaveDictionary& dict,
                           const std::vector<HyperParams>& grid, int folds) {
  const int Q = measurements.size();
  if (folds < 2 || folds > Q) {
    throw std::invalid_argument(
        "cross_validate: need 2 <= folds <= number of sensors");
  }
  if (grid.empty()) {
    throw std::invalid_argument("cross_validate: empty hyperparameter grid");
  }
  if (grid.size() == 1) {
    return grid.front();
  }

  // Fold membership: sensor i in fold (i mod folds).
  std::vector<std::vector<int>> held(folds), kept(folds);
  for (int i = 0; i < Q; ++i) {
    for (int f = 0; f < folds; ++f) {
      (i % folds == f ? held[f] : kept[f]).push_back(i);
    }
  }

  double best_score = 0.0;
  int best = -1;
  for (size_t c = 0; c < grid.size(); ++c) {
    double score = 0.0;
    for (int f = 0; f < folds; ++f) {
      const MeasurementSet train = subset_sensors(measurements, kept[f]);
      const CoefficientVector fit = estimator(train, dict, grid[c]);
      for (int i : held[f]) {
        const Complex predicted =
            steering_vector(dict, measurements.array.positions_m[i])
                .cwiseProduct(fit.values)
                .sum();
        score += std::norm(predicted - measurements.pressures[i]);
      }
    }
    if (best < 0 || score < best_score) {  // strict: first minimum wins
      best_score = score;
      best = static_cast<int>(c);
    }
  }
  return grid[best];
}

CoefficientVector estimate_with_method(const MeasurementSet& measurements,
                                       const PlaneWaveDictionary& dict,
                                       const MethodSpec& spec,
                                       const HyperParams& hypers,
                                       int phase_grid_size) {
  const SensingMatrix sensing = build_sensing_matrix(dict, measurements.array);
  switch (spec.method) {
    case Method::tikhonov:
      return tikhonov(sensing.G, measurements.pressures, hypers.lambda);
    case Method::lasso:
      return lasso(sensing.G, measurements.pressures, hypers.lambda,
                   spec.lasso_opts);
    case Method::ladlasso:
      return lad_lasso(sensing.G, measurements.pressures, hypers.lambda,
                       spec.lad_opts);
    case Method::ot:
      return estimate_ot(measurements, dict, make_phase_grid(phase_grid_size),
                         hypers.gamma, hypers.eta, spec.solver);
  }
  throw std::logic_error("estimate_with_method: unknown method");
}

namespace {

ScenarioConfig config_for_point(const SweepSpec& spec, double value) {
  ScenarioConfig config = spec.base;
  switch (spec.param) {
    case SweepParam::sigma_delta:
      config.sigma_delta_rad = value;
      break;
    case SweepParam::num_sensors:
      config.num_sensors = static_cast<int>(std::lround(value));
      break;
    case SweepParam::frequency:
      config.frequency_hz = value;
      break;
  }
  return config;
}

TrialResult run_trial(const SweepSpec& spec, const MethodSpec& method,
                      const ScenarioConfig& config, int trial,
                      std::uint64_t seed) {
  TrialResult result;
  result.trial = trial;
  result.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    ScenarioConfig trial_config = config;
    trial_config.rng_seed = seed;
    auto [scene, measurements] = simulate_scenario(trial_config);

    const EstimatorFn fit = [&](const MeasurementSet& m,
                                const PlaneWaveDictionary& d,
                                const HyperParams& h) {
      return estimate_with_method(m, d, method, h, spec.phase_grid_size);
    };
    const HyperParams chosen =
        method.grid.size() > 1
            ? cross_validate(fit, measurements, scene.dictionary, method.grid,
                             spec.cv_folds)
            : method.grid.front();
    const CoefficientVector estimate =
        fit(measurements, scene.dictionary, chosen);
    result.hypers = chosen;
    result.nmse = nmse(scene.dictionary, estimate, scene.truth, spec.eval);
  } catch (const std::exception& ex) {
    result.error = ex.what();
  }
  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return result;
}

}  // namespace

std::vector<EvaluationReport> monte_carlo(const SweepSpec& spec, int trials,
                                          std::uint64_t master_seed,
                                          int threads) {
  if (trials < 1) {
    throw std::invalid_argument("monte_carlo: trials must be >= 1");
  }
  if (spec.values.empty() || spec.methods.empty()) {
    throw std::invalid_argument("monte_carlo: empty sweep values or methods");
  }
  for (const auto& method : spec.methods) {
    if (method.grid.empty()) {
      throw std::invalid_argument("monte_carlo: method with empty grid");
    }
  }

  struct Task {
    int point;
    int method;
    int trial;
  };
  std::vector<Task> tasks;
  const int P = static_cast<int>(spec.values.size());
  const int M = static_cast<int>(spec.methods.size());
  for (int p = 0; p < P; ++p) {
    for (int m = 0; m < M; ++m) {
      for (int t = 0; t < trials; ++t) {
        tasks.push_back({p, m, t});
      }
    }
  }

  // Slot-addressed results: identical reduction order for any thread count.
  std::vector<TrialResult> results(tasks.size());
  std::atomic<size_t> cursor{0};
  const auto worker = [&] {
    while (true) {
      const size_t idx = cursor.fetch_add(1);
      if (idx >= tasks.size()) break;
      const Task& task = tasks[idx];
      const ScenarioConfig config = config_for_point(spec, spec.values[task.point]);
      // One scenario per (point, trial): methods see identical data.
      const std::uint64_t seed = Rng::derive_seed(
          Rng::derive_seed(master_seed, static_cast<std::uint64_t>(task.point)),
          static_cast<std::uint64_t>(task.trial));
      results[idx] =
          run_trial(spec, spec.methods[task.method], config, task.trial, seed);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<EvaluationReport> reports;
  reports.reserve(static_cast<size_t>(P) * M);
  for (int p = 0; p < P; ++p) {
    for (int m = 0; m < M; ++m) {
      EvaluationReport report;
      report.param = spec.param;
      report.value = spec.values[p];
      report.method = spec.methods[m].method;
      for (size_t idx = 0; idx < tasks.size(); ++idx) {
        if (tasks[idx].point == p && tasks[idx].method == m) {
          report.trials.push_back(results[idx]);
        }
      }
      double sum = 0.0, sum_sq = 0.0;
      int ok = 0;
      for (const auto& trial : report.trials) {
        if (trial.error) {
          report.failed = true;
          if (report.error.empty()) {
            report.error =
                "trial " + std::to_string(trial.trial) + ": " + *trial.error;
          }
        } else {
          sum += trial.nmse;
          sum_sq += trial.nmse * trial.nmse;
          ++ok;
        }
      }
      if (ok > 0 && !report.failed) {
        report.mean_nmse = sum / ok;
        if (ok > 1) {
          const double var =
              std::max(0.0, (sum_sq - sum * sum / ok) / (ok - 1));
          report.stderr_nmse = std::sqrt(var / ok);
        }
      }
      reports.push_back(std::move(report));
    }
  }
  return reports;
}

void write_csv(std::ostream& out, const std::vector<EvaluationReport>& reports,
               bool include_timing) {
  const auto fmt = [](double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return std::string(buffer);
  };
  out << "sweep_param,value,method,trial,nmse,lambda_or_gamma,eta,seed,wall_ms\n";
  for (const auto& report : reports) {
    for (const auto& trial : report.trials) {
      if (trial.error) continue;
      const double lambda_or_gamma = report.method == Method::ot
                                         ? trial.hypers.gamma
                                         : trial.hypers.lambda;
      const double eta = report.method == Method::ot ? trial.hypers.eta : 0.0;
      out << sweep_param_name(report.param) << ',' << fmt(report.value) << ','
          << method_name(report.method) << ',' << trial.trial << ','
          << fmt(trial.nmse) << ',' << fmt(lambda_or_gamma) << ',' << fmt(eta)
          << ',' << trial.seed << ','
          << (include_timing ? fmt(trial.wall_ms) : "0") << '\n';
    }
  }
}

}  // namespace sfot
