// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sfot/baselines.hpp"
#include "sfot/model.hpp"
#include "sfot/ot_solver.hpp"
#include "sfot/simulate.hpp"

namespace sfot {

enum class Method { ot, tikhonov, lasso, ladlasso };

std::string method_name(Method method);
Method method_from_name(const std::string& name);

/// One hyperparameter point; which fields matter depends on the method
/// (lambda for the baselines, gamma/eta for the transport estimator).
struct HyperParams {
  double lambda = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
};

struct EvalGrid {
  Region region;       // default 0.6 m x 0.6 m centered on the array
  int nx = 190;        // 190 x 190 = 36100 test points
  int ny = 190;
};

/// Field-domain normalized mean-squared error over the cell centers of the
/// evaluation grid. The reference field comes from the true (off-grid) waves
/// without phase perturbations; the estimate is expanded on the estimation
/// dictionary. Throws std::domain_error when the reference field vanishes on
/// the whole grid.
double nmse(const PlaneWaveDictionary& dict, const CoefficientVector& estimate,
            const GroundTruth& truth, const Region& region, int nx, int ny);

double nmse(const PlaneWaveDictionary& dict, const CoefficientVector& estimate,
            const GroundTruth& truth, const EvalGrid& grid = {});

using EstimatorFn = std::function<CoefficientVector(
    const MeasurementSet&, const PlaneWaveDictionary&, const HyperParams&)>;

/// Leave-sensors-out cross-validation: sensor i belongs to fold (i mod
/// folds); each candidate is fitted on the retained sensors and scored by the
/// total squared prediction error on the held-out pressures. Returns the
/// first candidate attaining the minimal score, so grids ordered from
/// stronger to weaker regularization break ties toward stronger.
HyperParams cross_validate(const EstimatorFn& estimator,
                           const MeasurementSet& measurements,
                           const PlaneWaveDictionary& dict,
                           const std::vector<HyperParams>& grid, int folds);

/// Sub-measurement restricted to the given sensor indices.
MeasurementSet subset_sensors(const MeasurementSet& measurements,
                              const std::vector<int>& indices);

struct MethodSpec {
  Method method = Method::tikhonov;
  std::vector<HyperParams> grid;  // single entry = no cross-validation
  SolverOptions solver;           // transport estimator only
  LassoOptions lasso_opts;
  LadLassoOptions lad_opts;
};

/// Fit one method at fixed hyperparameters.
CoefficientVector estimate_with_method(const MeasurementSet& measurements,
                                       const PlaneWaveDictionary& dict,
                                       const MethodSpec& spec,
                                       const HyperParams& hypers,
                                       int phase_grid_size);

enum class SweepParam { sigma_delta, num_sensors, frequency };

std::string sweep_param_name(SweepParam param);
SweepParam sweep_param_from_name(const std::string& name);

struct SweepSpec {
  SweepParam param = SweepParam::sigma_delta;
  std::vector<double> values;
  ScenarioConfig base;
  std::vector<MethodSpec> methods;
  int cv_folds = 3;
  int phase_grid_size = 50;
  EvalGrid eval;
};

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  double nmse = 0.0;
  HyperParams hypers;
  double wall_ms = 0.0;
  std::optional<std::string> error;
};

struct EvaluationReport {
  SweepParam param = SweepParam::sigma_delta;
  double value = 0.0;
  Method method = Method::tikhonov;
  std::vector<TrialResult> trials;
  double mean_nmse = 0.0;
  double stderr_nmse = 0.0;  // standard error of the mean
  bool failed = false;
  std::string error;
};

/// Runs `trials` independent scenarios per sweep point and method. Trial
/// seeds derive from the master seed through the documented splitting rule;
/// results are reduced in trial order, so output is identical for identical
/// (spec, trials, master_seed) regardless of thread count. A failed trial
/// marks its sweep point's reports as failed and is carried in the report.
std::vector<EvaluationReport> monte_carlo(const SweepSpec& spec, int trials,
                                          std::uint64_t master_seed,
                                          int threads = 1);

/// CSV with one row per (sweep point, method, trial). Timing is opt-in so
/// that default output is byte-identical across reruns.
void write_csv(std::ostream& out, const std::vector<EvaluationReport>& reports,
               bool include_timing = false);

}  // namespace sfot
