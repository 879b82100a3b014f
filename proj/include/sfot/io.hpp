// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#pragma once

#include <filesystem>
#include <string>

#include "sfot/errors.hpp"
#include "sfot/eval.hpp"
#include "sfot/simulate.hpp"

namespace sfot {

/// Everything cmd_sweep needs: base scenario, sweep axis, methods with their
/// hyperparameter grids, evaluation grid, trial count and master seed.
struct RunConfig {
  SweepSpec sweep;
  int trials = 30;
  std::uint64_t seed = 0;
  int threads = 1;
  bool timing = false;
};

struct EstimateFile {
  std::string method;
  HyperParams hypers;
  PlaneWaveDictionary dictionary;
  CoefficientVector coefficients;
};

// JSON round-trips are exact: floats are emitted with shortest
// round-trip-precision encoding, complex numbers as [re, im] pairs. All
// readers reject unknown keys and report the offending field path.

ScenarioConfig read_scenario_config(const std::filesystem::path& path);

void write_scenario(const std::filesystem::path& path, const Scene& scene,
                    const ScenarioConfig& config);
std::pair<Scene, ScenarioConfig> read_scenario(
    const std::filesystem::path& path);

void write_measurements(const std::filesystem::path& path,
                        const MeasurementSet& measurements);
MeasurementSet read_measurements(const std::filesystem::path& path);

void write_estimate(const std::filesystem::path& path,
                    const EstimateFile& estimate);
EstimateFile read_estimate(const std::filesystem::path& path);

RunConfig read_run_config(const std::filesystem::path& path);

}  // namespace sfot
