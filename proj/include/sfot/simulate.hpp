// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#pragma once

#include <cstdint>

#include "sfot/model.hpp"
#include "sfot/rng.hpp"

namespace sfot {

struct ScenarioConfig {
  int num_true_waves = 3;
  double frequency_hz = 1000.0;
  double speed_of_sound_mps = 343.0;
  double array_radius_m = 0.25;
  int num_sensors = 9;
  double sigma_delta_rad = 0.0;
  double snr_db = 15.0;
  std::uint64_t rng_seed = 0;
  int estimation_grid_size = 50;

  void validate() const;  // throws std::domain_error on bad fields
};

/// The waves that physically exist in a simulated scene, together with the
/// per-sensor phase perturbations attached to them. Directions are continuous
/// (generally off the estimation grid). `noise` and `sigma_eps` are filled
/// once measurements have been synthesized.
struct GroundTruth {
  Eigen::VectorXd true_directions_rad;  // T entries
  Eigen::VectorXcd true_amplitudes;     // T entries
  Eigen::MatrixXd perturbations_rad;    // Q x T, entry (q, l) applied to wave l at sensor q
  Eigen::VectorXcd noise;               // Q entries, empty before measurement
  double sigma_eps = 0.0;

  int num_waves() const { return static_cast<int>(true_amplitudes.size()); }
};

struct Provenance {
  std::uint64_t rng_seed = 0;
  double sigma_delta_rad = 0.0;
  double sigma_eps = 0.0;
  double snr_db = 0.0;
};

struct MeasurementSet {
  Eigen::VectorXcd pressures;  // Q entries
  SensorArray array;
  double frequency_hz = 0.0;
  double speed_of_sound_mps = 343.0;
  Provenance provenance;

  int size() const { return static_cast<int>(pressures.size()); }
};

struct Scene {
  GroundTruth truth;
  SensorArray array;
  PlaneWaveDictionary dictionary;  // estimation grid, separate from the truth
};

/// Draws the ground truth: incident angles uniform on [-pi, pi), amplitude
/// moduli |N(0,1)| with phases uniform on [-pi, pi), perturbations
/// Delta(q, l) ~ N(0, sigma_delta^2) i.i.d. Draw order is directions,
/// then (modulus, phase) per wave, then Delta row-major by sensor.
Scene draw_scenario(const ScenarioConfig& config, Rng& rng);

/// Perturbed but noise-free pressures: entry q is
/// sum_l exp(-i*k*n_l.r_q) * exp(i*Delta(q, l)) * alpha_l over the true waves.
Eigen::VectorXcd noise_free_measurements(const GroundTruth& truth,
                                         const SensorArray& array,
                                         double frequency_hz,
                                         double speed_mps);

/// Noise level for a target SNR: sigma_eps^2 = mean_q |p_q|^2 / 10^(snr/10).
/// Throws std::domain_error when all pressures vanish.
double calibrate_noise_sigma(const Eigen::VectorXcd& noise_free, double snr_db);

struct MeasureResult {
  MeasurementSet measurements;
  Eigen::VectorXcd noise;  // the epsilon draws, one per sensor
  double sigma_eps = 0.0;
};

/// Adds calibrated circularly-symmetric complex Gaussian noise to the
/// noise-free pressures. Provenance carries sigma_eps and snr_db; the caller
/// owns seed/sigma_delta bookkeeping.
MeasureResult measure(const GroundTruth& truth, const SensorArray& array,
                      double frequency_hz, double speed_mps, double snr_db,
                      Rng& rng);

/// One-shot driver: draw_scenario + measure with the config seed, recording
/// noise draws and provenance. Identical configs give bit-identical output.
std::pair<Scene, MeasurementSet> simulate_scenario(const ScenarioConfig& config);

}  // namespace sfot
