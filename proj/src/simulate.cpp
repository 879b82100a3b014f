// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#include "sfot/simulate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sfot {

namespace {
constexpr double kPi = std::numbers::pi;
}

void ScenarioConfig::validate() const {
  if (num_true_waves < 1) {
    throw std::domain_error("ScenarioConfig: num_true_waves must be >= 1");
  }
  if (num_sensors < 1) {
    throw std::domain_error("ScenarioConfig: num_sensors must be >= 1");
  }
  if (!(frequency_hz > 0.0) || !(speed_of_sound_mps > 0.0)) {
    throw std::domain_error("ScenarioConfig: frequency and speed must be positive");
  }
  if (!(array_radius_m > 0.0)) {
    throw std::domain_error("ScenarioConfig: array radius must be positive");
  }
  if (sigma_delta_rad < 0.0) {
    throw std::domain_error("ScenarioConfig: sigma_delta must be >= 0");
  }
  if (estimation_grid_size < 1) {
    throw std::domain_error("ScenarioConfig: estimation_grid_size must be >= 1");
  }
}

Scene draw_scenario(const ScenarioConfig& config, Rng& rng) {
  config.validate();
  const int T = config.num_true_waves;
  const int Q = config.num_sensors;

  GroundTruth truth;
  truth.true_directions_rad.resize(T);
  for (int l = 0; l < T; ++l) {
    truth.true_directions_rad[l] = rng.uniform(-kPi, kPi);
  }
  truth.true_amplitudes.resize(T);
  for (int l = 0; l < T; ++l) {
    const double modulus = std::abs(rng.normal());
    const double phase = rng.uniform(-kPi, kPi);
    truth.true_amplitudes[l] = std::polar(modulus, phase);
  }
  truth.perturbations_rad.resize(Q, T);
  for (int q = 0; q < Q; ++q) {
    for (int l = 0; l < T; ++l) {
      truth.perturbations_rad(q, l) = rng.normal(config.sigma_delta_rad);
    }
  }

  Scene scene;
  scene.truth = std::move(truth);
  scene.array = SensorArray::circular(Q, config.array_radius_m);
  scene.dictionary = PlaneWaveDictionary::uniform(
      config.estimation_grid_size, config.frequency_hz, config.speed_of_sound_mps);
  return scene;
}

Eigen::VectorXcd noise_free_measurements(const GroundTruth& truth,
                                         const SensorArray& array,
                                         double frequency_hz,
                                         double speed_mps) {
  const int Q = array.size();
  const int T = truth.num_waves();
  if (truth.true_directions_rad.size() != T ||
      truth.perturbations_rad.rows() != Q ||
      truth.perturbations_rad.cols() != T) {
    throw std::invalid_argument("noise_free_measurements: dimension mismatch");
  }
  const double k = wavenumber(frequency_hz, speed_mps);
  Eigen::VectorXcd pressures(Q);
  for (int q = 0; q < Q; ++q) {
    Complex p{0.0, 0.0};
    for (int l = 0; l < T; ++l) {
      const Point2 n{std::cos(truth.true_directions_rad[l]),
                     std::sin(truth.true_directions_rad[l])};
      const double phase =
          -k * n.dot(array.positions_m[q]) + truth.perturbations_rad(q, l);
      p += std::polar(1.0, phase) * truth.true_amplitudes[l];
    }
    pressures[q] = p;
  }
  return pressures;
}

double calibrate_noise_sigma(const Eigen::VectorXcd& noise_free, double snr_db) {
  if (noise_free.size() == 0) {
    throw std::invalid_argument("calibrate_noise_sigma: empty pressures");
  }
  const double mean_power = noise_free.squaredNorm() / noise_free.size();
  if (!(mean_power > 0.0)) {
    throw std::domain_error("calibrate_noise_sigma: all pressures are zero");
  }
  return std::sqrt(mean_power / std::pow(10.0, snr_db / 10.0));
}

MeasureResult measure(const GroundTruth& truth, const SensorArray& array,
                      double frequency_hz, double speed_mps, double snr_db,
                      Rng& rng) {
  const Eigen::VectorXcd clean =
      noise_free_measurements(truth, array, frequency_hz, speed_mps);
  const double sigma_eps = calibrate_noise_sigma(clean, snr_db);

  MeasureResult result;
  result.noise.resize(clean.size());
  for (int q = 0; q < clean.size(); ++q) {
    result.noise[q] = rng.complex_normal(sigma_eps);
  }
  result.sigma_eps = sigma_eps;
  result.measurements.pressures = clean + result.noise;
  result.measurements.array = array;
  result.measurements.frequency_hz = frequency_hz;
  result.measurements.speed_of_sound_mps = speed_mps;
  result.measurements.provenance.sigma_eps = sigma_eps;
  result.measurements.provenance.snr_db = snr_db;
  return result;
}

std::pair<Scene, MeasurementSet> simulate_scenario(const ScenarioConfig& config) {
  Rng rng(config.rng_seed);
  Scene scene = draw_scenario(config, rng);
  MeasureResult measured =
      measure(scene.truth, scene.array, config.frequency_hz,
              config.speed_of_sound_mps, config.snr_db, rng);
  scene.truth.noise = measured.noise;
  scene.truth.sigma_eps = measured.sigma_eps;
  measured.measurements.provenance.rng_seed = config.rng_seed;
  measured.measurements.provenance.sigma_delta_rad = config.sigma_delta_rad;
  return {std::move(scene), std::move(measured.measurements)};
}

}  // namespace sfot
