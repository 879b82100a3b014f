// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#include "sfot/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sfot {

namespace {
constexpr double kPi = std::numbers::pi;
}

double wavenumber(double frequency_hz, double speed_mps) {
  if (!(frequency_hz > 0.0) || !(speed_mps > 0.0)) {
    throw std::domain_error("wavenumber: frequency and speed must be positive");
  }
  return 2.0 * kPi * frequency_hz / speed_mps;
}

PlaneWaveDictionary PlaneWaveDictionary::uniform(int num_waves,
                                                 double frequency_hz,
                                                 double speed_mps) {
  if (num_waves < 1) {
    throw std::domain_error("PlaneWaveDictionary: need at least one direction");
  }
  Eigen::VectorXd dirs(num_waves);
  for (int l = 0; l < num_waves; ++l) {
    dirs[l] = -kPi + 2.0 * kPi * l / num_waves;
  }
  return from_directions(std::move(dirs), frequency_hz, speed_mps);
}

PlaneWaveDictionary PlaneWaveDictionary::from_directions(
    Eigen::VectorXd directions_rad, double frequency_hz, double speed_mps) {
  if (directions_rad.size() < 1) {
    throw std::domain_error("PlaneWaveDictionary: need at least one direction");
  }
  for (int l = 0; l < directions_rad.size(); ++l) {
    if (!(directions_rad[l] >= -kPi && directions_rad[l] < kPi)) {
      throw std::domain_error("PlaneWaveDictionary: direction outside [-pi, pi)");
    }
    if (l > 0 && !(directions_rad[l] > directions_rad[l - 1])) {
      throw std::domain_error(
          "PlaneWaveDictionary: directions must be strictly increasing");
    }
  }
  PlaneWaveDictionary dict;
  dict.frequency_hz = frequency_hz;
  dict.speed_of_sound_mps = speed_mps;
  dict.wavenumber_radpm = wavenumber(frequency_hz, speed_mps);
  dict.directions_rad = std::move(directions_rad);
  return dict;
}

SensorArray SensorArray::circular(int num_sensors, double radius_m) {
  if (num_sensors < 1) {
    throw std::domain_error("SensorArray: need at least one sensor");
  }
  if (!(radius_m > 0.0) || !std::isfinite(radius_m)) {
    throw std::domain_error("SensorArray: radius must be positive and finite");
  }
  SensorArray array;
  array.positions_m.reserve(num_sensors);
  for (int q = 0; q < num_sensors; ++q) {
    const double phi = 2.0 * kPi * q / num_sensors;
    array.positions_m.emplace_back(radius_m * std::cos(phi),
                                   radius_m * std::sin(phi));
  }
  return array;
}

Eigen::VectorXcd steering_vector(const PlaneWaveDictionary& dict,
                                 const Point2& r) {
  if (!r.allFinite()) {
    throw std::domain_error("steering_vector: point must be finite");
  }
  const int L = dict.size();
  const double k = dict.wavenumber_radpm;
  Eigen::VectorXcd g(L);
  for (int l = 0; l < L; ++l) {
    const double phase = -k * dict.direction_unit(l).dot(r);
    g[l] = std::polar(1.0, phase);
  }
  return g;
}

Complex field_pressure_waves(const Eigen::VectorXd& directions_rad,
                             const Eigen::VectorXcd& amplitudes, double k,
                             const Point2& r) {
  if (directions_rad.size() != amplitudes.size()) {
    throw std::invalid_argument("field_pressure_waves: size mismatch");
  }
  Complex p{0.0, 0.0};
  for (int l = 0; l < directions_rad.size(); ++l) {
    const Point2 n{std::cos(directions_rad[l]), std::sin(directions_rad[l])};
    p += amplitudes[l] * std::polar(1.0, -k * n.dot(r));
  }
  return p;
}

Complex field_pressure(const PlaneWaveDictionary& dict,
                       const CoefficientVector& coeffs, const Point2& r) {
  if (coeffs.size() != dict.size()) {
    throw std::invalid_argument("field_pressure: coefficient length mismatch");
  }
  return field_pressure_waves(dict.directions_rad, coeffs.values,
                              dict.wavenumber_radpm, r);
}

Eigen::MatrixXcd field_grid(const PlaneWaveDictionary& dict,
                            const CoefficientVector& coeffs,
                            const Region& region, int nx, int ny) {
  if (nx < 1 || ny < 1) {
    throw std::domain_error("field_grid: resolution must be at least 1x1");
  }
  if (!(region.width() > 0.0) || !(region.height() > 0.0)) {
    throw std::domain_error("field_grid: empty region");
  }
  if (coeffs.size() != dict.size()) {
    throw std::invalid_argument("field_grid: coefficient length mismatch");
  }
  const double dx = region.width() / nx;
  const double dy = region.height() / ny;
  Eigen::MatrixXcd field(nx, ny);
  for (int i = 0; i < nx; ++i) {
    const double x = region.xmin + (i + 0.5) * dx;
    for (int j = 0; j < ny; ++j) {
      const double y = region.ymin + (j + 0.5) * dy;
      field(i, j) = field_pressure(dict, coeffs, {x, y});
    }
  }
  return field;
}

}  // namespace sfot
