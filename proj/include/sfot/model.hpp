// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace sfot {

using Complex = std::complex<double>;
using Point2 = Eigen::Vector2d;

/// Wavenumber k = 2*pi*f/c. Throws std::domain_error for non-positive input.
double wavenumber(double frequency_hz, double speed_mps);

/// Axis-aligned evaluation rectangle.
struct Region {
  double xmin = -0.3;
  double xmax = 0.3;
  double ymin = -0.3;
  double ymax = 0.3;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

/// Plane-wave expansion basis. Directions are strictly increasing angles in
/// [-pi, pi); the wavenumber is always 2*pi*f/c for the stored frequency.
struct PlaneWaveDictionary {
  double frequency_hz = 0.0;
  double speed_of_sound_mps = 343.0;
  double wavenumber_radpm = 0.0;
  Eigen::VectorXd directions_rad;

  /// L directions uniform on [-pi, pi): theta_l = -pi + 2*pi*l/L.
  static PlaneWaveDictionary uniform(int num_waves, double frequency_hz,
                                     double speed_mps = 343.0);
  /// Explicit directions; validates ordering and range.
  static PlaneWaveDictionary from_directions(Eigen::VectorXd directions_rad,
                                             double frequency_hz,
                                             double speed_mps = 343.0);

  int size() const { return static_cast<int>(directions_rad.size()); }
  Point2 direction_unit(int ell) const {
    return {std::cos(directions_rad[ell]), std::sin(directions_rad[ell])};
  }
};

/// Complex expansion amplitudes, one per dictionary direction.
struct CoefficientVector {
  Eigen::VectorXcd values;

  int size() const { return static_cast<int>(values.size()); }
};

struct SensorArray {
  std::vector<Point2> positions_m;

  /// Q sensors equally spaced on a circle of the given radius, sensor q at
  /// angle 2*pi*q/Q (starting on the positive x-axis).
  static SensorArray circular(int num_sensors, double radius_m);

  int size() const { return static_cast<int>(positions_m.size()); }
};

/// Steering vector at r: entry l is exp(-i*k*n_l.r). All entries have unit
/// modulus.
Eigen::VectorXcd steering_vector(const PlaneWaveDictionary& dict,
                                 const Point2& r);

/// Field of a raw wave set: sum_l a_l * exp(-i*k*n(theta_l).r). Used for
/// off-grid ground truth, where the angles need not satisfy dictionary
/// invariants.
Complex field_pressure_waves(const Eigen::VectorXd& directions_rad,
                             const Eigen::VectorXcd& amplitudes, double k,
                             const Point2& r);

/// p(r) = sum_l g_l(r) * alpha_l (plain bilinear pairing, no conjugation).
Complex field_pressure(const PlaneWaveDictionary& dict,
                       const CoefficientVector& coeffs, const Point2& r);

/// Field sampled at the cell centers of an nx-by-ny uniform grid over the
/// region; entry (i, j) is the node at x-index i, y-index j.
Eigen::MatrixXcd field_grid(const PlaneWaveDictionary& dict,
                            const CoefficientVector& coeffs,
                            const Region& region, int nx, int ny);

}  // namespace sfot
