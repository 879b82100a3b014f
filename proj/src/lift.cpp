// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#include "sfot/lift.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sfot {

namespace {

constexpr double kPi = std::numbers::pi;

// Wraps an angle difference into [-pi, pi].
double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

}  // namespace

PhaseGrid make_phase_grid(int num_nodes) {
  if (num_nodes < 2) {
    throw std::domain_error("make_phase_grid: need at least two nodes");
  }
  PhaseGrid grid;
  grid.nodes_rad.resize(num_nodes);
  for (int k = 0; k < num_nodes; ++k) {
    grid.nodes_rad[k] = -kPi + 2.0 * kPi * k / num_nodes;
  }
  return grid;
}

GroundCost make_ground_cost(const PhaseGrid& grid, double gamma) {
  if (!(gamma > 0.0)) {
    throw std::domain_error("make_ground_cost: gamma must be positive");
  }
  const int K = grid.size();
  GroundCost cost;
  cost.gamma = gamma;
  cost.matrix.resize(K, K);
  for (int j = 0; j < K; ++j) {
    for (int k = 0; k < K; ++k) {
      cost.matrix(j, k) =
          2.0 - 2.0 * std::cos(grid.nodes_rad[j] - grid.nodes_rad[k]) + gamma;
    }
  }
  return cost;
}

DiscreteMeasure lift_coefficient(Complex alpha, const PhaseGrid& grid) {
  DiscreteMeasure measure;
  measure.masses = Eigen::VectorXd::Zero(grid.size());
  const double modulus = std::abs(alpha);
  if (modulus == 0.0) {
    return measure;
  }
  const double phase = std::arg(alpha);
  int best = 0;
  double best_dist = std::abs(wrap_angle(phase - grid.nodes_rad[0]));
  for (int k = 1; k < grid.size(); ++k) {
    const double dist = std::abs(wrap_angle(phase - grid.nodes_rad[k]));
    if (dist < best_dist) {  // strict: ties keep the lower index
      best_dist = dist;
      best = k;
    }
  }
  measure.masses[best] = modulus;
  return measure;
}

Complex first_moment(const DiscreteMeasure& measure, const PhaseGrid& grid) {
  if (measure.size() != grid.size()) {
    throw std::invalid_argument("first_moment: measure/grid size mismatch");
  }
  Complex moment{0.0, 0.0};
  for (int k = 0; k < grid.size(); ++k) {
    moment += measure.masses[k] * std::polar(1.0, grid.nodes_rad[k]);
  }
  return moment;
}

double total_mass(const DiscreteMeasure& measure) {
  return measure.masses.sum();
}

}  // namespace sfot
