// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#pragma once

#include <Eigen/Dense>
#include <complex>

#include "sfot/model.hpp"

namespace sfot {

/// Uniform discretization of the phase circle: psi_k = -pi + 2*pi*k/K.
struct PhaseGrid {
  Eigen::VectorXd nodes_rad;

  int size() const { return static_cast<int>(nodes_rad.size()); }
  double spacing() const { return nodes_rad[1] - nodes_rad[0]; }
};

PhaseGrid make_phase_grid(int num_nodes);  // throws std::domain_error if K < 2

/// Non-negative masses on the phase grid nodes.
struct DiscreteMeasure {
  Eigen::VectorXd masses;

  int size() const { return static_cast<int>(masses.size()); }
};

/// One DiscreteMeasure per dictionary direction, all on a shared grid.
/// Row l holds the measure for component l.
struct VectorMeasure {
  Eigen::MatrixXd masses;  // L x K

  int components() const { return static_cast<int>(masses.rows()); }
  int grid_size() const { return static_cast<int>(masses.cols()); }
  DiscreteMeasure row(int l) const { return {masses.row(l).transpose()}; }
};

/// Pairwise transport cost c(psi_j, psi_k) = |e^{i psi_j} - e^{i psi_k}|^2
/// + gamma = 2 - 2*cos(psi_j - psi_k) + gamma. The constant gamma > 0 charges
/// every unit of transported mass and is what makes mass itself costly.
struct GroundCost {
  double gamma = 0.0;
  Eigen::MatrixXd matrix;  // K x K, symmetric, diagonal = gamma

  int size() const { return static_cast<int>(matrix.rows()); }
};

GroundCost make_ground_cost(const PhaseGrid& grid, double gamma);

/// All mass |alpha| at the grid node nearest to arg(alpha) in circular
/// distance, ties broken toward the lower node index; the zero measure for
/// alpha = 0. Quantization moves the phase by at most pi/K.
DiscreteMeasure lift_coefficient(Complex alpha, const PhaseGrid& grid);

/// sum_k e^{i psi_k} * m_k; inverts lift_coefficient on Diracs whose phase
/// lies on the grid.
Complex first_moment(const DiscreteMeasure& measure, const PhaseGrid& grid);

double total_mass(const DiscreteMeasure& measure);

}  // namespace sfot
