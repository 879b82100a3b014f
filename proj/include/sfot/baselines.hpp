// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#pragma once

#include <Eigen/Dense>

#include "sfot/errors.hpp"
#include "sfot/model.hpp"

namespace sfot {

/// Stacked steering vectors; every entry has unit modulus.
struct SensingMatrix {
  Eigen::MatrixXcd G;  // Q x L, row q = steering vector at sensor q
};

SensingMatrix build_sensing_matrix(const PlaneWaveDictionary& dict,
                                   const SensorArray& array);

/// Largest singular value via power iteration on G^H G, run to a 1e-10
/// relative tolerance from a deterministic start.
double spectral_norm(const Eigen::MatrixXcd& G);

/// argmin ||G phi - p||^2 + lambda ||phi||^2 through the regularized normal
/// equations in the stacked real representation. lambda = 0 requires a
/// full-rank square-or-tall system.
CoefficientVector tikhonov(const Eigen::MatrixXcd& G,
                           const Eigen::VectorXcd& pressures, double lambda);

struct LassoOptions {
  double tol = 1e-8;  // max violation of the stationarity conditions
  int max_iters = 1000000;
};

/// argmin 0.5||G phi - p||^2 + lambda sum_l |phi_l| (complex moduli), by
/// proximal gradient with the complex soft-threshold and step 1/||G||^2.
CoefficientVector lasso(const Eigen::MatrixXcd& G,
                        const Eigen::VectorXcd& pressures, double lambda,
                        const LassoOptions& opts = {});

struct LadLassoOptions {
  double rel_gap = 1e-8;  // primal-dual gap relative to the objective
  int max_iters = 500000;
};

/// argmin sum_q |(G phi - p)_q| + lambda sum_l |phi_l| (complex moduli in
/// both terms), by a primal-dual splitting whose two prox steps are the
/// complex soft-threshold and its dual disc projection. Stops on a verified
/// primal-dual gap.
CoefficientVector lad_lasso(const Eigen::MatrixXcd& G,
                            const Eigen::VectorXcd& pressures, double lambda,
                            const LadLassoOptions& opts = {});

}  // namespace sfot
