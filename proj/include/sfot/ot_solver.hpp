// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfot/errors.hpp"
#include "sfot/lift.hpp"
#include "sfot/model.hpp"
#include "sfot/simulate.hpp"

namespace sfot {

/// Mass routed from source node j (row) to target node k (column).
struct TransportPlan {
  Eigen::MatrixXd matrix;  // K x K, non-negative

  Eigen::VectorXd row_sums() const { return matrix.rowwise().sum(); }
  Eigen::VectorXd col_sums() const { return matrix.colwise().sum().transpose(); }
};

struct OtResult {
  double value = 0.0;
  TransportPlan plan;
};

/// Exact balanced transport between two measures on the phase grid, solved
/// with the transportation simplex. Total masses must agree to 1e-9 relative
/// or the problem is infeasible.
OtResult ot_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const GroundCost& cost);

/// Componentwise sum of scalar transport distances.
double vector_ot_distance(const VectorMeasure& mu, const VectorMeasure& nu,
                          const GroundCost& cost);

struct SolverOptions {
  double rel_gap = 1e-5;   // drives the dual-residual threshold
  double feas_tol = 1e-7;  // marginal/nonnegativity feasibility
  int max_iters = 50000;
  double rho = 1.0;        // initial ADMM penalty
  bool adaptive_rho = true;
};

struct BarycenterLpResult {
  DiscreteMeasure barycenter;
  std::vector<TransportPlan> plans;  // one per input measure
  double objective = 0.0;            // (1/Q) * sum_q <C, plan_q>
  SolverDiagnostics diagnostics;
};

/// Measure minimizing the average transport distance to the inputs, which
/// must share one total mass. Solved by ADMM over the transport plans with
/// the barycenter as the row-sum consensus.
BarycenterLpResult ot_barycenter_detailed(
    const std::vector<DiscreteMeasure>& measures, const GroundCost& cost,
    const SolverOptions& opts = {});

DiscreteMeasure ot_barycenter(const std::vector<DiscreteMeasure>& measures,
                              const GroundCost& cost,
                              const SolverOptions& opts = {});

/// Data for the joint estimation program: transport costs between the
/// barycenter and every per-sensor measure, plus a quadratic fit of the
/// per-sensor first moments to the measured pressures weighted by eta.
struct BarycenterProblem {
  Eigen::VectorXcd measurements;  // Q pressures
  Eigen::MatrixXcd steering;      // Q x L, row q = steering vector at sensor q
  PhaseGrid grid;
  GroundCost cost;
  double eta = 0.0;

  int num_sensors() const { return static_cast<int>(measurements.size()); }
  int num_waves() const { return static_cast<int>(steering.cols()); }
  void validate() const;
};

struct BarycenterSolution {
  VectorMeasure barycenter;                       // L x K
  std::vector<VectorMeasure> sensor_measures;     // Q entries, each L x K
  std::vector<std::vector<TransportPlan>> plans;  // [q][l]
  double objective = 0.0;
  SolverDiagnostics diagnostics;
};

class BarycenterConvergenceError : public ConvergenceError {
 public:
  BarycenterConvergenceError(const std::string& what, SolverDiagnostics diag,
                             std::shared_ptr<BarycenterSolution> best)
      : ConvergenceError(what, diag), best_iterate(std::move(best)) {}

  std::shared_ptr<BarycenterSolution> best_iterate;
};

BarycenterProblem assemble_problem(const MeasurementSet& measurements,
                                   const PlaneWaveDictionary& dict,
                                   const PhaseGrid& grid, double gamma,
                                   double eta);

/// Solves the joint convex program
///   min sum_{q,l} <C, m_l^q> + eta * sum_q |<g_q, Phi_q(m)> - p_q|^2
/// over non-negative plans m_l^q whose row sums agree across sensors (the
/// barycenter) and whose column sums define the per-sensor measures; Phi_q
/// collects the first moments of those column sums. ADMM splitting: the
/// smooth part plus the row-consensus subspace in one block (closed-form via
/// a rank-2Q correction), the non-negative orthant in the other. Deterministic
/// for fixed options.
BarycenterSolution solve_barycenter(const BarycenterProblem& problem,
                                    const SolverOptions& opts = {});

/// Objective value of the estimation program at an arbitrary plan
/// collection; used by diagnostics and tests.
double inverse_barycenter_objective(
    const BarycenterProblem& problem,
    const std::vector<std::vector<TransportPlan>>& plans);

/// Coefficient estimate: first moment of each barycenter component.
CoefficientVector extract_coefficients(const BarycenterSolution& solution,
                                       const PhaseGrid& grid);

/// assemble -> solve -> extract.
CoefficientVector estimate_ot(const MeasurementSet& measurements,
                              const PlaneWaveDictionary& dict,
                              const PhaseGrid& grid, double gamma, double eta,
                              const SolverOptions& opts = {});

}  // namespace sfot
