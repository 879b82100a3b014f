// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters
//
// ADMM solvers for the barycenter programs. Both problems share the same
// variable structure: one K x K transport plan per (sensor, component) whose
// row sums are forced to agree across sensors (the barycenter measure). The
// forward problem fixes the column sums to given measures; the inverse
// problem leaves them free and fits their first moments to the measured
// pressures through a quadratic penalty.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>

#include "sfot/ot_solver.hpp"

namespace sfot {

namespace {

using Clock = std::chrono::steady_clock;

// ADMM over-relaxation and penalty-rebalance settings, shared by both
// solvers. Deterministic: adaptation depends only on the iterates.
constexpr double kRelax = 1.6;
constexpr int kRhoInterval = 100;
constexpr double kRhoThreshold = 10.0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// min ||w - y||^2 s.t. w >= 0, sum(w) = s. In-place on y.
void project_nonneg_sum(Eigen::VectorXd& y, double s) {
  const int n = static_cast<int>(y.size());
  if (s <= 0.0) {
    y.setZero();
    return;
  }
  std::vector<double> sorted(y.data(), y.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cum = 0.0;
  double tau = 0.0;
  for (int i = 0; i < n; ++i) {
    cum += sorted[i];
    const double t = (cum - s) / (i + 1);
    if (i == n - 1 || sorted[i + 1] <= t) {
      tau = t;
      break;
    }
  }
  for (int i = 0; i < n; ++i) {
    y[i] = std::max(y[i] - tau, 0.0);
  }
}

// Row-sum consensus projection across sensors, one (component, row) slice at
// a time: v_q <- v_q - (rowsum_q - mean_q rowsum_q) / K.
void consensus_project(std::vector<Eigen::MatrixXd>& plans) {
  const int Q = static_cast<int>(plans.size());
  const int K = static_cast<int>(plans[0].rows());
  Eigen::MatrixXd row_sums(Q, K);
  for (int q = 0; q < Q; ++q) {
    row_sums.row(q) = plans[q].rowwise().sum().transpose();
  }
  const Eigen::RowVectorXd mean = row_sums.colwise().mean();
  for (int q = 0; q < Q; ++q) {
    for (int j = 0; j < K; ++j) {
      const double shift = (row_sums(q, j) - mean[j]) / K;
      plans[q].row(j).array() -= shift;
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Forward barycenter
// ---------------------------------------------------------------------------

BarycenterLpResult ot_barycenter_detailed(
    const std::vector<DiscreteMeasure>& measures, const GroundCost& cost,
    const SolverOptions& opts) {
  const int Q = static_cast<int>(measures.size());
  if (Q < 1) {
    throw std::invalid_argument("ot_barycenter: need at least one measure");
  }
  const int K = cost.size();
  double mass = -1.0;
  for (const auto& m : measures) {
    if (m.size() != K) {
      throw std::invalid_argument("ot_barycenter: measure/cost size mismatch");
    }
    if (m.masses.minCoeff() < 0.0 || !m.masses.allFinite()) {
      throw std::invalid_argument("ot_barycenter: masses must be non-negative");
    }
    const double total = m.masses.sum();
    if (mass < 0.0) {
      mass = total;
    } else if (std::abs(total - mass) > 1e-9 * std::max(mass, 1e-300)) {
      throw std::invalid_argument(
          "ot_barycenter: measures must share one total mass");
    }
  }

  BarycenterLpResult result;
  result.barycenter.masses = Eigen::VectorXd::Zero(K);
  result.plans.assign(Q, TransportPlan{Eigen::MatrixXd::Zero(K, K)});
  if (mass <= 0.0) {
    result.diagnostics.converged = true;
    return result;
  }

  const auto start = Clock::now();
  double rho = opts.rho;
  std::vector<Eigen::MatrixXd> x(Q, Eigen::MatrixXd::Zero(K, K));
  std::vector<Eigen::MatrixXd> z(Q, Eigen::MatrixXd::Zero(K, K));
  std::vector<Eigen::MatrixXd> u(Q, Eigen::MatrixXd::Zero(K, K));
  std::vector<Eigen::MatrixXd> z_prev(Q);
  Eigen::VectorXd column(K);

  SolverDiagnostics diag;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    // x: row-consensus projection of (z - u), shifted along the cost
    // gradient. The cost is identical across sensors, so it passes through
    // the projection unchanged.
    for (int q = 0; q < Q; ++q) {
      x[q] = z[q] - u[q];
    }
    consensus_project(x);
    for (int q = 0; q < Q; ++q) {
      x[q] -= cost.matrix / (rho * Q);
    }

    // z: per-column projection onto {w >= 0, sum(w) = nu_q[k]}, with
    // over-relaxation on the consensus iterate.
    z_prev = z;
    for (int q = 0; q < Q; ++q) {
      const Eigen::MatrixXd relaxed =
          kRelax * x[q] + (1.0 - kRelax) * z_prev[q];
      for (int k = 0; k < K; ++k) {
        column = relaxed.col(k) + u[q].col(k);
        project_nonneg_sum(column, measures[q].masses[k]);
        z[q].col(k) = column;
      }
      u[q] += relaxed - z[q];
    }

    double primal = 0.0, dual = 0.0, x_scale = 0.0, u_scale = 0.0;
    for (int q = 0; q < Q; ++q) {
      primal = std::max(primal, (x[q] - z[q]).cwiseAbs().maxCoeff());
      dual = std::max(dual, rho * (z[q] - z_prev[q]).cwiseAbs().maxCoeff());
      x_scale = std::max({x_scale, x[q].cwiseAbs().maxCoeff(),
                          z[q].cwiseAbs().maxCoeff()});
      u_scale = std::max(u_scale, rho * u[q].cwiseAbs().maxCoeff());
    }

    diag.iterations = iter + 1;
    diag.primal_residual = primal;
    diag.dual_residual = dual;
    if (primal <= opts.feas_tol * (1.0 + x_scale) &&
        dual <= opts.rel_gap * (1.0 + u_scale)) {
      diag.converged = true;
      break;
    }
    if (opts.adaptive_rho && (iter + 1) % kRhoInterval == 0) {
      if (primal > kRhoThreshold * dual && rho < 1e6) {
        rho *= 2.0;
        for (auto& uq : u) uq /= 2.0;
      } else if (dual > kRhoThreshold * primal && rho > 1e-4) {
        rho /= 2.0;
        for (auto& uq : u) uq *= 2.0;
      }
    }
  }
  diag.runtime_sec = seconds_since(start);

  // z is exactly feasible in column sums and sign; the barycenter is the
  // consensus (mean) of its row sums.
  Eigen::VectorXd bary = Eigen::VectorXd::Zero(K);
  double objective = 0.0;
  for (int q = 0; q < Q; ++q) {
    result.plans[q].matrix = z[q];
    bary += z[q].rowwise().sum();
    objective += (cost.matrix.array() * z[q].array()).sum();
  }
  result.barycenter.masses = bary / Q;
  result.objective = objective / Q;
  result.diagnostics = diag;

  if (!diag.converged) {
    throw ConvergenceError("ot_barycenter: iteration limit reached", diag);
  }
  return result;
}

DiscreteMeasure ot_barycenter(const std::vector<DiscreteMeasure>& measures,
                              const GroundCost& cost,
                              const SolverOptions& opts) {
  return ot_barycenter_detailed(measures, cost, opts).barycenter;
}

// ---------------------------------------------------------------------------
// Inverse problem
// ---------------------------------------------------------------------------

void BarycenterProblem::validate() const {
  const int Q = num_sensors();
  if (Q < 1 || num_waves() < 1) {
    throw std::invalid_argument("BarycenterProblem: empty measurements or grid");
  }
  if (steering.rows() != Q) {
    throw std::invalid_argument("BarycenterProblem: steering/measurement mismatch");
  }
  if (cost.size() != grid.size()) {
    throw std::invalid_argument("BarycenterProblem: cost/grid mismatch");
  }
  if (!(eta > 0.0) || !(cost.gamma > 0.0)) {
    throw std::invalid_argument("BarycenterProblem: eta and gamma must be positive");
  }
  if (!measurements.allFinite() || !steering.allFinite()) {
    throw std::invalid_argument("BarycenterProblem: non-finite data");
  }
}

BarycenterProblem assemble_problem(const MeasurementSet& measurements,
                                   const PlaneWaveDictionary& dict,
                                   const PhaseGrid& grid, double gamma,
                                   double eta) {
  const int Q = measurements.size();
  if (measurements.array.size() != Q) {
    throw std::invalid_argument("assemble_problem: pressures/array mismatch");
  }
  BarycenterProblem problem;
  problem.measurements = measurements.pressures;
  problem.steering.resize(Q, dict.size());
  for (int q = 0; q < Q; ++q) {
    problem.steering.row(q) =
        steering_vector(dict, measurements.array.positions_m[q]).transpose();
  }
  problem.grid = grid;
  problem.cost = make_ground_cost(grid, gamma);
  problem.eta = eta;
  problem.validate();
  return problem;
}

namespace {

// Flat plan storage indexed ((q*L + l)*K + j)*K + k. The moment map A sends
// plans to the Q fitted pressures; its coefficients w(q,l,k) do not depend on
// the barycenter row j, which keeps every A-related quantity K times smaller
// than the plan array.
struct InverseWorkspace {
  int Q, L, K;
  long plan_block;  // K*K
  long total;       // Q*L*K*K
  double eta;
  Eigen::VectorXcd pressures;
  std::vector<Complex> w;        // (q*L + l)*K + k
  std::vector<double> lin_term;  // 2*eta*Re(w * conj(p_q)), same indexing
  std::vector<double> cost;      // j*K + k

  explicit InverseWorkspace(const BarycenterProblem& p) {
    Q = p.num_sensors();
    L = p.num_waves();
    K = p.grid.size();
    plan_block = static_cast<long>(K) * K;
    total = static_cast<long>(Q) * L * plan_block;
    eta = p.eta;
    pressures = p.measurements;
    w.resize(static_cast<size_t>(Q) * L * K);
    lin_term.resize(w.size());
    for (int q = 0; q < Q; ++q) {
      for (int l = 0; l < L; ++l) {
        for (int k = 0; k < K; ++k) {
          const Complex wqlk =
              p.steering(q, l) * std::polar(1.0, p.grid.nodes_rad[k]);
          const size_t idx = (static_cast<size_t>(q) * L + l) * K + k;
          w[idx] = wqlk;
          lin_term[idx] = 2.0 * eta * (wqlk * std::conj(pressures[q])).real();
        }
      }
    }
    cost.resize(static_cast<size_t>(K) * K);
    for (int j = 0; j < K; ++j) {
      for (int k = 0; k < K; ++k) {
        cost[static_cast<size_t>(j) * K + k] = p.cost.matrix(j, k);
      }
    }
  }

  // Consensus projection on a compact (q,l,k) array, identical for every row j.
  void consensus_project_compact(std::vector<double>& t) const {
    for (int l = 0; l < L; ++l) {
      double mean = 0.0;
      for (int q = 0; q < Q; ++q) {
        double s = 0.0;
        const size_t base = (static_cast<size_t>(q) * L + l) * K;
        for (int k = 0; k < K; ++k) s += t[base + k];
        mean += s;
      }
      mean /= Q;
      for (int q = 0; q < Q; ++q) {
        const size_t base = (static_cast<size_t>(q) * L + l) * K;
        double s = 0.0;
        for (int k = 0; k < K; ++k) s += t[base + k];
        const double shift = (s - mean) / K;
        for (int k = 0; k < K; ++k) t[base + k] -= shift;
      }
    }
  }

  // A applied to a compact array (every row j equal): K * sum_{l,k} w * t.
  Eigen::VectorXcd apply_moment_compact(const std::vector<double>& t) const {
    Eigen::VectorXcd fit = Eigen::VectorXcd::Zero(Q);
    for (int q = 0; q < Q; ++q) {
      Complex acc{0.0, 0.0};
      const size_t base = static_cast<size_t>(q) * L * K;
      for (int l = 0; l < L; ++l) {
        for (int k = 0; k < K; ++k) {
          acc += w[base + static_cast<size_t>(l) * K + k] *
                 t[base + static_cast<size_t>(l) * K + k];
        }
      }
      fit[q] = static_cast<double>(K) * acc;
    }
    return fit;
  }

  // Gram = (A P A^T) in the stacked real representation, 2Q x 2Q.
  Eigen::MatrixXd moment_gram() const {
    Eigen::MatrixXd gram(2 * Q, 2 * Q);
    std::vector<double> t(w.size());
    for (int col = 0; col < 2 * Q; ++col) {
      const int qc = col / 2;
      const bool real_part = (col % 2 == 0);
      std::fill(t.begin(), t.end(), 0.0);
      const size_t base = static_cast<size_t>(qc) * L * K;
      for (size_t i = 0; i < static_cast<size_t>(L) * K; ++i) {
        t[base + i] = real_part ? w[base + i].real() : w[base + i].imag();
      }
      consensus_project_compact(t);
      const Eigen::VectorXcd fit = apply_moment_compact(t);
      for (int q = 0; q < Q; ++q) {
        gram(2 * q, col) = fit[q].real();
        gram(2 * q + 1, col) = fit[q].imag();
      }
    }
    return gram;
  }
};

BarycenterSolution assemble_solution(const InverseWorkspace& ws,
                                     const BarycenterProblem& problem,
                                     const std::vector<double>& x,
                                     SolverDiagnostics diag) {
  const int Q = ws.Q, L = ws.L, K = ws.K;
  BarycenterSolution sol;
  sol.plans.assign(Q, std::vector<TransportPlan>(L));
  sol.sensor_measures.assign(Q, VectorMeasure{Eigen::MatrixXd::Zero(L, K)});
  Eigen::MatrixXd bary = Eigen::MatrixXd::Zero(L, K);
  for (int q = 0; q < Q; ++q) {
    for (int l = 0; l < L; ++l) {
      Eigen::MatrixXd plan(K, K);
      const size_t base = (static_cast<size_t>(q) * L + l) * ws.plan_block;
      for (int j = 0; j < K; ++j) {
        for (int k = 0; k < K; ++k) {
          plan(j, k) =
              std::max(x[base + static_cast<size_t>(j) * K + k], 0.0);
        }
      }
      sol.sensor_measures[q].masses.row(l) = plan.colwise().sum();
      bary.row(l) += plan.rowwise().sum().transpose() / Q;
      sol.plans[q][l].matrix = std::move(plan);
    }
  }
  sol.barycenter.masses = std::move(bary);
  sol.objective = inverse_barycenter_objective(problem, sol.plans);
  sol.diagnostics = diag;
  return sol;
}

}  // namespace

double inverse_barycenter_objective(
    const BarycenterProblem& problem,
    const std::vector<std::vector<TransportPlan>>& plans) {
  const int Q = problem.num_sensors();
  const int L = problem.num_waves();
  const int K = problem.grid.size();
  if (static_cast<int>(plans.size()) != Q) {
    throw std::invalid_argument("inverse_barycenter_objective: plan count");
  }
  Eigen::VectorXcd moments(K);
  for (int k = 0; k < K; ++k) {
    moments[k] = std::polar(1.0, problem.grid.nodes_rad[k]);
  }
  double transport = 0.0;
  double fit = 0.0;
  for (int q = 0; q < Q; ++q) {
    if (static_cast<int>(plans[q].size()) != L) {
      throw std::invalid_argument("inverse_barycenter_objective: plan count");
    }
    Complex predicted{0.0, 0.0};
    for (int l = 0; l < L; ++l) {
      const Eigen::MatrixXd& m = plans[q][l].matrix;
      transport += (problem.cost.matrix.array() * m.array()).sum();
      const Eigen::VectorXd col_sums = m.colwise().sum().transpose();
      Complex moment{0.0, 0.0};
      for (int k = 0; k < K; ++k) moment += moments[k] * col_sums[k];
      predicted += problem.steering(q, l) * moment;
    }
    fit += std::norm(predicted - problem.measurements[q]);
  }
  return transport + problem.eta * fit;
}

BarycenterSolution solve_barycenter(const BarycenterProblem& problem,
                                    const SolverOptions& opts) {
  problem.validate();
  const auto start = Clock::now();
  InverseWorkspace ws(problem);
  const int Q = ws.Q, L = ws.L, K = ws.K;
  const long N = ws.total;

  const Eigen::MatrixXd gram = ws.moment_gram();
  double rho = opts.rho;
  Eigen::LLT<Eigen::MatrixXd> small_solver;
  auto refactor = [&] {
    Eigen::MatrixXd m = 2.0 * ws.eta * gram;
    m.diagonal().array() += rho;
    small_solver.compute(m);
    if (small_solver.info() != Eigen::Success) {
      throw std::runtime_error("solve_barycenter: moment system not SPD");
    }
  };
  refactor();

  std::vector<double> x(N, 0.0), z(N, 0.0), u(N, 0.0), d(N, 0.0);
  std::vector<double> row_sums(static_cast<size_t>(Q) * L * K);
  std::vector<double> row_means(static_cast<size_t>(L) * K);
  std::vector<double> col_sums(static_cast<size_t>(Q) * L * K);
  std::vector<double> correction(static_cast<size_t>(Q) * L * K);

  SolverDiagnostics diag;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    // d = P(rho*(z - u) + 2*eta*A^T p - cost)
    for (int q = 0; q < Q; ++q) {
      for (int l = 0; l < L; ++l) {
        const size_t cbase = (static_cast<size_t>(q) * L + l) * K;
        const size_t pbase = cbase * K;
        for (int j = 0; j < K; ++j) {
          const size_t jb = pbase + static_cast<size_t>(j) * K;
          const size_t costb = static_cast<size_t>(j) * K;
          for (int k = 0; k < K; ++k) {
            d[jb + k] = rho * (z[jb + k] - u[jb + k]) + ws.lin_term[cbase + k] -
                        ws.cost[costb + k];
          }
        }
      }
    }
    // consensus projection on the full array, slice (l, j) across q
    std::fill(row_means.begin(), row_means.end(), 0.0);
    for (int q = 0; q < Q; ++q) {
      for (int l = 0; l < L; ++l) {
        const size_t pbase = (static_cast<size_t>(q) * L + l) * ws.plan_block;
        for (int j = 0; j < K; ++j) {
          double s = 0.0;
          const size_t jb = pbase + static_cast<size_t>(j) * K;
          for (int k = 0; k < K; ++k) s += d[jb + k];
          row_sums[(static_cast<size_t>(q) * L + l) * K + j] = s;
          row_means[static_cast<size_t>(l) * K + j] += s / Q;
        }
      }
    }
    for (int q = 0; q < Q; ++q) {
      for (int l = 0; l < L; ++l) {
        const size_t pbase = (static_cast<size_t>(q) * L + l) * ws.plan_block;
        for (int j = 0; j < K; ++j) {
          const double shift =
              (row_sums[(static_cast<size_t>(q) * L + l) * K + j] -
               row_means[static_cast<size_t>(l) * K + j]) /
              K;
          const size_t jb = pbase + static_cast<size_t>(j) * K;
          for (int k = 0; k < K; ++k) d[jb + k] -= shift;
        }
      }
    }

    // rhs = A d (column sums against the moment coefficients)
    Eigen::VectorXd rhs(2 * Q);
    for (int q = 0; q < Q; ++q) {
      Complex acc{0.0, 0.0};
      for (int l = 0; l < L; ++l) {
        const size_t cbase = (static_cast<size_t>(q) * L + l) * K;
        const size_t pbase = cbase * K;
        for (int k = 0; k < K; ++k) {
          double cs = 0.0;
          for (int j = 0; j < K; ++j) {
            cs += d[pbase + static_cast<size_t>(j) * K + k];
          }
          col_sums[cbase + k] = cs;
          acc += ws.w[cbase + k] * cs;
        }
      }
      rhs[2 * q] = acc.real();
      rhs[2 * q + 1] = acc.imag();
    }
    const Eigen::VectorXd svec = small_solver.solve(rhs);

    // correction = P(A^T s), compact in (q,l,k)
    for (int q = 0; q < Q; ++q) {
      const Complex zeta{svec[2 * q], svec[2 * q + 1]};
      const size_t base = static_cast<size_t>(q) * L * K;
      for (size_t i = 0; i < static_cast<size_t>(L) * K; ++i) {
        correction[base + i] = (ws.w[base + i] * std::conj(zeta)).real();
      }
    }
    ws.consensus_project_compact(correction);

    // x = (d - 2*eta*correction)/rho, over-relaxed against the previous z;
    // z = clamp(x + u); u += x - z
    double primal = 0.0, dual = 0.0, x_scale = 0.0, u_scale = 0.0;
    for (int q = 0; q < Q; ++q) {
      for (int l = 0; l < L; ++l) {
        const size_t cbase = (static_cast<size_t>(q) * L + l) * K;
        const size_t pbase = cbase * K;
        for (int j = 0; j < K; ++j) {
          const size_t jb = pbase + static_cast<size_t>(j) * K;
          for (int k = 0; k < K; ++k) {
            const double raw =
                (d[jb + k] - 2.0 * ws.eta * correction[cbase + k]) / rho;
            const double relaxed = kRelax * raw + (1.0 - kRelax) * z[jb + k];
            const double zv = std::max(relaxed + u[jb + k], 0.0);
            x[jb + k] = raw;
            dual = std::max(dual, rho * std::abs(zv - z[jb + k]));
            z[jb + k] = zv;
            u[jb + k] += relaxed - zv;
            primal = std::max(primal, std::abs(raw - zv));
            x_scale = std::max({x_scale, std::abs(raw), zv});
            u_scale = std::max(u_scale, rho * std::abs(u[jb + k]));
          }
        }
      }
    }

    diag.iterations = iter + 1;
    diag.primal_residual = primal;
    diag.dual_residual = dual;
    if (primal <= opts.feas_tol * (1.0 + x_scale) &&
        dual <= opts.rel_gap * (1.0 + u_scale)) {
      diag.converged = true;
      break;
    }
    if (opts.adaptive_rho && (iter + 1) % kRhoInterval == 0) {
      if (primal > kRhoThreshold * dual && rho < 1e6) {
        rho *= 2.0;
        for (auto& uv : u) uv /= 2.0;
        refactor();
      } else if (dual > kRhoThreshold * primal && rho > 1e-4) {
        rho /= 2.0;
        for (auto& uv : u) uv *= 2.0;
        refactor();
      }
    }
  }
  diag.runtime_sec = seconds_since(start);

  BarycenterSolution sol = assemble_solution(ws, problem, x, diag);
  if (!diag.converged) {
    throw BarycenterConvergenceError(
        "solve_barycenter: iteration limit reached", diag,
        std::make_shared<BarycenterSolution>(std::move(sol)));
  }
  return sol;
}

CoefficientVector extract_coefficients(const BarycenterSolution& solution,
                                       const PhaseGrid& grid) {
  if (solution.barycenter.grid_size() != grid.size()) {
    throw std::invalid_argument("extract_coefficients: grid size mismatch");
  }
  const int L = solution.barycenter.components();
  CoefficientVector coeffs;
  coeffs.values.resize(L);
  for (int l = 0; l < L; ++l) {
    coeffs.values[l] = first_moment(solution.barycenter.row(l), grid);
  }
  return coeffs;
}

CoefficientVector estimate_ot(const MeasurementSet& measurements,
                              const PlaneWaveDictionary& dict,
                              const PhaseGrid& grid, double gamma, double eta,
                              const SolverOptions& opts) {
  const BarycenterProblem problem =
      assemble_problem(measurements, dict, grid, gamma, eta);
  const BarycenterSolution solution = solve_barycenter(problem, opts);
  return extract_coefficients(solution, grid);
}

}  // namespace sfot
