// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters
//
// Exact balanced transport via the transportation simplex (MODI method):
// northwest-corner start, potentials from the basis tree, Bland pivoting.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sfot/ot_solver.hpp"

namespace sfot {

namespace {

struct Cell {
  int row;
  int col;
};

// Solves min <C, X> s.t. X 1 = a, X^T 1 = b, X >= 0 with sum(a) == sum(b).
// Supplies and demands must be strictly positive (zeros filtered by caller).
class TransportSimplex {
 public:
  TransportSimplex(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                   const Eigen::MatrixXd& cost)
      : a_(supply), b_(demand), cost_(cost),
        n_(static_cast<int>(supply.size())),
        m_(static_cast<int>(demand.size())),
        flow_(Eigen::MatrixXd::Zero(supply.size(), demand.size())),
        in_basis_(Eigen::MatrixXi::Zero(supply.size(), demand.size())) {}

  Eigen::MatrixXd solve() {
    northwest_corner();
    const double scale = cost_.cwiseAbs().maxCoeff() + 1.0;
    const double tol = 1e-12 * scale;
    const long max_pivots = 50000L * (n_ + m_);
    for (long pivot = 0; pivot < max_pivots; ++pivot) {
      compute_potentials();
      const auto entering = find_entering(tol);
      if (entering.row < 0) {
        return flow_;
      }
      pivot_on(entering);
    }
    throw std::runtime_error("ot_distance: transportation simplex stalled");
  }

 private:
  void northwest_corner() {
    Eigen::VectorXd a = a_;
    Eigen::VectorXd b = b_;
    int i = 0, j = 0;
    while (true) {
      const double t = std::min(a[i], b[j]);
      flow_(i, j) = t;
      in_basis_(i, j) = 1;
      a[i] -= t;
      b[j] -= t;
      if (i == n_ - 1 && j == m_ - 1) break;
      if (a[i] <= 0.0 && i < n_ - 1) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  // Potentials u_i + v_j = c_ij on basis cells, u_0 = 0. The basis graph is
  // a spanning tree over row and column nodes.
  void compute_potentials() {
    u_.assign(n_, 0.0);
    v_.assign(m_, 0.0);
    std::vector<char> row_done(n_, 0), col_done(m_, 0);
    std::vector<int> stack;  // rows encoded as i, columns as n_ + j
    stack.push_back(0);
    row_done[0] = 1;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      if (node < n_) {
        const int i = node;
        for (int j = 0; j < m_; ++j) {
          if (in_basis_(i, j) && !col_done[j]) {
            v_[j] = cost_(i, j) - u_[i];
            col_done[j] = 1;
            stack.push_back(n_ + j);
          }
        }
      } else {
        const int j = node - n_;
        for (int i = 0; i < n_; ++i) {
          if (in_basis_(i, j) && !row_done[i]) {
            u_[i] = cost_(i, j) - v_[j];
            row_done[i] = 1;
            stack.push_back(i);
          }
        }
      }
    }
  }

  Cell find_entering(double tol) const {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < m_; ++j) {
        if (!in_basis_(i, j) && cost_(i, j) - u_[i] - v_[j] < -tol) {
          return {i, j};
        }
      }
    }
    return {-1, -1};
  }

  // Adding the entering cell closes exactly one cycle through the basis
  // tree. Walk it, alternating signs, move the blocking flow, and drop the
  // first blocking "minus" cell.
  void pivot_on(Cell entering) {
    const std::vector<Cell> cycle = find_cycle(entering);
    double theta = std::numeric_limits<double>::infinity();
    int leave_index = -1;
    for (size_t idx = 1; idx < cycle.size(); idx += 2) {
      const double f = flow_(cycle[idx].row, cycle[idx].col);
      const long lin = static_cast<long>(cycle[idx].row) * m_ + cycle[idx].col;
      const long best_lin =
          leave_index < 0 ? -1
                          : static_cast<long>(cycle[leave_index].row) * m_ +
                                cycle[leave_index].col;
      if (f < theta || (f == theta && lin < best_lin)) {
        theta = f;
        leave_index = static_cast<int>(idx);
      }
    }
    for (size_t idx = 0; idx < cycle.size(); ++idx) {
      double& f = flow_(cycle[idx].row, cycle[idx].col);
      f += (idx % 2 == 0) ? theta : -theta;
    }
    const Cell leaving = cycle[static_cast<size_t>(leave_index)];
    flow_(leaving.row, leaving.col) = 0.0;  // clear roundoff residue
    in_basis_(leaving.row, leaving.col) = 0;
    in_basis_(entering.row, entering.col) = 1;
  }

  // Cycle through the basis from the entering cell's column node back to its
  // row node; cells alternate +, -, +, ... starting at the entering cell.
  std::vector<Cell> find_cycle(Cell entering) const {
    // parent[] over nodes: rows 0..n-1, columns n..n+m-1
    std::vector<int> parent(n_ + m_, -2);
    std::vector<int> stack;
    parent[entering.row] = -1;
    stack.push_back(entering.row);
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      if (node < n_) {
        const int i = node;
        for (int j = 0; j < m_; ++j) {
          // the entering arc itself may not be used to close the path
          if (i == entering.row && j == entering.col) continue;
          if (in_basis_(i, j) && parent[n_ + j] == -2) {
            parent[n_ + j] = i;
            stack.push_back(n_ + j);
          }
        }
      } else {
        const int j = node - n_;
        for (int i = 0; i < n_; ++i) {
          if (in_basis_(i, j) && parent[i] == -2) {
            parent[i] = n_ + j;
            stack.push_back(i);
          }
        }
      }
    }
    if (parent[n_ + entering.col] == -2) {
      throw std::runtime_error("ot_distance: basis is not connected");
    }
    // Path from entering's column node back to entering's row node, then the
    // entering cell closes the cycle. Nodes alternate column/row, so cells
    // pair (row_node_parent, col_node) etc.
    std::vector<Cell> path_cells;
    int node = n_ + entering.col;
    while (node != -1) {
      const int par = parent[node];
      if (par == -1) break;
      if (node >= n_) {
        path_cells.push_back({par, node - n_});
      } else {
        path_cells.push_back({node, par - n_});
      }
      node = par;
    }
    std::vector<Cell> cycle;
    cycle.push_back(entering);
    cycle.insert(cycle.end(), path_cells.begin(), path_cells.end());
    return cycle;
  }

  Eigen::VectorXd a_, b_;
  Eigen::MatrixXd cost_;
  int n_, m_;
  Eigen::MatrixXd flow_;
  Eigen::MatrixXi in_basis_;
  std::vector<double> u_, v_;
};

void check_measure(const DiscreteMeasure& m, const char* who) {
  for (int k = 0; k < m.size(); ++k) {
    if (!(m.masses[k] >= 0.0) || !std::isfinite(m.masses[k])) {
      throw std::invalid_argument(std::string(who) +
                                  ": masses must be finite and non-negative");
    }
  }
}

}  // namespace

OtResult ot_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const GroundCost& cost) {
  const int K = cost.size();
  if (mu.size() != K || nu.size() != K) {
    throw std::invalid_argument("ot_distance: measure/cost size mismatch");
  }
  check_measure(mu, "ot_distance");
  check_measure(nu, "ot_distance");

  const double mass_mu = mu.masses.sum();
  const double mass_nu = nu.masses.sum();
  const double mass_scale = std::max(mass_mu, mass_nu);
  if (std::abs(mass_mu - mass_nu) > 1e-9 * std::max(mass_scale, 1e-300)) {
    throw std::invalid_argument(
        "ot_distance: total masses differ; the balanced problem is infeasible");
  }

  OtResult result;
  result.plan.matrix = Eigen::MatrixXd::Zero(K, K);
  if (mass_scale <= 0.0) {
    return result;  // nothing to move
  }

  // Drop zero-mass nodes; rebalance the tiny admissible mismatch exactly.
  std::vector<int> rows, cols;
  for (int k = 0; k < K; ++k) {
    if (mu.masses[k] > 0.0) rows.push_back(k);
    if (nu.masses[k] > 0.0) cols.push_back(k);
  }
  const int n = static_cast<int>(rows.size());
  const int m = static_cast<int>(cols.size());
  Eigen::VectorXd supply(n), demand(m);
  for (int i = 0; i < n; ++i) supply[i] = mu.masses[rows[i]];
  for (int j = 0; j < m; ++j) demand[j] = nu.masses[cols[j]];
  demand *= supply.sum() / demand.sum();

  Eigen::MatrixXd sub_cost(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      sub_cost(i, j) = cost.matrix(rows[i], cols[j]);
    }
  }

  TransportSimplex simplex(supply, demand, sub_cost);
  const Eigen::MatrixXd flow = simplex.solve();

  double value = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double f = std::max(flow(i, j), 0.0);  // clear pivot roundoff
      if (f > 0.0) {
        result.plan.matrix(rows[i], cols[j]) = f;
        value += f * sub_cost(i, j);
      }
    }
  }
  result.value = value;
  return result;
}

double vector_ot_distance(const VectorMeasure& mu, const VectorMeasure& nu,
                          const GroundCost& cost) {
  if (mu.components() != nu.components() ||
      mu.grid_size() != nu.grid_size()) {
    throw std::invalid_argument("vector_ot_distance: shape mismatch");
  }
  double total = 0.0;
  for (int l = 0; l < mu.components(); ++l) {
    total += ot_distance(mu.row(l), nu.row(l), cost).value;
  }
  return total;
}

}  // namespace sfot
