// Test-side brute-force LP oracle: dense two-phase tableau simplex with
// Bland's rule. Independent of the production transport and barycenter
// solvers; intended for tiny instances only.

#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sfot_test {

struct LpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  bool feasible = false;
  bool bounded = false;
};

/// min c^T x  s.t.  A x = b, x >= 0.
LpSolution solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& c);

/// Balanced transport: min <C, X> with row sums mu and column sums nu.
double transport_lp_value(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                          const Eigen::MatrixXd& cost);

/// Joint barycenter LP over (plans, barycenter):
/// min (1/Q) sum_q <C, m_q>  s.t.  m_q 1 = mu, m_q^T 1 = nu_q, all >= 0.
double barycenter_lp_value(const std::vector<Eigen::VectorXd>& nus,
                           const Eigen::MatrixXd& cost);

}  // namespace sfot_test
