// Test-side convex-program oracle: dense primal-dual interior-point method
// for  min 0.5 x^T H x + c^T x  s.t.  E x = d, x >= 0  (H PSD).
// Independent of the production ADMM path. Every solution carries its own
// KKT certificate so tests can verify the oracle before trusting it.

#pragma once

#include <Eigen/Dense>

namespace sfot_test {

struct QpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  // certificate: stationarity, equality feasibility, complementarity
  double kkt_stationarity = 0.0;
  double kkt_equality = 0.0;
  double kkt_complementarity = 0.0;
  int iterations = 0;
  bool converged = false;
};

QpSolution solve_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& c,
                    const Eigen::MatrixXd& E, const Eigen::VectorXd& d,
                    int max_iters = 200);

}  // namespace sfot_test
