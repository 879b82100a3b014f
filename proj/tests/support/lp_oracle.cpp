#include "support/lp_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace sfot_test {

namespace {

constexpr double kTol = 1e-9;

// Full-tableau simplex over columns [vars | artificials | rhs] with an
// explicit objective row kept in canonical form. Bland's rule throughout.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
      : m_(static_cast<int>(A.rows())), n_(static_cast<int>(A.cols())) {
    T_.resize(m_, n_ + m_ + 1);
    T_.leftCols(n_) = A;
    T_.middleCols(n_, m_) = Eigen::MatrixXd::Identity(m_, m_);
    T_.col(n_ + m_) = b;
    for (int i = 0; i < m_; ++i) {
      if (T_(i, n_ + m_) < 0.0) T_.row(i) = -T_.row(i);
    }
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
  }

  // Minimize obj over allowed columns. Returns false on unboundedness.
  bool run(Eigen::RowVectorXd obj, int allowed_cols) {
    // canonicalize: zero out reduced costs of basic columns
    for (int i = 0; i < m_; ++i) {
      if (obj[basis_[i]] != 0.0) {
        obj -= obj[basis_[i]] * T_.row(i).head(n_ + m_);
      }
    }
    while (true) {
      int entering = -1;
      for (int j = 0; j < allowed_cols; ++j) {
        if (obj[j] < -kTol) {
          entering = j;
          break;  // Bland: lowest index
        }
      }
      if (entering < 0) return true;
      int leaving = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (T_(i, entering) > kTol) {
          const double ratio = T_(i, n_ + m_) / T_(i, entering);
          if (leaving < 0 || ratio < best_ratio - kTol ||
              (ratio < best_ratio + kTol && basis_[i] < basis_[leaving])) {
            best_ratio = ratio;
            leaving = i;
          }
        }
      }
      if (leaving < 0) return false;  // unbounded direction
      pivot(leaving, entering, obj);
    }
  }

  Eigen::VectorXd extract(int n) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n) x[basis_[i]] = T_(i, n_ + m_);
    }
    return x;
  }

  double artificial_mass() const {
    double mass = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) mass += T_(i, n_ + m_);
    }
    return mass;
  }

 private:
  void pivot(int row, int col, Eigen::RowVectorXd& obj) {
    T_.row(row) /= T_(row, col);
    for (int i = 0; i < m_; ++i) {
      if (i != row && T_(i, col) != 0.0) {
        T_.row(i) -= T_(i, col) * T_.row(row);
      }
    }
    if (obj[col] != 0.0) {
      obj -= obj[col] * T_.row(row).head(n_ + m_);
    }
    basis_[row] = col;
  }

  int m_, n_;
  Eigen::MatrixXd T_;
  std::vector<int> basis_;
};

}  // namespace

LpSolution solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& c) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  LpSolution sol;

  Tableau tableau(A, b);

  // Phase 1: minimize the artificial mass.
  Eigen::RowVectorXd phase1 = Eigen::RowVectorXd::Zero(n + m);
  phase1.tail(m).setOnes();
  if (!tableau.run(phase1, n + m)) {
    throw std::logic_error("lp_oracle: phase 1 unbounded");
  }
  if (tableau.artificial_mass() > 1e-7) {
    return sol;  // infeasible
  }

  // Phase 2: artificials may not re-enter (allowed_cols = n).
  Eigen::RowVectorXd phase2 = Eigen::RowVectorXd::Zero(n + m);
  phase2.head(n) = c.transpose();
  sol.feasible = true;
  sol.bounded = tableau.run(phase2, n);
  if (!sol.bounded) return sol;

  sol.x = tableau.extract(n);
  sol.objective = c.dot(sol.x);
  return sol;
}

double transport_lp_value(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                          const Eigen::MatrixXd& cost) {
  const int K = static_cast<int>(cost.rows());
  const int n = K * K;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * K, n);
  Eigen::VectorXd b(2 * K);
  Eigen::VectorXd c(n);
  for (int j = 0; j < K; ++j) {
    for (int k = 0; k < K; ++k) {
      A(j, j * K + k) = 1.0;      // row sum j
      A(K + k, j * K + k) = 1.0;  // col sum k
      c[j * K + k] = cost(j, k);
    }
    b[j] = mu[j];
    b[K + j] = nu[j];
  }
  const LpSolution sol = solve_lp(A, b, c);
  if (!sol.feasible || !sol.bounded) {
    throw std::runtime_error("transport_lp_value: oracle LP failed");
  }
  return sol.objective;
}

double barycenter_lp_value(const std::vector<Eigen::VectorXd>& nus,
                           const Eigen::MatrixXd& cost) {
  const int Q = static_cast<int>(nus.size());
  const int K = static_cast<int>(cost.rows());
  const int plan_vars = Q * K * K;
  const int n = plan_vars + K;  // plans then barycenter
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * Q * K, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * Q * K);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (int q = 0; q < Q; ++q) {
    const int base = q * K * K;
    for (int j = 0; j < K; ++j) {
      for (int k = 0; k < K; ++k) {
        const int var = base + j * K + k;
        A(q * K + j, var) = 1.0;                // row sum = barycenter
        A(Q * K + q * K + k, var) = 1.0;        // col sum = nu_q
        c[var] = cost(j, k) / Q;
      }
      A(q * K + j, plan_vars + j) = -1.0;
      b[Q * K + q * K + j] = nus[q][j];
    }
  }
  const LpSolution sol = solve_lp(A, b, c);
  if (!sol.feasible || !sol.bounded) {
    throw std::runtime_error("barycenter_lp_value: oracle LP failed");
  }
  return sol.objective;
}

}  // namespace sfot_test
