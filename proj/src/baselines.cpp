// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#include "sfot/baselines.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "sfot/rng.hpp"
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sfot {

namespace {

Complex soft_threshold(Complex z, double threshold) {
  const double modulus = std::abs(z);
  if (modulus <= threshold) return {0.0, 0.0};
  return z * (1.0 - threshold / modulus);
}

std::string residual_string(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3g", value);
  return buffer;
}

// Max violation of the lasso optimality conditions at phi:
// inactive l: |c_l| <= lambda, active l: c_l = -lambda * phi_l/|phi_l|,
// where c = G^H(G phi - p).
double lasso_residual(const Eigen::MatrixXcd& G, const Eigen::VectorXcd& p,
                      double lambda, const Eigen::VectorXcd& phi) {
  const Eigen::VectorXcd c = G.adjoint() * (G * phi - p);
  double worst = 0.0;
  for (int l = 0; l < phi.size(); ++l) {
    if (phi[l] == Complex{0.0, 0.0}) {
      worst = std::max(worst, std::abs(c[l]) - lambda);
    } else {
      worst = std::max(worst,
                       std::abs(c[l] + lambda * phi[l] / std::abs(phi[l])));
    }
  }
  return worst;
}

}  // namespace

SensingMatrix build_sensing_matrix(const PlaneWaveDictionary& dict,
                                   const SensorArray& array) {
  SensingMatrix sensing;
  sensing.G.resize(array.size(), dict.size());
  for (int q = 0; q < array.size(); ++q) {
    sensing.G.row(q) = steering_vector(dict, array.positions_m[q]).transpose();
  }
  return sensing;
}

double spectral_norm(const Eigen::MatrixXcd& G) {
  // The start vector is pseudo-random from a fixed seed: structured starts
  // (all-ones, say) can be exact eigenvectors of G^H G for uniform
  // dictionaries on circular arrays, which parks the iteration on the wrong
  // eigenvalue. Clustered top singular values also make the power method
  // slow, so iterate to tolerance rather than a small fixed count; an
  // underestimate here would invalidate the step sizes built from it.
  const int L = static_cast<int>(G.cols());
  Rng rng(0x5fec7a11u);
  Eigen::VectorXcd v(L);
  for (int l = 0; l < L; ++l) {
    v[l] = Complex{rng.normal(), rng.normal()};
  }
  v /= v.norm();
  double eigen_prev = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXcd next = G.adjoint() * (G * v);
    const double eigen = next.norm();
    if (eigen == 0.0) return 0.0;
    v = next / eigen;
    if (std::abs(eigen - eigen_prev) <= 1e-12 * eigen) {
      eigen_prev = eigen;
      break;
    }
    eigen_prev = eigen;
  }
  return std::sqrt(eigen_prev);
}

CoefficientVector tikhonov(const Eigen::MatrixXcd& G,
                           const Eigen::VectorXcd& pressures, double lambda) {
  const int Q = static_cast<int>(G.rows());
  const int L = static_cast<int>(G.cols());
  if (pressures.size() != Q) {
    throw std::invalid_argument("tikhonov: dimension mismatch");
  }
  if (lambda < 0.0) {
    throw std::domain_error("tikhonov: lambda must be >= 0");
  }

  // Stacked real representation: B = [Re G, -Im G; Im G, Re G].
  Eigen::MatrixXd B(2 * Q, 2 * L);
  B.topLeftCorner(Q, L) = G.real();
  B.topRightCorner(Q, L) = -G.imag();
  B.bottomLeftCorner(Q, L) = G.imag();
  B.bottomRightCorner(Q, L) = G.real();
  Eigen::VectorXd y(2 * Q);
  y.head(Q) = pressures.real();
  y.tail(Q) = pressures.imag();

  Eigen::VectorXd x(2 * L);
  if (lambda > 0.0) {
    Eigen::MatrixXd normal = B.transpose() * B;
    normal.diagonal().array() += lambda;
    x = Eigen::LLT<Eigen::MatrixXd>(normal).solve(B.transpose() * y);
  } else {
    if (Q < L) {
      throw std::domain_error(
          "tikhonov: lambda = 0 needs at least as many sensors as waves");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
    if (qr.rank() < 2 * L) {
      throw std::domain_error("tikhonov: singular system at lambda = 0");
    }
    x = qr.solve(y);
  }

  CoefficientVector coeffs;
  coeffs.values.resize(L);
  for (int l = 0; l < L; ++l) {
    coeffs.values[l] = Complex{x[l], x[L + l]};
  }
  return coeffs;
}

CoefficientVector lasso(const Eigen::MatrixXcd& G,
                        const Eigen::VectorXcd& pressures, double lambda,
                        const LassoOptions& opts) {
  if (pressures.size() != G.rows()) {
    throw std::invalid_argument("lasso: dimension mismatch");
  }
  if (!(lambda > 0.0)) {
    throw std::domain_error("lasso: lambda must be positive");
  }
  const double norm = spectral_norm(G);
  const double step = 1.0 / (norm * norm);

  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(G.cols());
  SolverDiagnostics diag;
  for (int iter = 0; iter <= opts.max_iters; ++iter) {
    const double residual = lasso_residual(G, pressures, lambda, phi);
    diag.iterations = iter;
    diag.primal_residual = residual;
    if (residual <= opts.tol) {
      diag.converged = true;
      return {phi};
    }
    if (iter == opts.max_iters) break;
    const Eigen::VectorXcd grad = G.adjoint() * (G * phi - pressures);
    const Eigen::VectorXcd step_point = phi - step * grad;
    for (int l = 0; l < phi.size(); ++l) {
      phi[l] = soft_threshold(step_point[l], step * lambda);
    }
  }
  throw ConvergenceError("lasso: iteration limit reached (residual " +
                             residual_string(diag.primal_residual) + ")",
                         diag);
}

CoefficientVector lad_lasso(const Eigen::MatrixXcd& G,
                            const Eigen::VectorXcd& pressures, double lambda,
                            const LadLassoOptions& opts) {
  if (pressures.size() != G.rows()) {
    throw std::invalid_argument("lad_lasso: dimension mismatch");
  }
  if (!(lambda > 0.0)) {
    throw std::domain_error("lad_lasso: lambda must be positive");
  }
  const int Q = static_cast<int>(G.rows());
  const int L = static_cast<int>(G.cols());
  // tau*sigma*||G||^2 must stay below 1; the power-iteration estimate can
  // undershoot the true norm, so keep a margin.
  const double norm = std::max(spectral_norm(G), 1e-30) * 1.05;
  const double tau = 0.95 / norm;
  const double sigma = 0.95 / norm;

  const auto primal_objective = [&](const Eigen::VectorXcd& x) {
    return (G * x - pressures).cwiseAbs().sum() + lambda * x.cwiseAbs().sum();
  };

  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(L);
  Eigen::VectorXcd x_bar = x;
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(Q);

  SolverDiagnostics diag;
  for (int iter = 0; iter <= opts.max_iters; ++iter) {
    if (iter % 25 == 0 || iter == opts.max_iters) {
      // Feasible dual point: scale y into {|y_q| <= 1, |(G^H y)_l| <= lambda}.
      Eigen::VectorXcd y_feas = y;
      double disc = 1.0;
      for (int q = 0; q < Q; ++q) disc = std::max(disc, std::abs(y_feas[q]));
      y_feas /= disc;
      const Eigen::VectorXcd gty = G.adjoint() * y_feas;
      double over = 1.0;
      for (int l = 0; l < L; ++l) {
        over = std::max(over, std::abs(gty[l]) / lambda);
      }
      y_feas /= over;
      const double primal = primal_objective(x);
      const double dual = -(y_feas.conjugate().cwiseProduct(pressures))
                               .real()
                               .sum();
      const double gap = primal - dual;
      diag.iterations = iter;
      diag.primal_residual = gap;
      if (gap <= opts.rel_gap * std::max(1.0, std::abs(primal))) {
        diag.converged = true;
        return {x};
      }
      if (iter == opts.max_iters) break;
    }

    // dual ascent + disc projection
    y += sigma * (G * x_bar - pressures);
    for (int q = 0; q < Q; ++q) {
      const double modulus = std::abs(y[q]);
      if (modulus > 1.0) y[q] /= modulus;
    }
    // primal descent + soft-threshold
    const Eigen::VectorXcd x_prev = x;
    const Eigen::VectorXcd step_point = x - tau * (G.adjoint() * y);
    for (int l = 0; l < L; ++l) {
      x[l] = soft_threshold(step_point[l], tau * lambda);
    }
    x_bar = 2.0 * x - x_prev;
  }
  throw ConvergenceError("lad_lasso: iteration limit reached (gap " +
                             residual_string(diag.primal_residual) + ")",
                         diag);
}

}  // namespace sfot
