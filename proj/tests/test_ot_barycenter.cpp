#include <doctest.h>

#include <cmath>

#include "sfot/ot_solver.hpp"
#include "sfot/rng.hpp"
#include "support/inverse_qp.hpp"
#include "support/lp_oracle.hpp"
#include "support/qp_oracle.hpp"

using namespace sfot;

namespace {

SolverOptions tight_options() {
  SolverOptions opts;
  opts.rel_gap = 1e-10;
  opts.feas_tol = 1e-11;
  opts.max_iters = 400000;
  return opts;
}

DiscreteMeasure random_measure(Rng& rng, int K, double total) {
  DiscreteMeasure m{Eigen::VectorXd(K)};
  for (int k = 0; k < K; ++k) {
    m.masses[k] = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.05, 1.0);
  }
  if (m.masses.sum() == 0.0) m.masses[0] = 1.0;
  m.masses *= total / m.masses.sum();
  return m;
}

BarycenterProblem tiny_problem(Rng& rng, int Q, int L, int K, double gamma,
                               double eta) {
  BarycenterProblem problem;
  problem.grid = make_phase_grid(K);
  problem.cost = make_ground_cost(problem.grid, gamma);
  problem.eta = eta;
  problem.measurements.resize(Q);
  problem.steering.resize(Q, L);
  for (int q = 0; q < Q; ++q) {
    problem.measurements[q] = Complex{rng.normal(), rng.normal()};
    for (int l = 0; l < L; ++l) {
      problem.steering(q, l) = std::polar(1.0, rng.uniform(-3.1, 3.1));
    }
  }
  return problem;
}

}  // namespace

TEST_CASE("barycenter of identical Diracs is that Dirac") {
  const PhaseGrid grid = make_phase_grid(7);
  const GroundCost cost = make_ground_cost(grid, 0.2);
  DiscreteMeasure dirac{Eigen::VectorXd::Zero(7)};
  dirac.masses[3] = 1.4;
  const std::vector<DiscreteMeasure> inputs(4, dirac);

  const BarycenterLpResult result =
      ot_barycenter_detailed(inputs, cost, tight_options());
  CHECK(result.objective == doctest::Approx(0.2 * 1.4).epsilon(1e-7));
  CHECK(result.barycenter.masses[3] == doctest::Approx(1.4).epsilon(1e-6));
  CHECK(total_mass(result.barycenter) == doctest::Approx(1.4).epsilon(1e-6));
}

TEST_CASE("barycenter of adjacent unit Diracs attains the split-invariant objective") {
  const int K = 10;
  const PhaseGrid grid = make_phase_grid(K);
  const double gamma = 0.15;
  const GroundCost cost = make_ground_cost(grid, gamma);
  DiscreteMeasure a{Eigen::VectorXd::Zero(K)}, b{Eigen::VectorXd::Zero(K)};
  a.masses[4] = 1.0;
  b.masses[5] = 1.0;

  // every split between the two nodes gives the same value:
  // gamma + (1 - cos(dpsi)); cross-checked against the joint LP oracle
  const double dpsi = grid.nodes_rad[5] - grid.nodes_rad[4];
  const double expected = gamma + (1.0 - std::cos(dpsi));
  const double oracle = sfot_test::barycenter_lp_value(
      {a.masses, b.masses}, cost.matrix);
  CHECK(oracle == doctest::Approx(expected).epsilon(1e-9));

  const BarycenterLpResult result =
      ot_barycenter_detailed({a, b}, cost, tight_options());
  CHECK(result.objective == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("barycenter objective matches the joint LP oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    const int K = 3 + trial % 2;  // 3..4
    const int Q = 2 + trial % 2;  // 2..3
    const PhaseGrid grid = make_phase_grid(K);
    const GroundCost cost = make_ground_cost(grid, 0.25);
    const double total = rng.uniform(0.5, 2.0);
    std::vector<DiscreteMeasure> measures;
    std::vector<Eigen::VectorXd> masses;
    for (int q = 0; q < Q; ++q) {
      measures.push_back(random_measure(rng, K, total));
      masses.push_back(measures.back().masses);
    }
    const double oracle = sfot_test::barycenter_lp_value(masses, cost.matrix);
    const BarycenterLpResult result =
        ot_barycenter_detailed(measures, cost, tight_options());
    CHECK(std::abs(result.objective - oracle) <= 1e-7 * std::max(1.0, oracle));

    // marginal structure of the returned plans
    for (int q = 0; q < Q; ++q) {
      CHECK((result.plans[q].col_sums() - masses[q]).lpNorm<Eigen::Infinity>() <
            1e-8);
      CHECK((result.plans[q].row_sums() - result.barycenter.masses)
                .lpNorm<Eigen::Infinity>() < 1e-6);
    }
  }
}

TEST_CASE("barycenter rejects mismatched masses") {
  const PhaseGrid grid = make_phase_grid(4);
  const GroundCost cost = make_ground_cost(grid, 0.2);
  DiscreteMeasure a{Eigen::VectorXd::Constant(4, 0.25)};
  DiscreteMeasure b{Eigen::VectorXd::Constant(4, 0.26)};
  CHECK_THROWS_AS(ot_barycenter({a, b}, cost), std::invalid_argument);
}

TEST_CASE("assemble_problem shapes and contents") {
  ScenarioConfig config;
  config.num_sensors = 9;
  config.estimation_grid_size = 50;
  config.rng_seed = 3;
  auto [scene, measurements] = simulate_scenario(config);
  const BarycenterProblem problem = assemble_problem(
      measurements, scene.dictionary, make_phase_grid(50), 0.1, 10.0);
  CHECK(problem.steering.rows() == 9);
  CHECK(problem.steering.cols() == 50);
  CHECK(problem.grid.size() == 50);

  // single sensor at the origin: steering row is all ones
  MeasurementSet single;
  single.pressures = Eigen::VectorXcd::Constant(1, Complex{1.0, 0.0});
  single.array.positions_m = {Point2{0.0, 0.0}};
  single.frequency_hz = 1000.0;
  single.speed_of_sound_mps = 343.0;
  const auto dict = PlaneWaveDictionary::uniform(1, 1000.0);
  const BarycenterProblem p1 =
      assemble_problem(single, dict, make_phase_grid(4), 0.1, 1.0);
  CHECK(p1.steering.rows() == 1);
  CHECK(p1.steering.cols() == 1);
  CHECK(std::abs(std::abs(p1.steering(0, 0)) - 1.0) < 1e-14);
  CHECK(std::abs(p1.steering(0, 0) - Complex{1.0, 0.0}) < 1e-14);

  CHECK_THROWS_AS(assemble_problem(single, dict, make_phase_grid(4), 0.0, 1.0),
                  std::domain_error);
}

TEST_CASE("zero measurements give the zero solution") {
  Rng rng(41);
  BarycenterProblem problem = tiny_problem(rng, 2, 2, 4, 0.3, 5.0);
  problem.measurements.setZero();
  const BarycenterSolution solution = solve_barycenter(problem, tight_options());
  CHECK(solution.objective <= 1e-9);
  CHECK(solution.barycenter.masses.cwiseAbs().maxCoeff() < 1e-7);
  for (const auto& per_sensor : solution.plans) {
    for (const auto& plan : per_sensor) {
      CHECK(plan.matrix.cwiseAbs().maxCoeff() < 1e-7);
    }
  }
}

TEST_CASE("inverse solver matches the interior-point oracle on tiny instances") {
  Rng rng(43);
  for (int trial = 0; trial < 4; ++trial) {
    const int Q = 2 + trial % 2;
    const int L = 2;
    const int K = 3 + trial % 3;
    const BarycenterProblem problem =
        tiny_problem(rng, Q, L, K, 0.2 + 0.1 * trial, 4.0 + 2.0 * trial);

    const sfot_test::InverseQp qp = sfot_test::build_inverse_qp(problem);
    const sfot_test::QpSolution oracle =
        sfot_test::solve_qp(qp.H, qp.c, qp.E, qp.d);
    REQUIRE(oracle.converged);
    REQUIRE(oracle.kkt_stationarity < 1e-8);
    REQUIRE(oracle.kkt_equality < 1e-8);
    const double oracle_objective = oracle.objective + qp.constant;

    const BarycenterSolution solution =
        solve_barycenter(problem, tight_options());
    CHECK(std::abs(solution.objective - oracle_objective) <=
          1e-6 * std::max(1.0, std::abs(oracle_objective)));
  }
}

TEST_CASE("noise-free on-grid wave is recovered") {
  const int Q = 8, L = 8, K = 16;
  const auto dict = PlaneWaveDictionary::uniform(L, 1000.0);
  const SensorArray array = SensorArray::circular(Q, 0.25);
  const PhaseGrid grid = make_phase_grid(K);

  // single wave on the dictionary grid with an on-grid phase
  const int wave = 2;
  const Complex alpha = 0.9 * std::polar(1.0, grid.nodes_rad[10]);
  MeasurementSet measurements;
  measurements.array = array;
  measurements.frequency_hz = dict.frequency_hz;
  measurements.speed_of_sound_mps = dict.speed_of_sound_mps;
  measurements.pressures.resize(Q);
  for (int q = 0; q < Q; ++q) {
    measurements.pressures[q] =
        steering_vector(dict, array.positions_m[q])[wave] * alpha;
  }

  SolverOptions opts;
  opts.rel_gap = 1e-8;
  opts.feas_tol = 1e-9;
  opts.max_iters = 200000;
  const CoefficientVector estimate =
      estimate_ot(measurements, dict, grid, 1e-3, 1e4, opts);
  CHECK(std::abs(estimate.values[wave] - alpha) <= 1e-2 * std::abs(alpha));
  for (int l = 0; l < L; ++l) {
    if (l != wave) CHECK(std::abs(estimate.values[l]) <= 1e-3);
  }
}

TEST_CASE("solution invariants on a random instance") {
  Rng rng(47);
  const BarycenterProblem problem = tiny_problem(rng, 3, 2, 6, 0.1, 10.0);
  SolverOptions opts;
  opts.rel_gap = 1e-8;
  opts.feas_tol = 1e-9;
  opts.max_iters = 300000;
  const BarycenterSolution solution = solve_barycenter(problem, opts);

  const double feas = 1e-6;
  double mass_scale = 1.0 + solution.barycenter.masses.cwiseAbs().maxCoeff();
  for (int q = 0; q < 3; ++q) {
    for (int l = 0; l < 2; ++l) {
      const auto& plan = solution.plans[q][l].matrix;
      CHECK(plan.minCoeff() >= 0.0);
      // marginal conservation
      CHECK((plan.rowwise().sum().transpose() -
             solution.barycenter.masses.row(l))
                .lpNorm<Eigen::Infinity>() <= feas * mass_scale);
      CHECK((plan.colwise().sum() - solution.sensor_measures[q].masses.row(l))
                .lpNorm<Eigen::Infinity>() <= 1e-12);
      // mass equality between the barycenter and the sensor measure
      CHECK(std::abs(plan.rowwise().sum().sum() -
                     solution.sensor_measures[q].masses.row(l).sum()) <=
            feas * mass_scale);
    }
  }

  // sparsity: gamma * total barycenter mass dominates gamma * l1 norm of
  // the extracted coefficients
  const CoefficientVector coeffs = extract_coefficients(solution, problem.grid);
  double mass_sum = 0.0, l1 = 0.0;
  for (int l = 0; l < 2; ++l) {
    mass_sum += solution.barycenter.masses.row(l).sum();
    l1 += std::abs(coeffs.values[l]);
  }
  CHECK(problem.cost.gamma * mass_sum >= problem.cost.gamma * l1 - 1e-7);
}

TEST_CASE("objective is convex along plan segments") {
  Rng rng(53);
  const BarycenterProblem problem = tiny_problem(rng, 2, 2, 4, 0.2, 3.0);
  const int K = 4;

  // two feasible points built from lifted random coefficients
  const auto feasible_plans = [&](int seed) {
    Rng local(seed);
    std::vector<std::vector<TransportPlan>> plans(
        2, std::vector<TransportPlan>(2));
    for (int l = 0; l < 2; ++l) {
      Eigen::MatrixXd shared = Eigen::MatrixXd::Zero(K, K);
      for (int j = 0; j < K; ++j) {
        for (int k = 0; k < K; ++k) {
          shared(j, k) = local.uniform(0.0, 0.5);
        }
      }
      for (int q = 0; q < 2; ++q) {
        plans[q][l].matrix = shared;  // equal row sums across sensors
      }
    }
    return plans;
  };
  const auto x1 = feasible_plans(1);
  const auto x2 = feasible_plans(2);
  const double f1 = inverse_barycenter_objective(problem, x1);
  const double f2 = inverse_barycenter_objective(problem, x2);
  for (double t : {0.25, 0.5, 0.75}) {
    std::vector<std::vector<TransportPlan>> mix(2,
                                                std::vector<TransportPlan>(2));
    for (int q = 0; q < 2; ++q) {
      for (int l = 0; l < 2; ++l) {
        mix[q][l].matrix =
            t * x1[q][l].matrix + (1.0 - t) * x2[q][l].matrix;
      }
    }
    CHECK(inverse_barycenter_objective(problem, mix) <=
          t * f1 + (1.0 - t) * f2 + 1e-9);
  }
}

TEST_CASE("solver is deterministic") {
  Rng rng(59);
  const BarycenterProblem problem = tiny_problem(rng, 2, 2, 5, 0.15, 8.0);
  SolverOptions opts;
  opts.max_iters = 100000;
  const BarycenterSolution a = solve_barycenter(problem, opts);
  const BarycenterSolution b = solve_barycenter(problem, opts);
  CHECK(std::abs(a.objective - b.objective) <= 1e-10);
  CHECK(a.diagnostics.iterations == b.diagnostics.iterations);
}

TEST_CASE("iteration cap raises a convergence error with the best iterate") {
  Rng rng(61);
  const BarycenterProblem problem = tiny_problem(rng, 2, 2, 4, 0.2, 5.0);
  SolverOptions opts;
  opts.max_iters = 3;
  opts.rel_gap = 1e-14;
  opts.feas_tol = 1e-14;
  CHECK_THROWS_AS(solve_barycenter(problem, opts), BarycenterConvergenceError);
  try {
    solve_barycenter(problem, opts);
  } catch (const BarycenterConvergenceError& ex) {
    CHECK(ex.best_iterate != nullptr);
    CHECK(ex.diagnostics.iterations == 3);
    CHECK(ex.diagnostics.primal_residual > 0.0);
  }
}

TEST_CASE("non-finite data is rejected") {
  Rng rng(67);
  BarycenterProblem problem = tiny_problem(rng, 2, 2, 4, 0.2, 5.0);
  problem.measurements[0] = Complex{std::nan(""), 0.0};
  CHECK_THROWS_AS(solve_barycenter(problem, {}), std::invalid_argument);
}

TEST_CASE("extraction is the per-row first moment") {
  const PhaseGrid grid = make_phase_grid(12);
  BarycenterSolution solution;
  solution.barycenter.masses = Eigen::MatrixXd::Zero(3, 12);
  solution.barycenter.masses(0, 5) = 0.8;   // Dirac row
  solution.barycenter.masses(2, 1) = 0.3;
  solution.barycenter.masses(2, 7) = 0.4;

  const CoefficientVector coeffs = extract_coefficients(solution, grid);
  CHECK(std::abs(coeffs.values[0] -
                 0.8 * std::polar(1.0, grid.nodes_rad[5])) < 1e-14);
  CHECK(std::abs(coeffs.values[1]) == 0.0);
  const Complex expected = 0.3 * std::polar(1.0, grid.nodes_rad[1]) +
                           0.4 * std::polar(1.0, grid.nodes_rad[7]);
  CHECK(std::abs(coeffs.values[2] - expected) < 1e-14);

  CHECK_THROWS_AS(extract_coefficients(solution, make_phase_grid(8)),
                  std::invalid_argument);
}
