#include <doctest.h>

#include <complex>
#include <numbers>

#include "sfot/model.hpp"
#include "sfot/rng.hpp"

using namespace sfot;

namespace {

constexpr double kPi = std::numbers::pi;

// Term-by-term field summation in extended precision.
Complex field_oracle(const Eigen::VectorXd& dirs, const Eigen::VectorXcd& amps,
                     double k, const Point2& r) {
  std::complex<long double> acc{0.0L, 0.0L};
  for (int l = 0; l < dirs.size(); ++l) {
    const long double phase =
        -static_cast<long double>(k) *
        (std::cos(static_cast<long double>(dirs[l])) * r.x() +
         std::sin(static_cast<long double>(dirs[l])) * r.y());
    const std::complex<long double> steering{std::cos(phase), std::sin(phase)};
    acc += std::complex<long double>(amps[l]) * steering;
  }
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

PlaneWaveDictionary unit_wavenumber_dict(Eigen::VectorXd dirs) {
  // k = 2*pi*f/c = 1 when f = c/(2*pi)
  return PlaneWaveDictionary::from_directions(std::move(dirs), 343.0 / (2.0 * kPi),
                                              343.0);
}

}  // namespace

TEST_CASE("wavenumber follows 2*pi*f/c") {
  CHECK(wavenumber(1000.0, 343.0) == doctest::Approx(2.0 * kPi * 1000.0 / 343.0)
                                         .epsilon(1e-15));
  CHECK(wavenumber(343.0 / (2.0 * kPi), 343.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(wavenumber(1500.0, 343.0) == doctest::Approx(2.0 * kPi * 1500.0 / 343.0)
                                         .epsilon(1e-15));
  CHECK_THROWS_AS(wavenumber(0.0, 343.0), std::domain_error);
  CHECK_THROWS_AS(wavenumber(1000.0, -1.0), std::domain_error);
}

TEST_CASE("uniform dictionary invariants") {
  const auto dict = PlaneWaveDictionary::uniform(50, 1000.0);
  CHECK(dict.size() == 50);
  CHECK(dict.wavenumber_radpm ==
        doctest::Approx(wavenumber(1000.0, 343.0)).epsilon(1e-15));
  for (int l = 0; l < dict.size(); ++l) {
    CHECK(dict.directions_rad[l] >= -kPi);
    CHECK(dict.directions_rad[l] < kPi);
    if (l > 0) CHECK(dict.directions_rad[l] > dict.directions_rad[l - 1]);
  }
  CHECK(dict.directions_rad[0] == doctest::Approx(-kPi));

  Eigen::VectorXd bad(2);
  bad << 0.5, 0.5;
  CHECK_THROWS_AS(PlaneWaveDictionary::from_directions(bad, 1000.0, 343.0),
                  std::domain_error);
  Eigen::VectorXd outside(1);
  outside << kPi;  // right-open interval
  CHECK_THROWS_AS(PlaneWaveDictionary::from_directions(outside, 1000.0, 343.0),
                  std::domain_error);
}

TEST_CASE("steering vector basics") {
  const auto dict = PlaneWaveDictionary::uniform(7, 1200.0);
  const Eigen::VectorXcd at_origin = steering_vector(dict, {0.0, 0.0});
  for (int l = 0; l < dict.size(); ++l) {
    CHECK(std::abs(at_origin[l] - Complex{1.0, 0.0}) < 1e-15);
  }

  Eigen::VectorXd single(1);
  single << 0.0;
  const auto unit = unit_wavenumber_dict(single);
  const Eigen::VectorXcd g = steering_vector(unit, {kPi, 0.0});
  CHECK(std::abs(g[0] - Complex{-1.0, 0.0}) < 1e-12);
}

TEST_CASE("steering vector entries have unit modulus") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto dict =
        PlaneWaveDictionary::uniform(3 + trial, 500.0 + 100.0 * trial);
    const Point2 r{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    const Eigen::VectorXcd g = steering_vector(dict, r);
    for (int l = 0; l < g.size(); ++l) {
      CHECK(std::abs(std::abs(g[l]) - 1.0) < 1e-14);
    }
  }
}

TEST_CASE("field pressure of a single unit coefficient") {
  const auto dict = PlaneWaveDictionary::uniform(5, 900.0);
  CoefficientVector coeffs{Eigen::VectorXcd::Zero(5)};
  coeffs.values[0] = 1.0;
  const Point2 r{0.13, -0.27};
  const Complex expected =
      std::polar(1.0, -dict.wavenumber_radpm * dict.direction_unit(0).dot(r));
  CHECK(std::abs(field_pressure(dict, coeffs, r) - expected) < 1e-15);

  coeffs.values.setZero();
  CHECK(field_pressure(dict, coeffs, r) == Complex{0.0, 0.0});

  CoefficientVector wrong{Eigen::VectorXcd::Zero(4)};
  CHECK_THROWS_AS(field_pressure(dict, wrong, r), std::invalid_argument);
}

TEST_CASE("field pressure matches extended-precision summation") {
  Rng rng(7);
  Eigen::VectorXd dirs(3);
  dirs << -2.0, 0.4, 2.6;
  const auto dict = PlaneWaveDictionary::from_directions(dirs, 1000.0, 343.0);
  CoefficientVector coeffs{Eigen::VectorXcd(3)};
  for (int l = 0; l < 3; ++l) {
    coeffs.values[l] = Complex{rng.normal(), rng.normal()};
  }
  for (int n = 0; n < 20; ++n) {
    const Point2 r{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const Complex expected =
        field_oracle(dirs, coeffs.values, dict.wavenumber_radpm, r);
    CHECK(std::abs(field_pressure(dict, coeffs, r) - expected) < 1e-13);
  }
}

TEST_CASE("field linearity") {
  Rng rng(11);
  const auto dict = PlaneWaveDictionary::uniform(6, 1000.0);
  CoefficientVector phi1{Eigen::VectorXcd(6)}, phi2{Eigen::VectorXcd(6)};
  for (int l = 0; l < 6; ++l) {
    phi1.values[l] = Complex{rng.normal(), rng.normal()};
    phi2.values[l] = Complex{rng.normal(), rng.normal()};
  }
  const Complex a{0.7, -1.2}, b{-0.3, 0.8};
  for (int n = 0; n < 10; ++n) {
    const Point2 r{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};
    const CoefficientVector mixed{a * phi1.values + b * phi2.values};
    const Complex lhs = field_pressure(dict, mixed, r);
    const Complex rhs =
        a * field_pressure(dict, phi1, r) + b * field_pressure(dict, phi2, r);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("plane-wave translation identity") {
  Rng rng(13);
  const auto dict = PlaneWaveDictionary::uniform(9, 1400.0);
  for (int l = 0; l < dict.size(); l += 3) {
    CoefficientVector coeffs{Eigen::VectorXcd::Zero(9)};
    coeffs.values[l] = Complex{rng.normal(), rng.normal()};
    const Point2 r{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
    const Point2 d{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
    const Complex shifted = field_pressure(dict, coeffs, r + d);
    const Complex factor = std::polar(
        1.0, -dict.wavenumber_radpm * dict.direction_unit(l).dot(d));
    const Complex expected = field_pressure(dict, coeffs, r) * factor;
    CHECK(std::abs(shifted - expected) <=
          1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("field grid samples cell centers") {
  const auto dict = PlaneWaveDictionary::uniform(4, 800.0);
  CoefficientVector coeffs{Eigen::VectorXcd(4)};
  coeffs.values << Complex{1.0, 0.2}, Complex{0.0, -0.5}, Complex{0.3, 0.0},
      Complex{-0.1, 0.1};
  const Region region{-0.3, 0.3, -0.2, 0.4};

  const Eigen::MatrixXcd one = field_grid(dict, coeffs, region, 1, 1);
  CHECK(one.rows() == 1);
  CHECK(std::abs(one(0, 0) - field_pressure(dict, coeffs, {0.0, 0.1})) < 1e-15);

  const CoefficientVector zero{Eigen::VectorXcd::Zero(4)};
  CHECK(field_grid(dict, zero, region, 3, 3).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXcd grid = field_grid(dict, coeffs, region, 3, 3);
  const double dx = region.width() / 3, dy = region.height() / 3;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Point2 r{region.xmin + (i + 0.5) * dx, region.ymin + (j + 0.5) * dy};
      CHECK(std::abs(grid(i, j) - field_pressure(dict, coeffs, r)) < 1e-15);
    }
  }

  CHECK_THROWS_AS(field_grid(dict, coeffs, {0.0, 0.0, 0.0, 1.0}, 2, 2),
                  std::domain_error);
  CHECK_THROWS_AS(field_grid(dict, coeffs, region, 0, 2), std::domain_error);
}
