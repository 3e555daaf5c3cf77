#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nemlab/errors.hpp"
#include "nemlab/xy_market.hpp"
#include "oracles.hpp"

using namespace nemlab;

namespace {

XYParams make(double q, double beta, double j) {
  XYParams p;
  p.qp = {q, beta};
  p.j_coupling = j;
  return p;
}

double oracle_root(const XYParams& p) {
  return oracle::largest_positive_root(
      [&](double m) { return oracle::xy_mean_cos(p.qp.q, p.qp.beta, p.j_coupling, p.field, m); },
      400);
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
  return g;
}

}  // namespace

TEST_CASE("cosine energy values") {
  CHECK(xy_energy(std::numbers::pi / 2, 0.8, make(1.0, 1.0, 3.0)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(xy_energy(std::numbers::pi / 2, 0.8, make(1.0, 1.0, 3.0))) < 1e-15);
  CHECK(xy_energy(0.0, 1.0, make(1.0, 1.0, 2.0)) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(xy_energy(std::numbers::pi, 0.5, make(1.0, 1.0, 2.0)) == doctest::Approx(1.0).epsilon(1e-15));
  const XYParams p = make(1.0, 1.0, 1.7);
  for (double t : {0.1, 0.9, 1.4}) {
    CHECK(xy_energy(t, 0.3, p) == doctest::Approx(xy_energy(std::numbers::pi - t, -0.3, p)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(xy_energy(-0.1, 0.0, p), std::domain_error);
  CHECK_THROWS_AS(xy_energy(3.2, 0.0, p), std::domain_error);
}

TEST_CASE("no coupling gives a flat density") {
  for (double q : {0.7, 1.0, 1.6}) {
    const auto s = solve_order_parameter(make(q, 1.0, 0.0), 0.4);
    CHECK(std::abs(s.m_star) < 1e-12);
    for (double d : s.distribution.density) CHECK(d == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-13));
  }
}

TEST_CASE("below the critical coupling M* = 0") {
  const XYParams p = make(1.0, 1.0, 1.5);
  const auto s = solve_order_parameter(p, 0.5);
  CHECK(s.converged);
  CHECK(std::abs(s.m_star) < 1e-8);
  CHECK(oracle_root(p) == 0.0);
}

TEST_CASE("supercritical M* matches bisection over adaptive quadrature") {
  const XYParams p = make(1.0, 1.0, 3.0);
  const auto s = solve_order_parameter(p, 0.5);
  CHECK(s.converged);
  const double ref = oracle_root(p);
  CHECK(ref > 0.1);
  CHECK(std::abs(s.m_star - ref) < 1e-7);
  CHECK(s.residual < 1e-9);
}

TEST_CASE("price mapping uses the fixed magnitude") {
  XYParams p = make(1.2, 1.0, 3.0);
  p.magnitude = 2.5;
  p.n_investors = 40;
  p.market_depth = 8.0;
  const auto s = solve_order_parameter(p, 0.5);
  CHECK(s.price_change == doctest::Approx(40 * 2.5 * s.m_star / 8.0).epsilon(1e-14));
}

TEST_CASE("order parameter is the ordinary average for every q") {
  for (double q : {0.7, 1.0, 1.3}) {
    const XYParams p = make(q, 1.0, 2.8);
    const auto s = solve_order_parameter(p, 0.6);
    const double ordinary = s.distribution.integrate([](double t) { return std::cos(t); });
    CHECK(s.m_star == doctest::Approx(ordinary).epsilon(1e-9));
    CHECK(std::abs(s.m_star - oracle::xy_mean_cos(q, 1.0, 2.8, 0.0, s.m_star)) < 1e-9);
  }
}

TEST_CASE("solution map is odd") {
  for (double q : {0.8, 1.0, 1.3}) {
    const XYParams p = make(q, 1.0, 3.0);
    const auto a = solve_order_parameter(p, 0.5);
    const auto b = solve_order_parameter(p, -0.5);
    CHECK(a.m_star == doctest::Approx(-b.m_star).epsilon(1e-9));
  }
}

TEST_CASE("density is positive and normalized") {
  for (double q : {0.6, 1.0, 1.4}) {
    for (double m : {-0.6, 0.0, 0.9}) {
      const auto g = angle_distribution(m, make(q, 1.3, 1.9));
      CHECK(g.mass() == doctest::Approx(1.0).epsilon(1e-12));
      for (double d : g.density) CHECK(d >= 0.0);
    }
  }
}

TEST_CASE("doubling the quadrature order leaves M* unchanged") {
  for (double q : {0.7, 1.0, 1.3}) {
    XYParams p = make(q, 1.0, 3.0);
    const auto a = solve_order_parameter(p, 0.5);
    p.quad.initial_order = 2 * a.distribution.order;
    p.quad.max_order = 4 * a.distribution.order;
    const auto b = solve_order_parameter(p, 0.5);
    CHECK(std::abs(a.m_star - b.m_star) < 1e-8);
  }
}

TEST_CASE("critical coupling at q = 1") {
  const auto scan = xy_critical_scan(make(1.0, 1.0, 1.0), grid(1.5, 2.5, 0.01));
  const Onset onset = locate_onset(scan);
  REQUIRE(onset.found);
  CHECK(onset.upper >= 1.99);
  CHECK(onset.lower <= 2.01);
  CHECK(std::abs(onset.estimate - 2.0) <= 0.01);
}

TEST_CASE("no coupling means no order on the scan") {
  XYParams p = make(1.0, 1.0, 0.0);
  const auto scan = xy_critical_scan(p, std::vector<double>(5, 0.0));
  for (const auto& pt : scan) CHECK(pt.m_plus == 0.0);
}

TEST_CASE("q = 1.4 onset matches bisection") {
  const XYParams base = make(1.4, 1.0, 1.0);
  const auto g = grid(1.5, 2.5, 0.01);
  const auto scan = xy_critical_scan(base, g);
  const Onset onset = locate_onset(scan);
  REQUIRE(onset.found);
  double ref_upper = std::nan("");
  for (double bj : g) {
    XYParams p = base;
    p.j_coupling = bj;
    if (oracle_root(p) > 1e-6) {
      ref_upper = bj;
      break;
    }
  }
  REQUIRE(std::isfinite(ref_upper));
  CHECK(std::abs(onset.upper - ref_upper) <= 0.01 + 1e-12);
}

TEST_CASE("full circle variant") {
  XYParams p = make(1.0, 1.0, 3.0);
  p.domain = AngleDomain::full_circle;
  CHECK(p.interval().upper == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-15));
  const auto s = solve_order_parameter(p, 0.5);
  CHECK(s.converged);
  CHECK(s.m_star > 0.0);
  CHECK(std::abs(s.m_star - s.distribution.integrate([](double t) { return std::cos(t); })) < 1e-9);
}

TEST_CASE("invalid XY parameters") {
  XYParams p = make(1.0, 1.0, 1.0);
  p.magnitude = 0.0;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  p = make(1.0, 1.0, -1.0);
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  CHECK_THROWS_AS(solve_order_parameter(make(1.0, 1.0, 1.0), -1.2), std::domain_error);
}
