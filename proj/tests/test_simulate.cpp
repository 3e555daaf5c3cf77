#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "nemlab/csv.hpp"
#include "nemlab/errors.hpp"
#include "nemlab/simulate.hpp"

using namespace nemlab;

namespace {

SimConfig discrete_config(double q, double beta, double j, int n, std::size_t steps) {
  SimConfig c;
  c.model = ModelKind::discrete;
  c.discrete.qp = {q, beta};
  c.discrete.j_coupling = j;
  c.discrete.n_investors = n;
  c.steps = steps;
  c.seed = 42;
  return c;
}

std::string csv(const PriceSeries& s) {
  std::ostringstream out;
  write_series_csv(out, s);
  return out.str();
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST_CASE("point mass samples are constant") {
  const std::vector<double> e = {0.0, 0.0, 0.0};
  DiscreteDistribution d = build_discrete({-1, 0, 1}, e, {1.0, 1.0});
  d.probs = {0.0, 0.0, 1.0};
  Rng rng(1);
  for (auto s : sample_investors(d, 100, rng)) CHECK(s == 1);
}

TEST_CASE("uniform three-state frequencies") {
  const std::vector<double> e = {0.0, 0.0, 0.0};
  const auto d = build_discrete({-1, 0, 1}, e, {1.0, 1.0});
  Rng rng(12345);
  const auto draws = sample_investors(d, 1000000, rng);
  std::vector<double> counts(3, 0.0);
  for (auto s : draws) counts[s + 1] += 1.0;
  for (double c : counts) {
    CHECK(c / 1e6 >= 0.332);
    CHECK(c / 1e6 <= 0.335);
  }
}

TEST_CASE("sampling frequencies converge to the probabilities") {
  const std::vector<double> e = {0.7, 0.0, -0.4};
  const auto d = build_discrete({-1, 0, 1}, e, {1.3, 1.0});
  Rng rng(8);
  const std::size_t n = 1000000;
  const auto draws = sample_investors(d, n, rng);
  std::vector<double> counts(3, 0.0);
  for (auto s : draws) counts[s + 1] += 1.0;
  for (int i = 0; i < 3; ++i) {
    const double p = d.probs[i];
    CHECK(std::abs(counts[i] / n - p) < 3.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("sampling is deterministic for a seed") {
  const std::vector<double> e = {0.2, 0.0, -0.1};
  const auto d = build_discrete({-1, 0, 1}, e, {1.0, 1.0});
  Rng a(77);
  Rng b(77);
  CHECK(sample_investors(d, 1000, a) == sample_investors(d, 1000, b));
}

TEST_CASE("grid sampling follows the node masses") {
  XYParams p;
  p.qp = {1.2, 1.0};
  p.j_coupling = 2.0;
  const auto g = angle_distribution(0.6, p);
  Rng rng(5);
  const std::size_t n = 400000;
  const auto draws = sample_investors(g, n, rng);
  double mc = 0.0;
  for (double t : draws) mc += std::cos(t);
  mc /= n;
  const double exact = g.integrate([](double t) { return std::cos(t); });
  CHECK(std::abs(mc - exact) < 4.0 / std::sqrt(static_cast<double>(n)));
  for (double t : draws) CHECK_FALSE(std::find(g.nodes.begin(), g.nodes.end(), t) == g.nodes.end());
}

TEST_CASE("joint sampling returns branch labels and magnitudes") {
  JointParams p;
  p.qp = {1.0, 1.0};
  p.j_coupling = 4.0;
  p.y_max = 2.0;
  const auto branches = joint_distribution(0.5, p);
  Rng rng(6);
  const std::size_t n = 400000;
  const auto draws = sample_investors(std::span<const GridDistribution, 3>(branches), n, rng);
  double ms = 0.0;
  for (const auto& [s, y] : draws) {
    CHECK(y >= 0.0);
    CHECK(y <= 2.0);
    ms += s;
  }
  ms /= n;
  CHECK(std::abs(ms - (branches[2].mass() - branches[0].mass())) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("inverse CDF sampler edges") {
  const InverseCdfSampler s({0.5, 0.5, 0.0}, {1.0, 2.0, 3.0});
  CHECK(s.value_at(0.0) == 1.0);
  CHECK(s.value_at(0.49) == 1.0);
  CHECK(s.value_at(0.5) == 2.0);
  CHECK(s.value_at(1.0) == 2.0);  // never the zero-mass state
  CHECK_THROWS_AS(InverseCdfSampler({0.0, 0.0}, {1.0, 2.0}), std::domain_error);
  CHECK_THROWS_AS(InverseCdfSampler({1.0}, {1.0, 2.0}), std::domain_error);
}

TEST_CASE("zero-field subcritical demand has mean zero") {
  SimConfig c = discrete_config(1.0, 1.0, 0.8, 200, 5000);
  const auto s = run_series(c);
  REQUIRE(s.size() == 5000);
  CHECK(s.failed_steps.empty());
  CHECK(std::abs(mean(s.demand)) < 4.0 * stddev(s.demand) / std::sqrt(5000.0));
}

TEST_CASE("doubling the market depth halves every price change") {
  SimConfig c = discrete_config(1.2, 1.0, 2.0, 100, 1000);
  c.field = {0.9, 0.1, 0.0};
  const auto a = run_series(c);
  c.discrete.market_depth = 2.0;
  const auto b = run_series(c);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b.dx[i] == a.dx[i] / 2.0);
    CHECK(b.demand[i] == a.demand[i]);
  }
}

TEST_CASE("a very deep market does not move the price") {
  SimConfig c = discrete_config(1.0, 1.0, 2.0, 100, 200);
  c.discrete.market_depth = 1e300;
  for (double dx : run_series(c).dx) CHECK(std::abs(dx) < 1e-290);
}

TEST_CASE("series accounting") {
  SimConfig c = discrete_config(1.3, 1.0, 1.9, 50, 2000);
  c.field = {0.8, 0.2, 0.1};
  const auto s = run_series(c);
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    total += s.dx[i];
    CHECK(s.dx[i] == s.demand[i] / c.discrete.market_depth);
    if (i + 1 < s.size()) CHECK(s.x[i + 1] == s.x[i] + s.dx[i]);
  }
  CHECK(s.final_price == s.x.back() + s.dx.back());
  CHECK(total == s.final_price - c.x0);  // x0 = 0: same additions in the same order

  c.x0 = 100.0;
  const auto shifted = run_series(c);
  double sum = 0.0;
  for (double d : shifted.dx) sum += d;
  CHECK(sum == doctest::Approx(shifted.final_price - 100.0).epsilon(1e-12));
}

TEST_CASE("level price mode") {
  SimConfig c = discrete_config(1.0, 1.0, 2.0, 30, 300);
  c.price_mode = PriceMode::level;
  c.x0 = 10.0;
  const auto s = run_series(c);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    CHECK(s.x[i + 1] == 10.0 + s.demand[i] / c.discrete.market_depth);
    CHECK(s.x[i + 1] == s.x[i] + s.dx[i]);
  }
}

TEST_CASE("identical configurations give identical CSV") {
  for (ModelKind kind : {ModelKind::discrete, ModelKind::xy, ModelKind::joint}) {
    SimConfig c = discrete_config(1.2, 1.0, 2.5, 40, 300);
    c.model = kind;
    c.xy.qp = {1.2, 1.0};
    c.xy.j_coupling = 2.5;
    c.xy.n_investors = 40;
    c.joint.qp = {1.1, 1.0};
    c.joint.j_coupling = 4.0;
    c.joint.n_investors = 40;
    c.field = {0.9, 0.1, 0.0};
    const std::string a = csv(run_series(c));
    const std::string b = csv(run_series(c));
    CHECK(a == b);
    c.seed = 43;
    CHECK(csv(run_series(c)) != a);
  }
}

TEST_CASE("CSV layout and round trip") {
  SimConfig c = discrete_config(1.2, 1.0, 2.0, 20, 50);
  c.field = {0.5, 0.3, 0.0};
  const auto s = run_series(c);
  std::istringstream in(csv(s));
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x,dx,demand,field");
  for (std::size_t i = 0; i < s.size(); ++i) {
    REQUIRE(std::getline(in, line));
    const auto cells = split_csv_line(line);
    REQUIRE(cells.size() == 5);
    CHECK(cells[0] == std::to_string(i));
    CHECK(*parse_number(cells[1]) == s.x[i]);
    CHECK(*parse_number(cells[2]) == s.dx[i]);
    CHECK(*parse_number(cells[3]) == s.demand[i]);
    CHECK(*parse_number(cells[4]) == s.field[i]);
  }
}

TEST_CASE("antithetic replica mirrors a symmetric subcritical run") {
  SimConfig c = discrete_config(1.0, 1.0, 0.8, 100, 3000);
  c.field = {0.5, 0.1, 0.0};
  const auto a = run_series(c);
  c.antithetic = true;
  const auto b = run_series(c);
  std::size_t mirrored = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b.field[i] == -a.field[i]);
    if (b.dx[i] == -a.dx[i]) ++mirrored;
  }
  CHECK(mirrored >= a.size() * 999 / 1000);
  // The two marginals agree: same spread, means within sampling error.
  CHECK(stddev(a.dx) == doctest::Approx(stddev(b.dx)).epsilon(0.02));
  const double se = stddev(a.dx) / std::sqrt(static_cast<double>(a.size()));
  CHECK(std::abs(mean(a.dx) - mean(b.dx)) < 8.0 * se);
}

TEST_CASE("infeasible steps reuse the previous equilibrium") {
  // q = 1.5 has a pole once beta (J m + h) reaches 2; a large field gets there.
  SimConfig c = discrete_config(1.5, 1.0, 0.5, 10, 400);
  c.field = {0.0, 2.0, 0.0};
  const auto s = run_series(c);
  CHECK(s.size() == 400);
  CHECK_FALSE(s.failed_steps.empty());
  for (std::size_t k : s.failed_steps) {
    if (k > 0) CHECK(s.order[k] == s.order[k - 1]);
  }
}

TEST_CASE("ensembles use consecutive seeds and do not depend on threads") {
  SimConfig c = discrete_config(1.1, 1.0, 2.0, 30, 200);
  c.field = {0.9, 0.2, 0.0};
  const auto one = run_ensemble(c, 4, 1);
  const auto many = run_ensemble(c, 4, 3);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(csv(one[k]) == csv(many[k]));
    SimConfig single = c;
    single.seed = c.seed + k;
    CHECK(csv(run_series(single)) == csv(one[k]));
  }
}

TEST_CASE("XY and joint demands are bounded by magnitudes") {
  SimConfig c = discrete_config(1.0, 1.0, 0.0, 25, 100);
  c.model = ModelKind::xy;
  c.xy.qp = {1.0, 1.0};
  c.xy.j_coupling = 3.0;
  c.xy.magnitude = 2.0;
  c.xy.n_investors = 25;
  for (double d : run_series(c).demand) CHECK(std::abs(d) <= 50.0 + 1e-12);
  c.model = ModelKind::joint;
  c.joint.qp = {1.0, 1.0};
  c.joint.j_coupling = 4.0;
  c.joint.y_max = 3.0;
  c.joint.n_investors = 25;
  for (double d : run_series(c).demand) CHECK(std::abs(d) <= 75.0 + 1e-12);
}

TEST_CASE("configuration validation") {
  SimConfig c = discrete_config(1.0, 1.0, 1.0, 10, 0);
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c.steps = 10;
  c.field.persistence = 1.0;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c.field.persistence = 0.5;
  c.field.innovation = -1.0;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c.field.innovation = 0.0;
  c.m0 = 2.0;
  CHECK_THROWS_AS(run_series(c), std::domain_error);
}

TEST_CASE("portable generator stream") {
  // std::mt19937_64's 10000th output is fixed by the C++ standard.
  Rng r(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = r.next_u64();
  CHECK(v == 9981545732273789042ULL);
  Rng u(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}
