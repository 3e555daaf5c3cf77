// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "nemlab/continuous_market.hpp"
#include "nemlab/errors.hpp"
#include "nemlab/fit.hpp"
#include "nemlab/maxent.hpp"
#include "nemlab/qmath.hpp"
#include "nemlab/simulate.hpp"
#include "nemlab/spin_market.hpp"
#include "nemlab/xy_market.hpp"
#include "oracles.hpp"

using namespace nemlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0.0 && secs >= limit_s) {
    o.pass = false;
    o.detail += " [over the " + std::to_string(limit_s) + " s budget]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d  %-40s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
  return g;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string run_cli_text(const std::vector<std::string>& args, int* code) {
  std::ostringstream out;
  std::ostringstream err;
  *code = cli::run(args, out, err);
  return out.str();
}

}  // namespace

int main() {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  criterion(1, "q -> 1 Gibbs limit", 1.0, [&] {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 1 + static_cast<int>(unit(gen) * 10) % 10;
      std::vector<double> e(n);
      for (double& v : e) v = -5.0 + 10.0 * unit(gen);
      const auto d = build_discrete(e, {1.0 + 1e-9, 1.0});
      std::vector<double> g(n);
      for (int i = 0; i < n; ++i) g[i] = std::exp(-e[i]);
      const double z = std::accumulate(g.begin(), g.end(), 0.0);
      double tv = 0.0;
      for (int i = 0; i < n; ++i) tv += 0.5 * std::abs(d.probs[i] - g[i] / z);
      worst = std::max(worst, tv);
    }
    return Outcome{worst < 1e-6, fmt("max TV distance %.3g", worst)};
  });

  criterion(2, "normalization over 200 random parameters", 10.0, [&] {
    double worst_discrete = 0.0;
    double worst_grid = 0.0;
    int points = 0;
    int skipped = 0;
    while (points < 200) {
      const double q = 0.5 + 1.2 * unit(gen);
      const double beta = 0.1 + 2.9 * unit(gen);
      const double j = 3.0 * unit(gen);
      const double m = -1.0 + 2.0 * unit(gen);
      try {
        ModelParams dp;
        dp.qp = {q, beta};
        dp.j_coupling = j;
        dp.l_coupling = unit(gen);
        dp.mu = -1.0 + 2.0 * unit(gen);
        const auto d = bias_distribution(m, dp);
        worst_discrete = std::max(worst_discrete, std::abs(std::accumulate(d.probs.begin(), d.probs.end(), 0.0) - 1.0));

        XYParams xp;
        xp.qp = {q, beta};
        xp.j_coupling = j;
        worst_grid = std::max(worst_grid, std::abs(angle_distribution(m, xp).mass() - 1.0));

        JointParams jp;
        jp.qp = {q, beta};
        jp.j_coupling = j;
        jp.holding_cost = unit(gen);
        jp.y_max = 0.5 + 1.5 * unit(gen);
        const auto b = joint_distribution(m, jp);
        worst_grid = std::max(worst_grid, std::abs(b[0].mass() + b[1].mass() + b[2].mass() - 1.0));
        ++points;
      } catch (const InfeasibleError&) {
        ++skipped;  // q > 1 pole inside the domain: no distribution exists
      }
    }
    return Outcome{worst_discrete < 1e-12 && worst_grid < 1e-8,
                   fmt2("discrete %.2g, grid/joint %.2g", worst_discrete, worst_grid) +
                       " (" + std::to_string(skipped) + " infeasible draws redrawn)"};
  });

  criterion(3, "escort average vs direct summation", 0.0, [&] {
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 1 + trial % 10;
      std::vector<double> v(n);
      std::vector<double> p(n);
      for (int i = 0; i < n; ++i) {
        v[i] = -5.0 + 10.0 * unit(gen);
        p[i] = unit(gen);
      }
      p[0] += 1e-3;
      const double total = std::accumulate(p.begin(), p.end(), 0.0);
      for (double& x : p) x /= total;
      const double q = 0.2 + 2.8 * unit(gen);
      long double num = 0.0L;
      long double den = 0.0L;
      for (int i = 0; i < n; ++i) {
        const long double w = std::pow(static_cast<long double>(p[i]), static_cast<long double>(q));
        num += w * v[i];
        den += w;
      }
      worst = std::max(worst, std::abs(q_expectation(v, p, q) - static_cast<double>(num / den)));
    }
    return Outcome{worst < 1e-12, fmt("max |difference| %.3g", worst)};
  });

  criterion(4, "discrete critical coupling", 30.0, [&] {
    ModelParams p;
    p.qp = {1.0, 1.0};
    const Onset o = locate_onset(bifurcation_scan(p, grid(1.0, 2.0, 0.01)));
    return Outcome{o.found && std::abs(o.estimate - 1.5) <= 0.01,
                   fmt2("onset bracket midpoint %.4f (analytic 1.5), upper %.2f", o.estimate, o.upper)};
  });

  criterion(5, "XY critical coupling", 60.0, [&] {
    XYParams p;
    p.qp = {1.0, 1.0};
    const Onset o = locate_onset(xy_critical_scan(p, grid(1.5, 2.5, 0.01)));
    return Outcome{o.found && std::abs(o.estimate - 2.0) <= 0.01,
                   fmt2("onset bracket midpoint %.4f (analytic 2.0), upper %.2f", o.estimate, o.upper)};
  });

  criterion(6, "mean-field roots vs bisection", 0.0, [&] {
    double worst[3] = {0.0, 0.0, 0.0};
    int accepted[3] = {0, 0, 0};
    while (accepted[0] < 50) {
      const double q = 0.6 + 1.0 * unit(gen);
      const double beta = 0.5 + 1.5 * unit(gen);
      const double l = 0.5 * unit(gen);
      const double mu = -0.5 + unit(gen);
      const double bj = 1.6 + 3.0 * unit(gen);
      const double j = bj / beta;
      if (q > 1.0 && (q - 1.0) * beta * (j + l + std::abs(mu)) >= 0.9) continue;
      auto f = [&](double m) { return oracle::discrete_bias(q, beta, j, l, mu, 0.0, m); };
      const double ref = oracle::largest_positive_root(f);
      if (!(ref > 1e-3)) continue;
      ModelParams p;
      p.qp = {q, beta};
      p.j_coupling = j;
      p.l_coupling = l;
      p.mu = mu;
      const auto s = self_consistent_bias(p, 0.99);
      worst[0] = std::max(worst[0], s.converged ? std::abs(s.m_star - ref) : 1.0);
      ++accepted[0];
    }
    while (accepted[1] < 50) {
      const double q = 0.6 + 0.9 * unit(gen);
      const double beta = 0.5 + 1.5 * unit(gen);
      const double bj = 2.2 + 4.0 * unit(gen);
      const double j = bj / beta;
      if (q > 1.0 && (q - 1.0) * bj >= 0.9) continue;
      auto f = [&](double m) { return oracle::xy_mean_cos(q, beta, j, 0.0, m); };
      const double ref = oracle::largest_positive_root(f, 400);
      if (!(ref > 1e-3)) continue;
      XYParams p;
      p.qp = {q, beta};
      p.j_coupling = j;
      const auto s = solve_order_parameter(p, 0.99);
      worst[1] = std::max(worst[1], s.converged ? std::abs(s.m_star - ref) : 1.0);
      ++accepted[1];
    }
    while (accepted[2] < 50) {
      const double q = 0.7 + 0.6 * unit(gen);
      const double beta = 0.5 + 1.5 * unit(gen);
      const double y_max = 0.5 + 1.5 * unit(gen);
      const double c = 0.5 * unit(gen);
      const double l = 0.3 * unit(gen);
      const double mu = -0.3 + 0.6 * unit(gen);
      const double j = (3.5 + 6.0 * unit(gen)) / (beta * y_max);
      if (q > 1.0 && (q - 1.0) * beta * y_max * (j + l + std::abs(mu) + c) >= 0.9) continue;
      auto f = [&](double m) {
        return oracle::joint_moments(q, beta, j, l, mu, c, y_max, 0.0, m).mean_sigma;
      };
      const double ref = oracle::largest_positive_root(f, 400);
      if (!(ref > 1e-3)) continue;
      JointParams p;
      p.qp = {q, beta};
      p.j_coupling = j;
      p.l_coupling = l;
      p.mu = mu;
      p.holding_cost = c;
      p.y_max = y_max;
      const auto s = solve_joint(p, 0.99);
      worst[2] = std::max(worst[2], s.converged ? std::abs(s.m_star - ref) : 1.0);
      ++accepted[2];
    }
    const double w = std::max({worst[0], worst[1], worst[2]});
    char buf[200];
    std::snprintf(buf, sizeof buf, "max |m* - root|: discrete %.2g, xy %.2g, joint %.2g", worst[0],
                  worst[1], worst[2]);
    return Outcome{w < 1e-7, buf};
  });

  criterion(7, "contrarian monotonicity", 0.0, [&] {
    int violations = 0;
    double prev = 2.0;
    std::string trace;
    for (int i = 0; i <= 10; ++i) {
      ModelParams p;
      p.qp = {1.0, 1.0};
      p.j_coupling = 2.5;
      p.l_coupling = 0.2 * i;
      const double m = std::abs(positive_branch(p).m_star);
      if (m > prev) ++violations;
      prev = m;
      if (i == 0 || i == 10) trace += fmt(i == 0 ? "|m*| %.4f" : " -> %.4f", m);
    }
    return Outcome{violations == 0, trace + ", " + std::to_string(violations) + " violations"};
  });

  criterion(8, "joint q = 1 magnitude marginal", 0.0, [&] {
    double worst = 0.0;
    for (double c : {0.1, 0.8, 2.5}) {
      for (double beta : {0.5, 1.7}) {
        JointParams p;
        p.qp = {1.0, beta};
        p.holding_cost = c;
        p.y_max = 3.0;
        const auto s = solve_joint(p, 0.3);
        const double k = beta * c;
        for (std::size_t i = 0; i < s.joint_density[0].nodes.size(); ++i) {
          const double y = s.joint_density[0].nodes[i];
          double marginal = 0.0;
          for (const auto& b : s.joint_density) marginal += b.density[i];
          worst = std::max(worst, std::abs(marginal - k * std::exp(-k * y) / (1.0 - std::exp(-k * 3.0))));
        }
      }
    }
    return Outcome{worst < 1e-8, fmt("max pointwise error %.3g", worst)};
  });

  criterion(9, "q-Gaussian fit round trip", 60.0, [&] {
    bool ok = true;
    std::string detail;
    for (double q : {1.0, 1.3, 1.5, 2.0}) {
      std::vector<double> est;
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(1000 * seed + static_cast<std::uint64_t>(q * 10));
        est.push_back(fit_qgaussian(sample_qgaussian(100000, q, 1.0, 0.0, rng)).q_hat);
      }
      const double m = median(est);
      ok = ok && std::abs(m - q) <= 0.05;
      detail += fmt2("%.1f->%.3f ", q, m);
    }
    return Outcome{ok, "true->median q_hat: " + detail};
  });

  criterion(10, "simulated returns are heavy tailed", 120.0, [&] {
    SimConfig c;
    c.model = ModelKind::discrete;
    c.discrete.qp = {1.5, 0.1};
    c.discrete.j_coupling = 15.0;  // beta J = 1.5, above the q = 1.5 onset at 1.0
    c.discrete.n_investors = 1000;
    c.discrete.market_depth = 1.0;
    c.steps = 100000;
    c.seed = 2024;
    c.m0 = 0.5;
    c.field = {0.9, 0.2, 0.0};
    const PriceSeries s = run_series(c);
    const double k = excess_kurtosis(s.dx);
    const FitResult f = fit_qgaussian(s.dx);
    const double fail_rate = static_cast<double>(s.failed_steps.size()) / static_cast<double>(s.size());
    return Outcome{f.q_hat > 1.1 && k > 0.5 && fail_rate < 0.01,
                   fmt2("q_hat %.3f, excess kurtosis %.3f", f.q_hat, k) +
                       fmt(", failed steps %.2g", fail_rate)};
  });

  criterion(11, "byte-identical outputs across runs and threads", 0.0, [&] {
    const std::vector<std::string> sim = {"simulate", "--q", "1.3", "--J", "2", "--N", "200", "--T",
                                          "2000", "--rho", "0.9", "--s", "0.2", "--seed", "99",
                                          "--replicas", "4"};
    const std::vector<std::string> sweep = {"sweep", "--model", "xy", "--q", "1.2", "--grid",
                                            "J=1.5:2.5:0.05", "--grid", "beta=0.8:1.2:0.2"};
    bool same = true;
    for (const auto& base : {sim, sweep}) {
      std::string first;
      for (const char* threads : {"1", "4", "1", "3"}) {
        auto args = base;
        args.insert(args.end(), {"--threads", threads});
        int code = 0;
        const std::string text = run_cli_text(args, &code);
        if (code != 0) same = false;
        if (first.empty()) first = text;
        same = same && text == first && !text.empty();
      }
    }
    return Outcome{same, same ? "simulate and sweep identical for threads 1/4/1/3"
                              : "outputs differ"};
  });

  criterion(12, "mean field vs exact enumeration (N = 10)", 0.0, [&] {
    bool ok = true;
    std::string detail;
    for (double bj : {0.2, 0.5}) {
      ModelParams p;
      p.qp = {1.0, 1.0};
      p.j_coupling = bj;
      p.field = 0.05;
      const double exact = brute_force_full_model(10, p).mean_bias;
      const double mf = self_consistent_bias(p, 0.0).m_star;
      const double rel = std::abs(mf - exact) / std::abs(exact);
      ok = ok && rel < 0.15;
      detail += fmt2("betaJ=%.1f: %.1f%% ", bj, 100.0 * rel);
    }
    return Outcome{ok, "relative gap " + detail};
  });

  std::printf("%s: %d failed\n", failures == 0 ? "ALL PASS" : "SOME FAILED", failures);
  return failures == 0 ? 0 : 1;
}
