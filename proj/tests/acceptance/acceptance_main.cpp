// Runs each acceptance criterion at its stated tolerance and time limit and
// prints one PASS/FAIL line per criterion. Exit status is 0 iff all pass.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "trppm/displacement.hpp"
#include "trppm/problem.hpp"
#include "trppm/prox.hpp"
#include "trppm/solver.hpp"
#include "trppm/verify.hpp"

using namespace trppm;

namespace {

struct Outcome {
  bool passed = true;
  std::string summary;

  void require(bool ok, const std::string& what) {
    if (!ok && passed) {
      passed = false;
      summary = what;
    }
  }
};

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double d : values) v[i++] = d;
  return v;
}

Matrix diag(std::initializer_list<double> values) { return vec(values).asDiagonal(); }

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

// 1. PPM on the quartic decays like k^(-1/2) in x and k^(-2) in f.
Outcome ppm_sublinearity() {
  SolverConfig c;
  c.regime = Regime::kPpm;
  c.lambda = 1.0;
  c.max_iters = 100000;
  const Trace trace = run(make_quartic1d(), vec({10.0}), c);
  Outcome out;
  out.require(trace.records.size() == 100001, "trace shorter than 1e5 steps");
  if (!out.passed) return out;
  std::vector<double> logk;
  std::vector<double> logx;
  std::vector<double> logf;
  for (std::uint64_t k = 1000; k <= 100000; ++k) {
    const auto& r = trace.records[k];
    logk.push_back(std::log(static_cast<double>(k)));
    logx.push_back(std::log(std::abs(r.x[0])));
    logf.push_back(std::log(r.f_gap));
  }
  const double sx = slope(logk, logx);
  const double sf = slope(logk, logf);
  out.require(sx >= -0.55 && sx <= -0.45, fmt::format("x slope {} outside [-0.55, -0.45]", sx));
  out.require(sf >= -2.1 && sf <= -1.9, fmt::format("f_gap slope {} outside [-2.1, -1.9]", sf));
  if (out.passed) out.summary = fmt::format("slope log|x_k| = {:.4f}, slope log f_gap = {:.4f}", sx, sf);
  return out;
}

// Shared by criteria 2 and 3: envelope (1 + t/d0)^-K gap0 on every iterate
// outside the t-neighborhood and step length t on every step taken.
void check_fixed_t(const Trace& trace, double t, Outcome& out, double& worst_ratio, double& worst_step) {
  const double d0 = trace.records.front().dist;
  const double gap0 = trace.records.front().f_gap;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    if (!(r.dist > t)) continue;
    const double env = std::pow(1.0 + t / d0, -static_cast<double>(r.k)) * gap0;
    worst_ratio = std::max(worst_ratio, r.f_gap / env);
    out.require(r.f_gap <= env * (1 + 1e-7), fmt::format("envelope violated at k={}", r.k));
    if (i + 1 < trace.records.size()) {
      const double step = (trace.records[i + 1].x - r.x).norm();
      worst_step = std::max(worst_step, std::abs(step - t));
      out.require(std::abs(step - t) <= 1e-6, fmt::format("step {} != t at k={}", step, r.k));
    }
  }
}

// 2. Fixed radius with bisection lambda: linear envelope, active steps.
Outcome fixed_t_envelope() {
  Outcome out;
  double worst_ratio = 0.0;
  double worst_step = 0.0;
  SolverConfig c;
  c.regime = Regime::kTrppmFixedT;
  c.t = 0.5;
  c.lambda_rule = LambdaRule::kBisection;
  const Problem quartic = make_quartic1d();
  const Problem quad = make_quadratic(diag({2.0, 1.0}));
  std::size_t steps = 0;
  for (const auto& [p, x0] : {std::pair{&quartic, vec({10.0})}, std::pair{&quad, vec({6.0, 8.0})}}) {
    out.require(std::abs(p->dist_to_solutions(x0) - 10.0) <= 1e-12, "d0 != 10");
    const Trace trace = run(*p, x0, c);
    steps += trace.records.size() - 1;
    check_fixed_t(trace, c.t, out, worst_ratio, worst_step);
  }
  if (out.passed) {
    out.summary = fmt::format("{} steps, max f_gap/envelope = {:.9f}, max |step - t| = {:.2e}", steps,
                              worst_ratio, worst_step);
  }
  return out;
}

// 3. Weak sharp lambda rule on mu|x|.
Outcome weak_sharp_rule() {
  Outcome out;
  const Problem p = make_scaled_abs(1.0);
  SolverConfig c;
  c.regime = Regime::kTrppmFixedT;
  c.t = 1.0;
  c.lambda_rule = LambdaRule::kWeakSharp;
  const Trace trace = run(p, vec({20.0}), c);
  double worst_ratio = 0.0;
  double worst_step = 0.0;
  double min_margin = kInf;
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    const double rule = 2.0 / (std::abs(r.x[0]) + 1.0);
    out.require(std::abs(r.lambda_k - rule) <= 1e-12 * rule, fmt::format("lambda_k off the rule at k={}", r.k));
    // Displacement of mu|x| is min(|x|, 1/lambda).
    const double displacement = std::min(std::abs(r.x[0]), 1.0 / r.lambda_k);
    min_margin = std::min(min_margin, displacement - c.t);
    out.require(displacement >= c.t - 1e-6, fmt::format("lambda_k inadmissible at k={}", r.k));
  }
  check_fixed_t(trace, c.t, out, worst_ratio, worst_step);
  if (out.passed) {
    out.summary = fmt::format("{} steps, min phi - t = {:.3g}, max f_gap/envelope = {:.9f}",
                              trace.records.size() - 1, min_margin, worst_ratio);
  }
  return out;
}

// 4. Fixed lambda with the simple-quadratic radius.
Outcome fixed_lambda() {
  Outcome out;
  const Problem p = make_quadratic(diag({2.0, 0.5}));
  SolverConfig c;
  c.regime = Regime::kTrppmFixedLambda;
  c.lambda = 1.0;
  c.epsilon = 0.1;
  c.theta = 1.0;
  c.max_iters = 5000;
  const Vector x0 = vec({6.0, 8.0});
  const double sigma = 0.5;
  const double m_f = sigma / (sigma + c.lambda) * c.epsilon;
  const double d0 = p.dist_to_solutions(x0);
  const double bound = 1.0 / (1.0 + c.theta * m_f / d0);
  const Trace trace = run(p, x0, c);
  out.require(std::abs(trace.records.front().t_k - m_f) <= 1e-12 * m_f, "radius differs from closed form");
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    if (!(r.dist > c.epsilon)) continue;
    const double factor = trace.records[i + 1].f_gap / r.f_gap;
    worst = std::max(worst, factor);
    ++checked;
    out.require(factor <= bound + 1e-9, fmt::format("factor {} > {} at k={}", factor, bound, r.k));
  }
  out.require(checked > 0, "no non-tail steps");
  if (out.passed) {
    out.summary = fmt::format("{} non-tail steps, max factor {:.9f} <= {:.9f}", checked, worst, bound);
  }
  return out;
}

// 5. m_f grid estimates against closed forms on a 3 x 3 (epsilon, lambda) grid.
Outcome m_f_closed_forms() {
  Outcome out;
  struct Case {
    Problem p;
    Vector x0;
    std::function<double(double, double)> closed;
  };
  const std::vector<Case> cases{
      {make_indicator_ball(vec({0.0, 0.0}), 1.0), vec({3.0, 0.0}), [](double e, double) { return e; }},
      {make_scaled_abs(1.0), vec({5.0}), [](double e, double l) { return std::min(e, 1.0 / l); }},
      {make_quadratic(diag({2.0, 0.0})), vec({3.0, 3.0}),
       [](double e, double l) { return 2.0 / (2.0 + l) * e; }},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    for (double eps : {0.25, 0.5, 1.0}) {
      for (double lambda : {0.5, 2.0, 8.0}) {
        const MfQuery q{&c.p, c.x0, eps, lambda, c.p.project_to_solutions(c.x0)};
        const double grid = m_f_grid(q, {.samples = 10000});
        const double exact = c.closed(eps, lambda);
        const double rel = std::abs(grid - exact) / exact;
        worst = std::max(worst, rel);
        out.require(rel <= 0.02, fmt::format("{} eps={} lambda={}: grid {} vs {}", c.p.name(), eps,
                                             lambda, grid, exact));
      }
    }
  }
  if (out.passed) out.summary = fmt::format("27 cells, max relative error {:.3e}", worst);
  return out;
}

// 6. brox and tr_prox agree on random active 2-D quadratics.
Outcome bpm_equivalence() {
  Outcome out;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int n = 0;
  while (n < 20) {
    const double angle = 3.141592653589793 * u(rng);
    Matrix rot(2, 2);
    rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    const Matrix q = rot * diag({0.1 + 3 * u(rng), 3 * u(rng)}) * rot.transpose();
    const Problem p = make_quadratic(0.5 * (q + q.transpose()));
    const Vector x = vec({10 * u(rng) - 5, 10 * u(rng) - 5});
    const double lambda = 0.05 + 2 * u(rng);
    const double t = (0.1 + 0.8 * u(rng)) * std::min(phi(p, x, lambda), p.dist_to_solutions(x));
    if (!(phi(p, x, lambda) > t && p.dist_to_solutions(x) > t) || t < 1e-3) continue;
    ++n;
    const double gap = (brox(p, x, t).point - tr_prox(p, x, lambda, t).point).norm();
    worst = std::max(worst, gap);
    out.require(gap <= 1e-8, fmt::format("instance {}: discrepancy {}", n, gap));
  }
  if (out.passed) out.summary = fmt::format("20 instances, max ||brox - tr_prox|| = {:.3e}", worst);
  return out;
}

// 7. Unconstrained steps on a strongly convex quadratic contract by 1/(1 + mu/lambda).
Outcome strongly_convex() {
  Outcome out;
  const double mu = 1.0;
  SolverConfig c;
  c.regime = Regime::kTrppmUnconstrained;
  c.lambda = 2.0;
  c.t = kInf;
  c.max_iters = 200;
  const Trace trace = run(make_quadratic(mu * Matrix::Identity(2, 2)), vec({3.0, -4.0}), c);
  const double bound = 1.0 / (1.0 + mu / c.lambda);
  double worst = 0.0;
  std::size_t steps = 0;
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
    if (!(trace.records[i].f_gap > 0.0)) break;
    const double factor = trace.records[i + 1].f_gap / trace.records[i].f_gap;
    worst = std::max(worst, factor);
    ++steps;
    out.require(factor <= bound + 1e-9, fmt::format("factor {} at k={}", factor, i));
  }
  out.require(steps >= 10, "too few steps");
  if (out.passed) out.summary = fmt::format("{} steps, max factor {:.9f} <= {:.9f}", steps, worst, bound);
  return out;
}

// 8. Operator and displacement property suites, plus Fejer and PPM step
// monotonicity over traces of every catalog problem.
Outcome property_suites() {
  Outcome out;
  std::size_t checks = 0;
  for (const auto& report : {verify_operators(42), verify_displacement(42)}) {
    for (const auto& c : report.checks) {
      ++checks;
      out.require(c.passed, fmt::format("{}: {}", c.name, c.detail));
    }
  }
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::size_t traces = 0;
  for (const auto& p : property_catalog()) {
    // Indicator runs must start in C, where every method stays put.
    if (p.is_indicator()) continue;
    for (int i = 0; i < 5; ++i) {
      Vector x0(p.dimension());
      for (auto& v : x0) v = u(rng);
      for (double lambda : {0.5, 2.0}) {
        SolverConfig c;
        c.regime = Regime::kPpm;
        c.lambda = lambda;
        c.max_iters = 500;
        const Trace ppm = run(p, x0, c);
        ++traces;
        for (std::size_t k = 0; k + 1 < ppm.records.size(); ++k) {
          const auto& a = ppm.records[k];
          const auto& b = ppm.records[k + 1];
          out.require(b.dist <= a.dist + 1e-9, fmt::format("{}: Fejer violated at k={}", p.name(), k));
          if (k + 2 < ppm.records.size()) {
            out.require(b.step_len <= a.step_len + 1e-9,
                        fmt::format("{}: PPM step grew at k={}", p.name(), k));
          }
        }
      }
      SolverConfig c;
      c.regime = Regime::kTrppmFixedT;
      c.t = 0.25;
      const Trace tr = run(p, x0, c);
      ++traces;
      for (std::size_t k = 0; k + 1 < tr.records.size(); ++k) {
        out.require(tr.records[k + 1].dist <= tr.records[k].dist + 1e-9,
                    fmt::format("{}: Fejer violated in fixed-t run at k={}", p.name(), k));
      }
    }
  }
  if (out.passed) out.summary = fmt::format("{} suite checks, {} traces", checks, traces);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {1, "PPM sublinearity on the quartic", 5.0, ppm_sublinearity},
      {2, "fixed-t linear envelope", 1.0, fixed_t_envelope},
      {3, "weak-sharp lambda rule", 1.0, weak_sharp_rule},
      {4, "fixed-lambda contraction", 1.0, fixed_lambda},
      {5, "m_f closed forms vs grid", 10.0, m_f_closed_forms},
      {6, "BPM and TRPPM equivalence", 1.0, bpm_equivalence},
      {7, "strongly convex contraction", 1.0, strongly_convex},
      {8, "property suites", 30.0, property_suites},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out.passed = false;
      out.summary = fmt::format("exception: {}", e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_s) {
      out.summary = fmt::format("took {:.2f} s; {}", secs, out.summary);
      out.passed = false;
    }
    all = all && out.passed;
    std::cout << fmt::format("{} criterion {}: {} ({:.3f} s, limit {} s): {}\n", out.passed ? "PASS" : "FAIL",
                             c.id, c.name, secs, c.limit_s, out.summary);
  }
  std::cout << (all ? "ALL PASS" : "SOME FAILED") << '\n';
  return all ? 0 : 1;
}
