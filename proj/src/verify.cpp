#include "trppm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "trppm/config.hpp"
#include "trppm/displacement.hpp"
#include "trppm/error.hpp"
#include "trppm/experiment.hpp"
#include "trppm/prox.hpp"
#include "trppm/solver.hpp"

namespace trppm {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vector uniform_box(Rng& rng, Eigen::Index dim, double half_width) {
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = uniform(rng, -half_width, half_width);
  return v;
}

// Uniform point in the closed ball by rejection from the enclosing cube.
Vector uniform_ball(Rng& rng, const Vector& center, double radius) {
  for (;;) {
    Vector u = uniform_box(rng, center.size(), 1.0);
    if (u.squaredNorm() <= 1.0) return center + radius * u;
  }
}

// Point of dom f near the origin: inside the set for indicators.
Vector domain_point(Rng& rng, const Problem& p) {
  if (const auto* box = p.as<IndicatorBox>()) {
    Vector v(box->lower.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform(rng, box->lower[i], box->upper[i]);
    return v;
  }
  if (const auto* ball = p.as<IndicatorBall>()) return uniform_ball(rng, ball->center, ball->radius);
  return uniform_box(rng, p.dimension(), 1.0);
}

double subproblem_objective(const Problem& p, const Vector& z, const Vector& x, double lambda) {
  const double f = p.value(z);
  if (lambda == 0.0) return f;
  return f + 0.5 * lambda * (z - x).squaredNorm();
}

// Tracks the worst value of an excess quantity; passes when it stays <= tol.
struct Worst {
  Worst(std::string n, double t) : name(std::move(n)), tol(t) {}

  std::string name;
  double tol;
  double measured = 0.0;
  std::size_t cases = 0;
  std::string first_failure;

  void record(double excess, const std::string& where) {
    ++cases;
    if (std::isnan(excess)) excess = kInf;
    measured = std::max(measured, excess);
    if (excess > tol && first_failure.empty()) first_failure = where;
  }

  CheckResult result() const {
    CheckResult r{name, first_failure.empty(), measured, 0.0, tol, ""};
    r.detail = r.passed ? fmt::format("{} cases", cases)
                        : fmt::format("{} cases, first violation: {}", cases, first_failure);
    return r;
  }
};

std::string where(const Problem& p, const Vector& x, double lambda, double t = kInf) {
  return fmt::format("{} x=({}) lambda={:.6g} t={:.6g}", p.name(),
                     fmt::join(x.begin(), x.end(), ", "), lambda, t);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  }
  return g;
}

// Minimizes the subproblem objective of a 2-D quadratic over the disk of
// radius t around x by brute force: a 100 x 100 polar grid over the disk,
// then three 100 x 100 polar grids zoomed around the incumbent.
std::pair<Vector, double> polar_grid_min(const Problem& p, const Vector& x, double lambda,
                                         double t) {
  constexpr int kN = 100;
  Vector best = x;
  double best_val = subproblem_objective(p, x, x, lambda);
  double r_lo = 0.0;
  double r_hi = t;
  double a_lo = 0.0;
  double a_hi = 2.0 * std::numbers::pi;
  for (int pass = 0; pass < 4; ++pass) {
    double best_r = 0.0;
    double best_a = 0.0;
    for (int i = 0; i < kN; ++i) {
      // The first pass covers the full circle; zoomed passes include both ends.
      const double r = pass == 0 ? r_hi * (i + 1) / kN : r_lo + (r_hi - r_lo) * i / (kN - 1);
      for (int j = 0; j < kN; ++j) {
        const double a = pass == 0 ? a_hi * j / kN : a_lo + (a_hi - a_lo) * j / (kN - 1);
        Vector z(2);
        z << x[0] + r * std::cos(a), x[1] + r * std::sin(a);
        const double v = subproblem_objective(p, z, x, lambda);
        if (v < best_val) {
          best_val = v;
          best = z;
          best_r = r;
          best_a = a;
        }
      }
    }
    if (best_r == 0.0) break;
    const double dr = 2.0 * (r_hi - r_lo) / kN;
    const double da = 2.0 * (a_hi - a_lo) / kN;
    r_lo = std::max(0.0, best_r - dr);
    r_hi = std::min(t, best_r + dr);
    a_lo = best_a - da;
    a_hi = best_a + da;
  }
  return {best, best_val};
}

Problem random_quadratic_2d(Rng& rng) {
  const double angle = uniform(rng, 0.0, std::numbers::pi);
  Eigen::Matrix2d u;
  u << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  // One instance in four is singular.
  const double s1 = uniform(rng, 0.2, 3.0);
  const double s2 = uniform(rng, 0.0, 1.0) < 0.25 ? 0.0 : uniform(rng, 0.2, 3.0);
  Eigen::Matrix2d q = u * Eigen::Vector2d(s1, s2).asDiagonal() * u.transpose();
  q = 0.5 * (q + q.transpose()).eval();
  return make_quadratic(q);
}

Matrix diag(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double d : values) v[i++] = d;
  return v.asDiagonal();
}

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double d : values) v[i++] = d;
  return v;
}

// Runs one experiment document and prefixes its check names with `label`.
VerificationReport run_document(const std::string& label, const std::string& text,
                                std::optional<Trace>* trace_out = nullptr) {
  const ExperimentConfig cfg = parse_config(text);
  const auto outcome = run_experiment(cfg);
  VerificationReport report = outcome.report;
  for (auto& c : report.checks) c.name = label + "." + c.name;
  if (trace_out) *trace_out = outcome.trace;
  return report;
}

}  // namespace

std::vector<Problem> property_catalog() {
  Matrix rank2(3, 3);
  rank2 << 1, 2, 0, 2, 5, -1, 0, -1, 1;
  Matrix coupled(2, 2);
  coupled << 2, 1, 1, 2;
  std::vector<Problem> out;
  out.push_back(make_quartic1d());
  out.push_back(make_scaled_abs(1.5));
  out.push_back(make_quadratic(diag({2.0, 1.0})));
  out.push_back(make_quadratic(diag({1.0, 0.0})));
  out.push_back(make_quadratic(coupled));
  out.push_back(make_quadratic(rank2));
  out.push_back(make_indicator_box(vec({-1.0, -0.5}), vec({1.0, 2.0})));
  out.push_back(make_indicator_ball(vec({0.5, 0.0}), 1.0));
  out.push_back(make_sharp_norm(2.0, 2));
  return out;
}

VerificationReport verify_operators(std::uint64_t seed) {
  VerificationReport report;
  report.title = fmt::format("operators (seed {})", seed);
  Rng rng(seed);
  const auto catalog = property_catalog();

  Worst nonexp{"nonexpansive", 1e-9};
  for (const auto& p : catalog) {
    for (double lambda : {0.1, 1.0, 10.0}) {
      for (int i = 0; i < 100; ++i) {
        const Vector x = uniform_box(rng, p.dimension(), 5.0);
        const Vector y = uniform_box(rng, p.dimension(), 5.0);
        const double excess = (prox(p, lambda, x) - prox(p, lambda, y)).norm() - (x - y).norm();
        nonexp.record(excess, where(p, x, lambda));
      }
    }
  }
  report.add(nonexp.result());

  Worst optimality{"subproblem_optimality", 1e-7};
  Worst boundary{"brox_boundary", 1e-8};
  Worst certificate{"optimality_certificate", 1e-6};
  Worst descent{"descent_certificate", 1e-6};
  for (const auto& p : catalog) {
    for (int i = 0; i < 40; ++i) {
      const Vector x = uniform_box(rng, p.dimension(), 5.0);
      const double lambda = i % 4 == 0 ? 0.0 : std::exp(uniform(rng, std::log(0.05), std::log(20.0)));
      const double t = uniform(rng, 0.1, 3.0);
      const ProxResult res = tr_prox(p, x, lambda, t);
      const std::string at = where(p, x, lambda, t);

      double best = kInf;
      for (int j = 0; j < 64; ++j) {
        best = std::min(best, subproblem_objective(p, uniform_ball(rng, x, t), x, lambda));
      }
      const double obj = subproblem_objective(p, res.point, x, lambda);
      // Both infinite means the ball misses dom f; nothing to compare.
      const double excess = std::isinf(best) && std::isinf(obj) ? 0.0 : obj - best;
      optimality.record(excess, at);

      if (lambda == 0.0 && p.dist_to_solutions(x) > t) {
        boundary.record(std::abs((res.point - x).norm() - t), at);
      }

      if (!res.multiplier) continue;
      const double scale = *res.multiplier + lambda;
      const Vector sub = scale * (x - res.point);
      if (const auto grad = p.gradient(res.point)) {
        certificate.record((*grad - sub).norm(), at);
      }
      const double fu = p.value(res.point);
      if (!std::isfinite(fu)) continue;
      for (int j = 0; j < 64; ++j) {
        const Vector y = uniform_box(rng, p.dimension(), 5.0);
        const double fy = p.value(y);
        if (!std::isfinite(fy)) continue;
        descent.record(sub.dot(y - res.point) - (fy - fu), at);
      }
    }
  }
  report.add(optimality.result());
  report.add(boundary.result());
  report.add(certificate.result());
  report.add(descent.result());

  Worst secular_point{"secular_vs_grid_point", 1e-3};
  Worst secular_obj{"secular_vs_grid_objective", 1e-6};
  int active = 0;
  for (int attempt = 0; active < 10 && attempt < 200; ++attempt) {
    const Problem p = random_quadratic_2d(rng);
    const Vector x = uniform_box(rng, 2, 4.0);
    const double lambda = attempt % 3 == 0 ? 0.0 : uniform(rng, 0.05, 2.0);
    const double t = uniform(rng, 0.2, 1.5);
    const ProxResult res = tr_prox(p, x, lambda, t);
    if (!res.active) continue;
    ++active;
    const auto [grid_point, grid_value] = polar_grid_min(p, x, lambda, t);
    const std::string at = where(p, x, lambda, t);
    secular_point.record((grid_point - res.point).norm(), at);
    secular_obj.record(std::abs(grid_value - subproblem_objective(p, res.point, x, lambda)), at);
  }
  report.add(secular_point.result());
  report.add(secular_obj.result());
  return report;
}

VerificationReport verify_displacement(std::uint64_t seed) {
  VerificationReport report;
  report.title = fmt::format("displacement (seed {})", seed);
  Rng rng(seed);
  const auto catalog = property_catalog();
  const auto lambdas = log_grid(1e-3, 1e3, 50);

  Worst range{"phi_range", 1e-12};
  Worst monotone{"phi_monotone_lambda", 1e-9};
  Worst lipschitz{"phi_lipschitz_x", 1e-9};
  for (const auto& p : catalog) {
    for (int i = 0; i < 20; ++i) {
      const Vector x = uniform_box(rng, p.dimension(), 5.0);
      const double dist = p.dist_to_solutions(x);
      double prev = phi(p, x, 0.0);
      for (double lambda : lambdas) {
        const double v = phi(p, x, lambda);
        const std::string at = where(p, x, lambda);
        range.record(std::max(-v, v - dist), at);
        monotone.record(v - prev, at);
        prev = v;
      }
      const Vector y = i % 2 == 0 ? Vector(x + uniform_box(rng, p.dimension(), 0.1))
                                  : uniform_box(rng, p.dimension(), 5.0);
      for (double lambda : {0.0, 0.1, 1.0, 10.0}) {
        const double excess =
            std::abs(phi(p, x, lambda) - phi(p, y, lambda)) - 2.0 * (x - y).norm();
        lipschitz.record(excess, where(p, x, lambda));
      }
    }
  }
  report.add(range.result());
  report.add(monotone.result());
  report.add(lipschitz.result());

  // Limits at finite lambda: the quartic's gap at lambda = 1e-12 is about
  // (1e-12 |x|)^(1/3), so points are drawn from dom f within the unit box.
  Worst limit_hi{"phi_limit_large_lambda", 1e-4};
  Worst limit_lo{"phi_limit_small_lambda", 1e-4};
  for (const auto& p : catalog) {
    for (int i = 0; i < 20; ++i) {
      const Vector x = domain_point(rng, p);
      limit_hi.record(phi(p, x, 1e12), where(p, x, 1e12));
      limit_lo.record(std::abs(phi(p, x, 1e-12) - p.dist_to_solutions(x)), where(p, x, 1e-12));
    }
  }
  report.add(limit_hi.result());
  report.add(limit_lo.result());

  // m_f over an (epsilon, lambda) grid: closed forms where known, sampled
  // estimates (shared sample points) otherwise.
  const std::vector<double> eps_grid{0.25, 0.5, 1.0};
  const std::vector<double> lam_grid{0.5, 2.0, 8.0};
  struct MfCase {
    Problem problem;
    Vector x0;
  };
  std::vector<MfCase> mf_cases;
  mf_cases.push_back({make_indicator_ball(vec({0.0, 0.0}), 1.0), vec({3.0, 0.0})});
  mf_cases.push_back({make_scaled_abs(1.0), vec({5.0})});
  mf_cases.push_back({make_quadratic(diag({2.0, 0.0})), vec({3.0, 3.0})});
  mf_cases.push_back({make_quartic1d(), vec({3.0})});
  mf_cases.push_back({make_sharp_norm(1.0, 2), vec({2.0, 1.0})});

  Worst mf_lambda{"m_f_monotone_lambda", 1e-9};
  Worst mf_eps{"m_f_monotone_epsilon", 1e-9};
  CheckResult mf_pos{"m_f_positive", true, kInf, 0.0, 0.0, ""};
  Worst mf_match{"m_f_closed_vs_grid", 0.02};
  for (const auto& c : mf_cases) {
    const bool closed = has_m_f_closed_form(c.problem);
    const Vector anchor = c.problem.project_to_solutions(c.x0);
    std::vector<std::vector<double>> table(eps_grid.size(), std::vector<double>(lam_grid.size()));
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
      for (std::size_t j = 0; j < lam_grid.size(); ++j) {
        const MfQuery q{&c.problem, c.x0, eps_grid[i], lam_grid[j], anchor};
        const double grid = m_f_grid(q, {.samples = 10000, .workers = 1, .seed = seed});
        double value = grid;
        if (closed) {
          value = m_f_closed_form(c.problem, eps_grid[i], lam_grid[j]);
          mf_match.record(std::abs(grid - value) / value,
                          fmt::format("{} eps={} lambda={}", c.problem.name(), eps_grid[i],
                                      lam_grid[j]));
          if (!(grid > 0.0)) mf_pos.passed = false;
          mf_pos.measured = std::min(mf_pos.measured, grid);
        }
        if (!(value > 0.0)) mf_pos.passed = false;
        mf_pos.measured = std::min(mf_pos.measured, value);
        table[i][j] = value;
      }
    }
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
      for (std::size_t j = 0; j < lam_grid.size(); ++j) {
        const std::string at =
            fmt::format("{} eps={} lambda={}", c.problem.name(), eps_grid[i], lam_grid[j]);
        if (j > 0) mf_lambda.record(table[i][j] - table[i][j - 1], at);
        if (i > 0) mf_eps.record(table[i - 1][j] - table[i][j], at);
      }
    }
  }
  if (!mf_pos.passed) mf_pos.detail = "non-positive value on the grid";
  report.add(mf_lambda.result());
  report.add(mf_eps.result());
  report.add(mf_pos);
  report.add(mf_match.result());

  // Admissibility of the lambda rules on 100 random instances with
  // dist > t. Indicators are excluded: outside C their value is +inf.
  Worst star{"lambda_star_admissible", 1e-6};
  Worst sharp{"weak_sharp_admissible", 1e-6};
  std::vector<const Problem*> finite;
  for (const auto& p : catalog) {
    if (!p.is_indicator()) finite.push_back(&p);
  }
  for (int n = 0; n < 100;) {
    const Problem& p = *finite[std::uniform_int_distribution<std::size_t>(0, finite.size() - 1)(rng)];
    const Vector x = uniform_box(rng, p.dimension(), 5.0);
    const double dist = p.dist_to_solutions(x);
    if (dist < 0.05) continue;
    ++n;
    const double t = uniform(rng, 0.05, 0.95) * dist;
    const double ls = lambda_star(p, x, t);
    star.record(t - phi(p, x, ls), where(p, x, ls, t));
    if (p.weak_sharp()) {
      const double lw = weak_sharp_lambda(p, x, t);
      sharp.record(t - phi(p, x, lw), where(p, x, lw, t));
    }
  }
  report.add(star.result());
  report.add(sharp.result());
  return report;
}

VerificationReport verify_rates(std::uint64_t seed) {
  VerificationReport report;
  report.title = fmt::format("rates (seed {})", seed);
  const std::string seed_line = fmt::format("seed = {}\n", seed);

  report.append(run_document("ppm_quartic", seed_line + R"(
x0 = 10
[problem]
name = quartic1d
[solver]
regime = ppm
lambda = 1
max_iters = 100000
[verify]
slope_x = -0.55, -0.45
slope_gap = -2.1, -1.9
slope_window = 1000, 100000
envelope = 1e-7
fejer = 1e-9
descent = 1e-9
step_monotone = 1e-9
)"));

  report.append(run_document("fixed_t_quartic", seed_line + R"(
x0 = 10
[problem]
name = quartic1d
[solver]
regime = trppm_fixed_t
t = 0.5
lambda_rule = bisection
[verify]
envelope = 1e-7
active_step = 1e-6
fejer = 1e-9
descent = 1e-9
contraction = 1e-9
)"));

  report.append(run_document("fixed_t_quadratic", seed_line + R"(
x0 = 6, 8
[problem]
name = quadratic
Q = 2, 0; 0, 1
[solver]
regime = trppm_fixed_t
t = 0.5
lambda_rule = bisection
[verify]
envelope = 1e-7
active_step = 1e-6
fejer = 1e-9
descent = 1e-9
)"));

  std::optional<Trace> sharp_trace;
  report.append(run_document("weak_sharp_abs", seed_line + R"(
x0 = 20
[problem]
name = scaled_abs
mu = 1
[solver]
regime = trppm_fixed_t
t = 1
lambda_rule = weak_sharp
[verify]
envelope = 1e-7
active_step = 1e-6
fejer = 1e-9
descent = 1e-9
)",
                             &sharp_trace));
  if (sharp_trace) {
    const Problem p = make_scaled_abs(1.0);
    Worst admissible{"weak_sharp_abs.lambda_admissible", 1e-6};
    const auto& recs = sharp_trace->records;
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
      admissible.record(recs[i].t_k - phi(p, recs[i].x, recs[i].lambda_k),
                        fmt::format("k={}", recs[i].k));
    }
    report.add(admissible.result());
  }

  report.append(run_document("fixed_lambda_quadratic", seed_line + R"(
x0 = 6, 8
[problem]
name = quadratic
Q = 2, 0; 0, 0.5
[solver]
regime = trppm_fixed_lambda
lambda = 1
epsilon = 0.1
theta = 1
[verify]
envelope = 1e-7
contraction = 1e-9
fejer = 1e-9
descent = 1e-9
)"));

  report.append(run_document("strongly_convex", seed_line + R"(
x0 = 3, -4
[problem]
name = quadratic
Q = 1, 0; 0, 1
[solver]
regime = trppm_unconstrained
lambda = 2
t = inf
max_iters = 60
[verify]
envelope = 1e-7
contraction = 1e-9
fejer = 1e-9
descent = 1e-9
)"));

  // Regime identities.
  {
    Matrix q(2, 2);
    q << 2, 1, 1, 3;
    const Problem p = make_quadratic(q);
    const Vector x0 = vec({4.0, -3.0});
    SolverConfig ppm;
    ppm.regime = Regime::kPpm;
    ppm.lambda = 0.7;
    ppm.max_iters = 50;
    SolverConfig unconstrained = ppm;
    unconstrained.regime = Regime::kTrppmUnconstrained;
    const Trace a = run(p, x0, ppm);
    const Trace b = run(p, x0, unconstrained);
    CheckResult r{"identity_ppm_unconstrained", a.records.size() == b.records.size(), 0.0, 0.0, 0.0,
                  ""};
    for (std::size_t i = 0; r.passed && i < a.records.size(); ++i) {
      if (a.records[i].x != b.records[i].x) {
        r.passed = false;
        r.measured = (a.records[i].x - b.records[i].x).lpNorm<Eigen::Infinity>();
        r.detail = fmt::format("iterates differ at k={}", i);
      }
    }
    if (r.passed) r.detail = fmt::format("{} iterates bitwise equal", a.records.size());
    report.add(r);
  }
  for (const Problem& p : {make_quartic1d(), make_quadratic(diag({2.0, 1.0})), make_sharp_norm(1.0, 2)}) {
    const Vector x0 = p.dimension() == 1 ? vec({7.0}) : vec({5.0, -6.0});
    SolverConfig bpm;
    bpm.regime = Regime::kBpm;
    bpm.t = 0.4;
    SolverConfig fixed = bpm;
    fixed.regime = Regime::kTrppmFixedT;
    fixed.lambda_rule = LambdaRule::kConstant;
    const Trace a = run(p, x0, bpm);
    const Trace b = run(p, x0, fixed);
    Worst w{fmt::format("identity_bpm_lambda0.{}", p.name()), 1e-10};
    if (a.records.size() != b.records.size()) {
      w.record(kInf, "trace lengths differ");
    } else {
      for (std::size_t i = 0; i < a.records.size(); ++i) {
        w.record((a.records[i].x - b.records[i].x).norm(), fmt::format("k={}", i));
      }
    }
    report.add(w.result());
  }
  return report;
}

VerificationReport verify_equivalence(std::uint64_t seed, int instances) {
  VerificationReport report;
  report.title = fmt::format("equivalence (seed {}, {} instances)", seed, instances);
  Rng rng(seed);
  Worst w{"bpm_trppm_equivalence", 1e-8};
  for (int n = 0; n < instances;) {
    const Problem p = random_quadratic_2d(rng);
    const Vector x = uniform_box(rng, 2, 5.0);
    const double lambda = std::exp(uniform(rng, std::log(0.05), std::log(2.0)));
    const double reach = std::min(phi(p, x, lambda), p.dist_to_solutions(x));
    if (reach < 0.05) continue;
    const double t = uniform(rng, 0.1, 0.9) * reach;
    ++n;
    const auto eq = check_bpm_equivalence(p, x, lambda, t);
    w.record(eq.discrepancy, where(p, x, lambda, t));
  }
  report.add(w.result());
  return report;
}

VerificationReport verify_suite(std::string_view name, std::uint64_t seed) {
  if (name == "operators") return verify_operators(seed);
  if (name == "displacement") return verify_displacement(seed);
  if (name == "rates") return verify_rates(seed);
  if (name == "equivalence") return verify_equivalence(seed);
  if (name == "all") {
    VerificationReport report;
    report.title = fmt::format("all suites (seed {})", seed);
    for (auto* fn : {verify_operators, verify_displacement, verify_rates}) {
      auto part = fn(seed);
      for (auto& c : part.checks) c.name = part.title.substr(0, part.title.find(' ')) + "." + c.name;
      report.append(part);
    }
    auto eq = verify_equivalence(seed);
    for (auto& c : eq.checks) c.name = "equivalence." + c.name;
    report.append(eq);
    return report;
  }
  throw InvalidArgument(
      fmt::format("unknown suite '{}' (expected operators, displacement, rates, equivalence, all)", name));
}

}  // namespace trppm
