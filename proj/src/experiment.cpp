#include "trppm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "trppm/error.hpp"

namespace trppm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return fmt::format("{:.17g}", v); }

template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot open '{}' for writing", path));
  fn(out);
  out.flush();
  if (!out) throw Error(fmt::format("failed writing '{}'", path));
}

CheckResult check_envelope(const Trace& trace, double tol) {
  CheckResult r{"envelope", true, 0.0, 1.0, tol, ""};
  for (const auto& rec : trace.records) {
    double ratio = 0.0;
    if (rec.envelope > 0.0) {
      ratio = rec.f_gap / rec.envelope;
    } else if (rec.f_gap > 0.0) {
      ratio = kInf;
    }
    if (ratio > r.measured) r.measured = ratio;
    if (ratio > 1.0 + tol && r.passed) {
      r.passed = false;
      r.detail = fmt::format("first violation at k={}", rec.k);
    }
  }
  return r;
}

CheckResult check_active_step(const Trace& trace, double tol) {
  CheckResult r{"active_step", true, 0.0, 0.0, tol, ""};
  const auto& recs = trace.records;
  std::size_t inactive = 0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    if (!(recs[i].dist > trace.stop_dist)) continue;
    ++checked;
    const double err = std::abs(recs[i].step_len - recs[i].t_k);
    r.measured = std::max(r.measured, err);
    if (!recs[i].active) ++inactive;
    if (err > tol && r.passed) {
      r.passed = false;
      r.detail = fmt::format("k={}: step {} vs radius {}{}", recs[i].k, recs[i].step_len,
                             recs[i].t_k, recs[i].active ? "" : ", constraint inactive");
    }
  }
  if (r.passed) r.detail = fmt::format("{} steps checked, {} flagged inactive", checked, inactive);
  return r;
}

// Max over consecutive records of lhs(i) - rhs(i); passes when <= tol.
template <class Fn>
CheckResult check_pairs(std::string name, const Trace& trace, double tol, Fn&& excess) {
  CheckResult r{std::move(name), true, 0.0, 0.0, tol, ""};
  const auto& recs = trace.records;
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    const auto e = excess(i);
    if (!e) continue;
    r.measured = std::max(r.measured, *e);
    if (*e > tol && r.passed) {
      r.passed = false;
      r.detail = fmt::format("first violation at k={}", recs[i].k);
    }
  }
  return r;
}

CheckResult check_contraction(const Trace& trace, double tol) {
  CheckResult r{"contraction", true, 0.0, trace.contraction_bound.value_or(kNaN), tol, ""};
  if (!trace.contraction_bound) {
    r.passed = false;
    r.detail = "regime has no per-step contraction bound";
    return r;
  }
  const auto& recs = trace.records;
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    if (!(recs[i].dist > trace.stop_dist) || !(recs[i].f_gap > 0.0)) continue;
    const double ratio = recs[i + 1].f_gap / recs[i].f_gap;
    r.measured = std::max(r.measured, ratio);
    if (ratio > r.bound + tol && r.passed) {
      r.passed = false;
      r.detail = fmt::format("first violation at k={}", recs[i].k);
    }
  }
  return r;
}

CheckResult check_slope(const ExperimentConfig& cfg, const Trace& trace, const CheckSpec& spec) {
  const auto [lo, hi] = *spec.range;
  CheckResult r{spec.name, false, kNaN, lo, hi, ""};
  const auto quantity = spec.name == "slope_x" ? RateQuantity::kDist : RateQuantity::kFGap;
  std::uint64_t k_lo = 1;
  std::uint64_t k_hi = trace.records.empty() ? 0 : trace.records.size() - 1;
  if (cfg.slope_window) std::tie(k_lo, k_hi) = *cfg.slope_window;
  try {
    r.measured = empirical_rate(trace, k_lo, k_hi, quantity, RateBasis::kLogLog);
    r.passed = r.measured >= lo && r.measured <= hi;
    r.detail = fmt::format("log-log slope over k in [{}, {}], accepted range [{}, {}]", k_lo, k_hi,
                           lo, hi);
  } catch (const Error& ex) {
    r.detail = ex.what();
  }
  return r;
}

std::string with_suffix(const std::string& path, std::size_t index) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  const auto ext = p.extension().string();
  p.replace_extension();
  return p.string() + "." + std::to_string(index) + ext;
}

}  // namespace

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "k,f_gap,dist,step_len,active,lambda_k,t_k,q_k,envelope\n";
  for (const auto& r : trace.records) {
    out << r.k << ',' << num(r.f_gap) << ',' << num(r.dist) << ',' << num(r.step_len) << ','
        << (r.active ? 1 : 0) << ',' << num(r.lambda_k) << ',' << num(r.t_k) << ',' << num(r.q_k)
        << ',' << num(r.envelope) << '\n';
  }
}

VerificationReport evaluate_checks(const ExperimentConfig& config, const Trace& trace) {
  VerificationReport report;
  report.title = fmt::format("{} on {} ({} records, {})", to_string(config.solver.regime),
                             config.problem.name, trace.records.size(), to_string(trace.reason));
  const auto& recs = trace.records;
  for (const auto& spec : config.checks) {
    const double tol = spec.tolerance;
    if (spec.name == "envelope") {
      report.add(check_envelope(trace, tol));
    } else if (spec.name == "active_step") {
      report.add(check_active_step(trace, tol));
    } else if (spec.name == "descent") {
      report.add(check_pairs("descent", trace, tol, [&](std::size_t i) -> std::optional<double> {
        return recs[i + 1].f_gap - recs[i].q_k * recs[i].f_gap;
      }));
    } else if (spec.name == "fejer") {
      report.add(check_pairs("fejer", trace, tol, [&](std::size_t i) -> std::optional<double> {
        return recs[i + 1].dist - recs[i].dist;
      }));
    } else if (spec.name == "step_monotone") {
      report.add(check_pairs("step_monotone", trace, tol, [&](std::size_t i) -> std::optional<double> {
        // The final record takes no step.
        if (i + 2 >= recs.size()) return std::nullopt;
        return recs[i + 1].step_len - recs[i].step_len;
      }));
    } else if (spec.name == "contraction") {
      report.add(check_contraction(trace, tol));
    } else if (spec.range) {
      report.add(check_slope(config, trace, spec));
    }
  }
  return report;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  ExperimentOutcome outcome;
  const Problem problem = make_problem(config.problem);
  try {
    outcome.trace = run(problem, config.x0, config.solver);
  } catch (const NumericalFailure& ex) {
    outcome.report.title = fmt::format("{} on {}", to_string(config.solver.regime), config.problem.name);
    outcome.report.add({"solver", false, ex.residual(), 0.0, 0.0, ex.what()});
    outcome.exit_code = kExitNumericalFailure;
  } catch (const InvalidArgument& ex) {
    throw ConfigError(ex.what());
  }

  if (outcome.trace) {
    outcome.report = evaluate_checks(config, *outcome.trace);
    outcome.exit_code = outcome.report.passed() ? kExitPass : kExitCheckFailure;
    if (!config.csv_path.empty()) {
      write_file(config.csv_path, [&](std::ostream& out) { write_trace_csv(out, *outcome.trace); });
    }
  }
  if (!config.report_path.empty()) {
    write_file(config.report_path, [&](std::ostream& out) { outcome.report.write(out); });
  }
  return outcome;
}

std::vector<SweepRow> sweep(const KeyValueDocument& base, const std::string& axis,
                            const std::vector<std::string>& values, unsigned workers) {
  if (!is_numeric_key(axis)) {
    throw ConfigError(fmt::format("sweep axis '{}' is not a numeric key", axis), {axis});
  }
  std::vector<SweepRow> rows(values.size());

  auto run_one = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.value = values[i];
    row.fitted_rate = kNaN;
    try {
      KeyValueDocument doc = base;
      doc.set(axis, values[i]);
      for (const char* key : {"output.csv", "output.report"}) {
        if (const auto* e = doc.find(key)) doc.set(key, with_suffix(e->value, i));
      }
      ExperimentConfig cfg = parse_config(doc);
      apply_seed_override(cfg);
      const auto outcome = run_experiment(cfg);
      if (!outcome.trace) {
        row.status = "numerical_failure";
        return;
      }
      const Trace& trace = *outcome.trace;
      row.final_f_gap = trace.records.back().f_gap;
      if (trace.reason != TerminationReason::kMaxIters) {
        row.iterations = static_cast<long long>(trace.records.size()) - 1;
      }
      std::vector<double> ks;
      std::vector<double> logs;
      for (const auto& rec : trace.records) {
        if (rec.f_gap > 0.0) {
          ks.push_back(static_cast<double>(rec.k));
          logs.push_back(std::log(rec.f_gap));
        }
      }
      if (ks.size() >= 2) row.fitted_rate = fit_slope(ks, logs);
      row.t0 = trace.records.front().t_k;
      row.lambda0 = trace.records.front().lambda_k;
      row.status = outcome.report.passed() ? "pass" : "fail";
    } catch (const std::exception& ex) {
      row.status = fmt::format("error: {}", ex.what());
    }
  };

  const unsigned n = std::max(1u, workers);
  if (n == 1) {
    for (std::size_t i = 0; i < values.size(); ++i) run_one(i);
  } else {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < n; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t i = w; i < values.size(); i += n) run_one(i);
      });
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::string& axis, const std::vector<SweepRow>& rows) {
  out << axis << ",final_f_gap,iterations,fitted_rate,t_k,lambda_k,status\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << r.value << ',' << num(r.final_f_gap) << ',' << r.iterations << ',' << num(r.fitted_rate)
        << ',' << num(r.t0) << ',' << num(r.lambda0) << ',' << status << '\n';
  }
}

}  // namespace trppm
