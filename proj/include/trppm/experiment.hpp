#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "trppm/config.hpp"
#include "trppm/report.hpp"
#include "trppm/solver.hpp"

namespace trppm {

// Exit codes of the command-line front end.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalFailure = 3;

/// CSV with header k,f_gap,dist,step_len,active,lambda_k,t_k,q_k,envelope,
/// one row per record, reals printed with 17 significant digits.
void write_trace_csv(std::ostream& out, const Trace& trace);

/// Evaluates the configured checks against a finished trace.
VerificationReport evaluate_checks(const ExperimentConfig& config, const Trace& trace);

struct ExperimentOutcome {
  std::optional<Trace> trace;  // empty when the solver failed
  VerificationReport report;
  int exit_code = kExitPass;
};

/// Runs the solver, evaluates the checks and writes the CSV and report to
/// the configured paths (skipped when empty). Solver numerical failures are
/// recorded as a failed `solver` check with exit code 3. Unwritable output
/// paths raise Error naming the path.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

struct SweepRow {
  std::string value;
  double final_f_gap = 0.0;
  /// Steps taken before entering the stop neighborhood; -1 if never reached.
  long long iterations = -1;
  /// Slope of log f_gap against k over the positive gaps; NaN if undefined.
  double fitted_rate = 0.0;
  double t0 = 0.0;
  double lambda0 = 0.0;
  std::string status;
};

/// One experiment per value of a numeric key. Per-run outputs get the value's
/// index as a filename suffix; failures are recorded per row.
std::vector<SweepRow> sweep(const KeyValueDocument& base, const std::string& axis,
                            const std::vector<std::string>& values, unsigned workers = 1);

void write_sweep_csv(std::ostream& out, const std::string& axis, const std::vector<SweepRow>& rows);

}  // namespace trppm
