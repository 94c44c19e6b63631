#include "trppm/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "trppm/parse.hpp"

namespace trppm {

namespace {

const std::set<std::string, std::less<>> kSolverKeys = {
    "solver.regime",         "solver.t",           "solver.lambda",       "solver.theta",
    "solver.epsilon",        "solver.lambda_rule", "solver.max_iters",    "solver.stop_dist",
    "solver.bisection_safety", "solver.bisection_tol", "solver.grid_samples", "solver.grid_safety",
    "solver.anchor",
};

const std::set<std::string, std::less<>> kToleranceChecks = {
    "envelope", "active_step", "descent", "fejer", "step_monotone", "contraction",
};

const std::set<std::string, std::less<>> kRangeChecks = {"slope_x", "slope_gap"};

const std::set<std::string, std::less<>> kNumericKeys = {
    "seed",          "solver.t",           "solver.lambda",         "solver.theta",
    "solver.epsilon", "solver.max_iters",  "solver.stop_dist",      "solver.bisection_safety",
    "solver.bisection_tol", "solver.grid_samples", "solver.grid_safety", "problem.mu",
    "problem.alpha", "problem.radius",     "problem.dim",
};

std::string where(const std::string& key, const KeyValueDocument::Entry& e) {
  return fmt::format("{} (line {})", key, e.line);
}

}  // namespace

KeyValueDocument KeyValueDocument::parse(std::string_view text) {
  KeyValueDocument doc;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = parse::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError(fmt::format("line {}: malformed section header '{}'", line_no, line));
      }
      section = parse::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value', got '{}'", line_no, line));
    }
    const std::string key = parse::trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", line_no));
    const std::string full = section.empty() ? key : section + "." + key;
    if (doc.entries_.count(full)) {
      throw ConfigError(fmt::format("line {}: duplicate key '{}'", line_no, full), {full});
    }
    doc.entries_[full] = Entry{parse::trim(line.substr(eq + 1)), line_no};
  }
  return doc;
}

const KeyValueDocument::Entry* KeyValueDocument::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void KeyValueDocument::set(const std::string& key, std::string value) {
  auto& e = entries_[key];
  e.value = std::move(value);
}

bool is_numeric_key(std::string_view key) { return kNumericKeys.count(key) > 0; }

ExperimentConfig parse_config(std::string_view text) {
  return parse_config(KeyValueDocument::parse(text));
}

ExperimentConfig parse_config(const KeyValueDocument& doc) {
  std::vector<std::string> unknown;
  for (const auto& [key, entry] : doc.entries()) {
    const bool known = key == "seed" || key == "x0" || key.starts_with("problem.") ||
                       kSolverKeys.count(key) || key == "output.csv" || key == "output.report" ||
                       key == "verify.slope_window" ||
                       (key.starts_with("verify.") &&
                        (kToleranceChecks.count(key.substr(7)) || kRangeChecks.count(key.substr(7))));
    if (!known) unknown.push_back(key);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown configuration keys:";
    for (const auto& k : unknown) msg += " " + where(k, *doc.find(k));
    throw ConfigError(msg, unknown);
  }

  // Converts parse failures into ConfigError naming the key and line.
  auto guarded = [&](const std::string& key, auto&& fn) {
    const auto* e = doc.find(key);
    try {
      return fn(e->value);
    } catch (const InvalidArgument& ex) {
      throw ConfigError(fmt::format("{}: {}", where(key, *e), ex.what()), {key});
    }
  };
  auto require = [&](const std::string& key) -> const KeyValueDocument::Entry& {
    const auto* e = doc.find(key);
    if (!e) throw ConfigError(fmt::format("missing required key '{}'", key), {key});
    return *e;
  };
  auto real = [&](const std::string& key) {
    return guarded(key, [&](const std::string& v) { return parse::real(v, key); });
  };
  auto positive = [&](const std::string& key) {
    const double v = real(key);
    if (!(v > 0.0)) {
      throw ConfigError(fmt::format("{}: must be positive, got {}", where(key, *doc.find(key)), v),
                        {key});
    }
    return v;
  };
  auto count = [&](const std::string& key) {
    const long long v =
        guarded(key, [&](const std::string& s) { return parse::integer(s, key); });
    if (v <= 0) {
      throw ConfigError(fmt::format("{}: must be a positive integer", where(key, *doc.find(key))),
                        {key});
    }
    return static_cast<std::uint64_t>(v);
  };
  auto has = [&](const std::string& key) { return doc.find(key) != nullptr; };

  ExperimentConfig cfg;
  if (has("seed")) {
    cfg.seed = static_cast<std::uint64_t>(
        guarded("seed", [](const std::string& v) { return parse::integer(v, "seed"); }));
  }

  cfg.problem.name = require("problem.name").value;
  for (const auto& [key, entry] : doc.entries()) {
    if (key.starts_with("problem.") && key != "problem.name") {
      cfg.problem.params[key.substr(8)] = entry.value;
    }
  }
  std::optional<Problem> problem;
  try {
    problem = make_problem(cfg.problem);
  } catch (const Error& ex) {
    std::vector<std::string> keys{"problem.name"};
    throw ConfigError(fmt::format("problem: {}", ex.what()), keys);
  }

  require("x0");
  cfg.x0 = guarded("x0", [](const std::string& v) { return parse::vector(v, "x0"); });
  if (cfg.x0.size() != problem->dimension()) {
    throw ConfigError(fmt::format("x0: dimension {} does not match problem dimension {}",
                                  cfg.x0.size(), problem->dimension()),
                      {"x0"});
  }

  auto& s = cfg.solver;
  require("solver.regime");
  s.regime = guarded("solver.regime", [](const std::string& v) { return parse_regime(v); });
  if (has("solver.t")) s.t = positive("solver.t");
  if (has("solver.lambda")) {
    s.lambda = real("solver.lambda");
    if (!(s.lambda >= 0.0)) throw ConfigError("solver.lambda: must be non-negative", {"solver.lambda"});
  }
  if (has("solver.theta")) s.theta = positive("solver.theta");
  if (has("solver.epsilon")) s.epsilon = positive("solver.epsilon");
  if (has("solver.lambda_rule")) {
    s.lambda_rule =
        guarded("solver.lambda_rule", [](const std::string& v) { return parse_lambda_rule(v); });
  }
  if (has("solver.max_iters")) s.max_iters = count("solver.max_iters");
  if (has("solver.stop_dist")) {
    s.stop_dist = real("solver.stop_dist");
    if (!(*s.stop_dist >= 0.0)) {
      throw ConfigError("solver.stop_dist: must be non-negative", {"solver.stop_dist"});
    }
  }
  if (has("solver.bisection_safety")) s.bisection_safety = positive("solver.bisection_safety");
  if (has("solver.bisection_tol")) s.bisection_tol = positive("solver.bisection_tol");
  if (has("solver.grid_samples")) s.grid_samples = count("solver.grid_samples");
  if (has("solver.grid_safety")) s.grid_safety = positive("solver.grid_safety");
  if (has("solver.anchor")) {
    s.anchor = guarded("solver.anchor", [](const std::string& v) { return parse::vector(v, "anchor"); });
  }
  s.seed = cfg.seed;
  try {
    s.validate(*problem);
  } catch (const Error& ex) {
    // validate() messages start with the offending "solver.<key>".
    const std::string what = ex.what();
    throw ConfigError(what, {what.substr(0, what.find(':'))});
  }

  if (has("output.csv")) cfg.csv_path = doc.find("output.csv")->value;
  if (has("output.report")) cfg.report_path = doc.find("output.report")->value;

  for (const auto& [key, entry] : doc.entries()) {
    if (!key.starts_with("verify.") || key == "verify.slope_window") continue;
    const std::string name = key.substr(7);
    CheckSpec check{name, 0.0, std::nullopt};
    if (kRangeChecks.count(name)) {
      const auto values =
          guarded(key, [&](const std::string& v) { return parse::real_list(v, key); });
      if (values.size() != 2 || !(values[0] < values[1])) {
        throw ConfigError(fmt::format("{}: expected 'lo, hi' with lo < hi", where(key, entry)), {key});
      }
      check.range = std::make_pair(values[0], values[1]);
    } else {
      check.tolerance = positive(key);
    }
    const bool unbounded = !std::isfinite(s.t) && s.regime != Regime::kTrppmFixedLambda;
    if ((name == "active_step" && unbounded) ||
        (name == "contraction" && s.regime == Regime::kPpm)) {
      throw ConfigError(fmt::format("{}: check does not apply to regime {}", where(key, entry),
                                    to_string(s.regime)),
                        {key});
    }
    cfg.checks.push_back(std::move(check));
  }
  if (has("verify.slope_window")) {
    const auto values = guarded("verify.slope_window", [](const std::string& v) {
      return parse::real_list(v, "verify.slope_window");
    });
    if (values.size() != 2 || !(values[0] >= 0.0) || !(values[0] < values[1])) {
      throw ConfigError("verify.slope_window: expected 'k_lo, k_hi' with 0 <= k_lo < k_hi",
                        {"verify.slope_window"});
    }
    cfg.slope_window = std::make_pair(static_cast<std::uint64_t>(values[0]),
                                      static_cast<std::uint64_t>(values[1]));
  }
  return cfg;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void apply_seed_override(ExperimentConfig& config) {
  const char* env = std::getenv("TRPPM_SEED");
  if (env == nullptr || *env == '\0') return;
  try {
    config.seed = static_cast<std::uint64_t>(parse::integer(env, "TRPPM_SEED"));
  } catch (const InvalidArgument& ex) {
    throw ConfigError(ex.what(), {"TRPPM_SEED"});
  }
  config.solver.seed = config.seed;
}

}  // namespace trppm
