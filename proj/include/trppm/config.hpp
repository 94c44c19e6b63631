#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trppm/error.hpp"
#include "trppm/linalg.hpp"
#include "trppm/problem.hpp"
#include "trppm/solver.hpp"

namespace trppm {

/// Malformed or invalid experiment configuration. `keys` lists the
/// offending dotted keys.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::vector<std::string> keys = {})
      : Error(what), keys_(std::move(keys)) {}

  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  std::vector<std::string> keys_;
};

/// Flat key-value document. Lines are `key = value`; `[section]` headers
/// prefix following keys with `section.`; `#` starts a comment.
class KeyValueDocument {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static KeyValueDocument parse(std::string_view text);

  const std::map<std::string, Entry>& entries() const { return entries_; }
  const Entry* find(const std::string& key) const;
  void set(const std::string& key, std::string value);

 private:
  std::map<std::string, Entry> entries_;
};

/// A named verification check. Tolerance checks use `tolerance`; slope
/// checks use `range` instead.
struct CheckSpec {
  std::string name;
  double tolerance = 0.0;
  std::optional<std::pair<double, double>> range;
};

struct ExperimentConfig {
  CatalogEntry problem;
  Vector x0;
  SolverConfig solver;
  std::string csv_path;
  std::string report_path;
  std::vector<CheckSpec> checks;
  /// Record window for slope checks; defaults to the whole trace.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> slope_window;
  std::uint64_t seed = 42;
};

/// Strict parse: unknown keys, malformed values and schema violations raise
/// ConfigError naming the keys (and lines) involved.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig parse_config(const KeyValueDocument& doc);
std::string read_text_file(const std::filesystem::path& path);

/// Keys that take a single number; the valid sweep axes.
bool is_numeric_key(std::string_view key);

/// TRPPM_SEED, when set, replaces the configured seed.
void apply_seed_override(ExperimentConfig& config);

}  // namespace trppm
