#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace trppm {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Pass/fail record of a set of checks; passes iff every check passes.
struct VerificationReport {
  std::string title;
  std::vector<CheckResult> checks;

  bool passed() const;
  void add(CheckResult check) { checks.push_back(std::move(check)); }
  void append(const VerificationReport& other);
  /// One line per check followed by an `overall` line.
  void write(std::ostream& out) const;
};

}  // namespace trppm
