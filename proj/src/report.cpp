#include "trppm/report.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace trppm {

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

void VerificationReport::append(const VerificationReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

void VerificationReport::write(std::ostream& out) const {
  if (!title.empty()) out << "# " << title << '\n';
  for (const auto& c : checks) {
    out << fmt::format("{} {} measured={:.9g} bound={:.9g} tol={:.3g}", c.passed ? "PASS" : "FAIL",
                       c.name, c.measured, c.bound, c.tolerance);
    if (!c.detail.empty()) out << " (" << c.detail << ')';
    out << '\n';
  }
  out << "overall " << (passed() ? "PASS" : "FAIL") << '\n';
}

}  // namespace trppm
