#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "trppm/problem.hpp"
#include "trppm/report.hpp"

namespace trppm {

/// Problems the property suites sample over: one or more instances of every
/// catalog class, including singular quadratics and non-singleton X*.
std::vector<Problem> property_catalog();

/// Nonexpansiveness, subproblem optimality, the boundary law of brox,
/// optimality certificates and the secular-equation vs grid comparison.
VerificationReport verify_operators(std::uint64_t seed = 42);

/// Range, monotonicity, limits and continuity of phi; m_f monotonicity and
/// positivity; admissibility of the bisection and weak-sharp lambda rules;
/// m_f closed forms against grid estimates.
VerificationReport verify_displacement(std::uint64_t seed = 42);

/// Solver runs of every regime with their rate bounds, plus Fejer, descent
/// identity, PPM step monotonicity and the regime identities.
VerificationReport verify_rates(std::uint64_t seed = 42);

/// brox against tr_prox on `instances` random active 2-D quadratics.
VerificationReport verify_equivalence(std::uint64_t seed = 42, int instances = 20);

/// Suite by name: operators, displacement, rates, equivalence or all.
/// Throws InvalidArgument for other names.
VerificationReport verify_suite(std::string_view name, std::uint64_t seed = 42);

}  // namespace trppm
