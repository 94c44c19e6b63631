#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "trppm/linalg.hpp"

// Text-to-number helpers shared by the catalog and the config reader.
// All of them throw InvalidArgument naming `what` on malformed input.
namespace trppm::parse {

std::string trim(std::string_view s);

double real(std::string_view text, std::string_view what);
long long integer(std::string_view text, std::string_view what);

/// Comma-separated list of reals, e.g. "1, 2.5, -3".
std::vector<double> real_list(std::string_view text, std::string_view what);
Vector vector(std::string_view text, std::string_view what);

/// Rows separated by ';', entries by ',', e.g. "2,0;0,1".
Matrix matrix(std::string_view text, std::string_view what);

}  // namespace trppm::parse
