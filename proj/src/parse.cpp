#include "trppm/parse.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "trppm/error.hpp"

namespace trppm::parse {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double real(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf" || t == "infinity") return kInf;
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc() || ptr != end || std::isnan(value)) {
    throw InvalidArgument(fmt::format("{}: expected a real number, got '{}'", what, t));
  }
  return value;
}

long long integer(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw InvalidArgument(fmt::format("{}: expected an integer, got '{}'", what, t));
  }
  return value;
}

std::vector<double> real_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& part : split(text, ',')) out.push_back(real(part, what));
  return out;
}

Vector vector(std::string_view text, std::string_view what) {
  const auto values = real_list(text, what);
  if (values.empty()) throw InvalidArgument(fmt::format("{}: empty vector", what));
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  require_finite(v, what);
  return v;
}

Matrix matrix(std::string_view text, std::string_view what) {
  const auto rows = split(text, ';');
  std::vector<std::vector<double>> data;
  for (const auto& row : rows) data.push_back(real_list(row, what));
  const std::size_t cols = data.empty() ? 0 : data.front().size();
  if (cols == 0) throw InvalidArgument(fmt::format("{}: empty matrix", what));
  Matrix m(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].size() != cols) {
      throw InvalidArgument(fmt::format("{}: row {} has {} entries, expected {}", what, i,
                                        data[i].size(), cols));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[i][j];
    }
  }
  return m;
}

}  // namespace trppm::parse
