#pragma once

#include <initializer_list>

#include "trppm/linalg.hpp"

namespace trppm::test {

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double d : values) v[i++] = d;
  return v;
}

inline Matrix diag(std::initializer_list<double> values) { return vec(values).asDiagonal(); }

}  // namespace trppm::test
