#pragma once

#include <cstdint>
#include <vector>

#include "trppm/linalg.hpp"

namespace trppm {

/// Deterministic low-discrepancy points in a closed Euclidean ball.
///
/// A Halton sequence, scrambled by a seeded Cranley-Patterson shift, is mapped
/// to the ball radially: the first coordinate sets the radius as R u^(1/d),
/// the rest set the direction (sign in 1-D, angle in 2-D, normalized inverse
/// normal CDF otherwise). Points are addressable by index, so disjoint index
/// ranges can be evaluated independently.
class HaltonBallSampler {
 public:
  HaltonBallSampler(Vector center, double radius, std::uint64_t seed = 42);

  Vector operator()(std::uint64_t index) const;

  Eigen::Index dimension() const { return center_.size(); }

 private:
  Vector center_;
  double radius_;
  std::vector<unsigned> bases_;
  std::vector<double> shifts_;
};

/// Radical inverse of `index` in the given prime base, in [0, 1).
double radical_inverse(std::uint64_t index, unsigned base);

}  // namespace trppm
