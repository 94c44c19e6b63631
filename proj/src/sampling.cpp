#include "trppm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/erf.hpp>

#include "trppm/error.hpp"

namespace trppm {

namespace {

std::vector<unsigned> first_primes(std::size_t count) {
  std::vector<unsigned> primes;
  for (unsigned n = 2; primes.size() < count; ++n) {
    if (std::none_of(primes.begin(), primes.end(), [n](unsigned p) { return n % p == 0; })) {
      primes.push_back(n);
    }
  }
  return primes;
}

}  // namespace

double radical_inverse(std::uint64_t index, unsigned base) {
  const double inv_base = 1.0 / base;
  double factor = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv_base;
  }
  return result;
}

HaltonBallSampler::HaltonBallSampler(Vector center, double radius, std::uint64_t seed)
    : center_(std::move(center)), radius_(radius) {
  if (center_.size() == 0) throw InvalidArgument("HaltonBallSampler: empty center");
  if (!(radius_ >= 0.0) || !std::isfinite(radius_)) {
    throw InvalidArgument("HaltonBallSampler: radius must be finite and non-negative");
  }
  const Eigen::Index d = center_.size();
  const std::size_t coords = d <= 2 ? 2 : static_cast<std::size_t>(d) + 1;
  bases_ = first_primes(coords);
  // 53-bit mantissa straight from the engine output keeps the shifts
  // identical across standard library implementations.
  std::mt19937_64 engine(seed);
  for (std::size_t i = 0; i < coords; ++i) {
    shifts_.push_back(static_cast<double>(engine() >> 11) * 0x1.0p-53);
  }
}

Vector HaltonBallSampler::operator()(std::uint64_t index) const {
  std::vector<double> u(bases_.size());
  for (std::size_t i = 0; i < bases_.size(); ++i) {
    const double v = radical_inverse(index + 1, bases_[i]) + shifts_[i];
    u[i] = v - std::floor(v);
  }
  const Eigen::Index d = center_.size();
  const double r = radius_ * std::pow(u[0], 1.0 / static_cast<double>(d));

  Vector direction(d);
  if (d == 1) {
    direction[0] = u[1] < 0.5 ? -1.0 : 1.0;
  } else if (d == 2) {
    const double angle = 2.0 * std::numbers::pi * u[1];
    direction << std::cos(angle), std::sin(angle);
  } else {
    constexpr double kEdge = 1e-16;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double p = std::clamp(u[static_cast<std::size_t>(j) + 1], kEdge, 1.0 - kEdge);
      direction[j] = std::numbers::sqrt2 * boost::math::erf_inv(2.0 * p - 1.0);
    }
    const double n = direction.norm();
    if (n == 0.0) {
      direction.setZero();
      direction[0] = 1.0;
    } else {
      direction /= n;
    }
  }
  return center_ + r * direction;
}

}  // namespace trppm
