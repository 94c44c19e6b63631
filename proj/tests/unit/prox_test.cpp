#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "trppm/error.hpp"
#include "trppm/prox.hpp"
#include "trppm/verify.hpp"

using namespace trppm;
using test::diag;
using test::vec;

namespace {

double objective(const Problem& p, const Vector& z, const Vector& x, double lambda) {
  return p.value(z) + 0.5 * lambda * (z - x).squaredNorm();
}

// Grid minimizer of the 1-D subproblem over [lo, hi].
double grid_min_1d(const Problem& p, double x, double lambda, double lo, double hi, int n = 200001) {
  double best = lo;
  double best_val = kInf;
  for (int i = 0; i < n; ++i) {
    const double z = lo + (hi - lo) * i / (n - 1);
    const double v = objective(p, vec({z}), vec({x}), lambda);
    if (v < best_val) {
      best_val = v;
      best = z;
    }
  }
  return best;
}

// Polar-grid minimizer of the 2-D subproblem over the disk of radius t.
Vector polar_min(const Problem& p, const Vector& x, double lambda, double t) {
  Vector best = x;
  double best_val = objective(p, x, x, lambda);
  for (int i = 1; i <= 400; ++i) {
    for (int j = 0; j < 4000; ++j) {
      const double r = t * i / 400;
      const double a = 2 * std::numbers::pi * j / 4000;
      const Vector z = x + r * vec({std::cos(a), std::sin(a)});
      const double v = objective(p, z, x, lambda);
      if (v < best_val) {
        best_val = v;
        best = z;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("prox closed forms") {
  const auto abs = make_scaled_abs(1.0);
  CHECK(prox(abs, 1.0, vec({0.5}))[0] == 0.0);
  CHECK(prox(abs, 2.0, vec({0.5}))[0] == 0.0);
  CHECK(prox(abs, 2.0, vec({3.0}))[0] == doctest::Approx(2.5));
  CHECK(prox(make_quadratic(Matrix::Identity(1, 1)), 1.0, vec({2.0}))[0] == doctest::Approx(1.0));
  const Vector s = prox(make_sharp_norm(1.0, 2), 1.0, vec({3.0, 4.0}));
  CHECK((s - vec({2.4, 3.2})).norm() <= 1e-12);
  CHECK((prox(make_indicator_ball(vec({0.0, 0.0}), 1.0), 5.0, vec({3.0, 4.0})) - vec({0.6, 0.8})).norm() <=
        1e-12);
  CHECK(prox(make_scaled_abs(1.0), kInf, vec({3.0}))[0] == 3.0);
}

TEST_CASE("quartic prox solves z^3 + lambda (z - x) = 0") {
  const auto q = make_quartic1d();
  CHECK(prox(q, 1.0, vec({2.0}))[0] == doctest::Approx(1.0).epsilon(1e-12));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-8.0, 8.0);
  std::uniform_real_distribution<double> ul(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double x = ux(rng);
    const double lambda = std::pow(10.0, ul(rng));
    const double z = prox(q, lambda, vec({x}))[0];
    CHECK(std::abs(z * z * z + lambda * (z - x)) <= 1e-9 * std::max(1.0, std::abs(x)) * std::max(1.0, lambda));
    const double g = grid_min_1d(q, x, lambda, std::min(0.0, x), std::max(0.0, x), 20001);
    CHECK(std::abs(z - g) <= 1e-3 * std::max(1.0, std::abs(x)));
  }
}

TEST_CASE("prox rejects non-positive lambda") {
  CHECK_THROWS_AS(prox(make_quartic1d(), 0.0, vec({1.0})), InvalidArgument);
  CHECK_THROWS_AS(prox(make_quartic1d(), -1.0, vec({1.0})), InvalidArgument);
  CHECK_THROWS_AS(prox(make_quartic1d(), 1.0, vec({1.0, 2.0})), DimensionError);
}

TEST_CASE("prox_zero projects onto the minimizers") {
  CHECK(prox_zero(make_scaled_abs(1.0), vec({7.0}))[0] == 0.0);
  const Vector b = prox_zero(make_indicator_box(vec({-1.0, -1.0}), vec({1.0, 1.0})), vec({2.0, 0.0}));
  CHECK(b == vec({1.0, 0.0}));
  CHECK(prox_zero(make_quartic1d(), vec({-4.0}))[0] == 0.0);
}

TEST_CASE("minimizers are fixed points of every operator") {
  for (const auto& p : property_catalog()) {
    CAPTURE(p.name());
    const Vector xs = p.project_to_solutions(Vector::Constant(p.dimension(), 3.0));
    for (double lambda : {0.0, 0.5, 4.0}) {
      for (double t : {0.5, kInf}) {
        const auto r = tr_prox(p, xs, lambda, t);
        CHECK((r.point - xs).norm() <= 1e-12);
        CHECK_FALSE(r.active);
      }
    }
  }
}

TEST_CASE("trust-region step on a 1-D quadratic") {
  const auto p = make_quadratic(Matrix::Identity(1, 1));
  const auto active = tr_prox(p, vec({4.0}), 1.0, 1.0);
  CHECK(active.point[0] == doctest::Approx(3.0));
  CHECK(active.active);
  CHECK(grid_min_1d(p, 4.0, 1.0, 3.0, 5.0) == doctest::Approx(3.0).epsilon(1e-5));
  REQUIRE(active.multiplier);
  // (c + lambda)(x - u) = f'(u): (c + 1) * 1 = 3.
  CHECK(*active.multiplier == doctest::Approx(2.0));

  const auto inactive = tr_prox(p, vec({4.0}), 1.0, 5.0);
  CHECK(inactive.point[0] == doctest::Approx(2.0));
  CHECK_FALSE(inactive.active);
  CHECK(inactive.multiplier == 0.0);
}

TEST_CASE("broximal steps") {
  const auto abs = make_scaled_abs(1.0);
  const auto r = brox(abs, vec({3.0}), 1.0);
  CHECK(r.point[0] == doctest::Approx(2.0));
  CHECK(r.active);
  CHECK(grid_min_1d(abs, 3.0, 0.0, 2.0, 4.0) == doctest::Approx(2.0));
  const auto far = brox(abs, vec({3.0}), 5.0);
  CHECK(far.point[0] == 0.0);
  CHECK_FALSE(far.active);

  const auto q = make_quadratic(diag({1.0, 0.0}));
  const auto b = brox(q, vec({2.0, 2.0}), 1.0);
  CHECK((b.point - vec({1.0, 2.0})).norm() <= 1e-8);
  CHECK(b.active);
  CHECK((polar_min(q, vec({2.0, 2.0}), 0.0, 1.0) - b.point).norm() <= 2e-3);
}

TEST_CASE("secular solutions agree with polar-grid brute force") {
  Matrix q(2, 2);
  q << 2, 1, 1, 1.5;
  const auto p = make_quadratic(q);
  for (double lambda : {0.0, 0.3, 1.0}) {
    const Vector x = vec({3.0, -2.0});
    const auto r = tr_prox(p, x, lambda, 0.8);
    CHECK(r.active);
    CHECK(std::abs((r.point - x).norm() - 0.8) <= 1e-8);
    const Vector g = polar_min(p, x, lambda, 0.8);
    CHECK((g - r.point).norm() <= 2e-3);
    CHECK(objective(p, r.point, x, lambda) <= objective(p, g, x, lambda) + 1e-12);
  }
}

TEST_CASE("result invariants") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> ut(0.1, 3.0);
  for (const auto& p : property_catalog()) {
    CAPTURE(p.name());
    for (int i = 0; i < 50; ++i) {
      Vector x(p.dimension());
      for (auto& c : x) c = u(rng);
      const double lambda = i % 3 == 0 ? 0.0 : std::abs(u(rng));
      const double t = ut(rng);
      const auto r = tr_prox(p, x, lambda, t);
      const double len = (r.point - x).norm();
      if (r.active) {
        CHECK(std::abs(len - t) <= 1e-8 * std::max(1.0, t));
      } else {
        CHECK(len <= t);
        CHECK(r.multiplier == 0.0);
      }
      if (r.multiplier) CHECK(*r.multiplier >= 0.0);
    }
  }
}

TEST_CASE("indicator ray step flags non-uniqueness") {
  const auto ball = make_indicator_ball(vec({0.0, 0.0}), 1.0);
  const auto r = brox(ball, vec({5.0, 0.0}), 1.0);
  CHECK(r.active);
  CHECK((r.point - vec({4.0, 0.0})).norm() <= 1e-12);
  CHECK_FALSE(r.unique);
}

TEST_CASE("tr_prox rejects a non-positive radius") {
  CHECK_THROWS_AS(tr_prox(make_quartic1d(), vec({1.0}), 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(tr_prox(make_quartic1d(), vec({1.0}), -1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(tr_prox(SubproblemSpec{}), InvalidArgument);
}
