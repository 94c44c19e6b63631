#include <cmath>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "trppm/error.hpp"
#include "trppm/problem.hpp"
#include "trppm/verify.hpp"

using namespace trppm;
using test::diag;
using test::vec;

TEST_CASE("catalog values") {
  CHECK(make_quartic1d().value(vec({2.0})) == 4.0);
  CHECK(make_scaled_abs(2.0).value(vec({-1.5})) == 3.0);
  CHECK(make_quadratic(diag({2.0, 1.0})).value(vec({1.0, 2.0})) == doctest::Approx(3.0));
  CHECK(make_sharp_norm(2.0, 2).value(vec({3.0, 4.0})) == doctest::Approx(10.0));
  const auto box = make_indicator_box(vec({-1.0}), vec({1.0}));
  CHECK(box.value(vec({0.5})) == 0.0);
  CHECK(std::isinf(box.value(vec({1.5}))));
  const auto ball = make_indicator_ball(vec({0.0, 0.0}), 1.0);
  CHECK(ball.value(vec({0.6, 0.8})) == 0.0);
  CHECK(std::isinf(ball.value(vec({0.6, 0.9}))));
}

TEST_CASE("weak sharp metadata") {
  const auto abs = make_scaled_abs(1.0);
  REQUIRE(abs.weak_sharp());
  CHECK(abs.weak_sharp()->alpha == 1.0);
  CHECK(abs.weak_sharp()->order == 1.0);
  CHECK_FALSE(make_indicator_box(vec({0.0}), vec({1.0})).weak_sharp());
  CHECK(make_quadratic(Matrix::Identity(2, 2)).strong_convexity() == 1.0);
  CHECK_FALSE(make_quadratic(diag({1.0, 0.0})).strong_convexity());
}

TEST_CASE("kernel projection of a singular quadratic") {
  const auto p = make_quadratic(diag({1.0, 0.0}));
  const Vector x = vec({3.0, 5.0});
  const Vector proj = p.project_to_solutions(x);
  CHECK(proj[0] == doctest::Approx(0.0));
  CHECK(proj[1] == doctest::Approx(5.0));

  // Brute force over a gridded kernel {(0, s)}.
  double best = kInf;
  for (int i = -20000; i <= 20000; ++i) {
    const double s = i * 1e-3;
    best = std::min(best, std::hypot(x[0], x[1] - s));
  }
  CHECK(p.dist_to_solutions(x) == doctest::Approx(best).epsilon(1e-9));
  CHECK(p.dist_to_solutions(x) == doctest::Approx(3.0));
}

TEST_CASE("distances") {
  CHECK(make_scaled_abs(1.0).dist_to_solutions(vec({-3.0})) == 3.0);
  CHECK(make_indicator_box(vec({-1.0}), vec({1.0})).dist_to_solutions(vec({4.0})) == 3.0);
  CHECK(make_indicator_ball(vec({1.0, 0.0}), 1.0).dist_to_solutions(vec({4.0, 4.0})) ==
        doctest::Approx(4.0));
  CHECK_THROWS_AS(make_scaled_abs(1.0).dist_to_solutions(vec({1.0, 2.0})), DimensionError);
}

TEST_CASE("ground truth invariants over the catalog") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const auto& p : property_catalog()) {
    CAPTURE(p.name());
    for (int i = 0; i < 100; ++i) {
      Vector x(p.dimension());
      for (auto& c : x) c = u(rng);
      const double fx = p.value(x);
      CHECK(fx >= p.f_inf());
      const Vector proj = p.project_to_solutions(x);
      CHECK(p.value(proj) - p.f_inf() <= 1e-10);
      CHECK((p.project_to_solutions(proj) - proj).norm() <= 1e-12);
      if (const auto& ws = p.weak_sharp()) {
        CHECK(fx - p.f_inf() >= ws->alpha * std::pow(p.dist_to_solutions(x), ws->order) * (1 - 1e-12));
      }
      if (p.as<SharpNorm>() || p.as<ScaledAbs>()) {
        CHECK(fx - p.f_inf() == doctest::Approx(p.weak_sharp()->alpha * p.dist_to_solutions(x)));
      }
    }
  }
}

TEST_CASE("gradients") {
  CHECK(make_quartic1d().gradient(vec({2.0}))->coeff(0) == 8.0);
  CHECK_FALSE(make_scaled_abs(1.0).gradient(vec({0.0})));
  CHECK_FALSE(make_sharp_norm(1.0, 2).gradient(vec({0.0, 0.0})));
  CHECK_FALSE(make_indicator_ball(vec({0.0, 0.0}), 1.0).gradient(vec({1.0, 0.0})));
  CHECK(make_indicator_ball(vec({0.0, 0.0}), 1.0).gradient(vec({0.5, 0.0}))->norm() == 0.0);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(make_quadratic(diag({1.0, -1e-3})), Error);
  Matrix asym(2, 2);
  asym << 1, 1, 0, 1;
  CHECK_THROWS_AS(make_quadratic(asym), Error);
  CHECK_THROWS_AS(make_indicator_box(vec({1.0, 0.0}), vec({0.0, 1.0})), Error);
  CHECK_THROWS_AS(make_indicator_ball(vec({0.0}), 0.0), Error);
  CHECK_THROWS_AS(make_scaled_abs(0.0), Error);
  CHECK_THROWS_AS(make_sharp_norm(-1.0, 2), Error);

  // Tiny negative eigenvalues are rounding noise and clamp to zero.
  const auto p = make_quadratic(diag({1.0, -1e-11}));
  CHECK(p.as<Quadratic>()->eigen.values.minCoeff() == 0.0);
  CHECK(p.dist_to_solutions(vec({2.0, 7.0})) == doctest::Approx(2.0));
}

TEST_CASE("catalog by name") {
  CHECK(make_problem({"quartic1d", {}}).value(vec({2.0})) == 4.0);
  const auto q = make_problem({"quadratic", {{"Q", "2, 0; 0, 1"}}});
  CHECK(q.dimension() == 2);
  CHECK(q.value(vec({1.0, 1.0})) == doctest::Approx(1.5));
  const auto ball = make_problem({"indicator_ball", {{"center", "0, 0, 0"}, {"radius", "2"}}});
  CHECK(ball.dimension() == 3);
  CHECK(make_problem({"sharp_norm", {{"alpha", "2"}, {"dim", "3"}}}).dimension() == 3);
  CHECK(make_problem({"scaled_abs", {{"mu", "3"}}}).value(vec({-1.0})) == 3.0);
  CHECK_THROWS_AS(make_problem({"rosenbrock", {}}), Error);
  CHECK_THROWS_AS(make_problem({"scaled_abs", {{"mu", "1"}, {"nu", "2"}}}), Error);
  CHECK_THROWS_AS(make_problem({"indicator_box", {{"lower", "0, 0"}, {"upper", "1"}}}), Error);
}
