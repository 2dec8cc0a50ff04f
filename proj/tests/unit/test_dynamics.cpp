#include <doctest.h>

#include <cmath>

#include "parapuzzle/dynamics.hpp"

using namespace parapuzzle;

namespace {

// Independent of the library: f^n(0) and its c-derivative in long double.
long double orbit_real(long double c, int n) {
  long double z = 0;
  for (int k = 0; k < n; ++k) z = z * z + c;
  return z;
}

}  // namespace

TEST_CASE("fixed points in closed form") {
  auto f0 = fixed_points(0.0);
  CHECK(std::abs(f0.alpha) < 1e-15);
  CHECK(std::abs(f0.beta - 1.0) < 1e-15);
  auto f2 = fixed_points(-2.0);
  CHECK(std::abs(f2.alpha + 1.0) < 1e-15);
  CHECK(std::abs(f2.beta - 2.0) < 1e-15);
  CHECK(std::abs(f2.alpha_multiplier + 2.0) < 1e-15);
  auto f1 = fixed_points(-1.0);
  CHECK(std::abs(f1.alpha - (1.0 - std::sqrt(5.0)) / 2.0) < 1e-15);
  CHECK_THROWS_AS(fixed_points(0.25), Error);
}

TEST_CASE("co-fixed point") {
  CHECK(std::abs(cofixed_point(-2.0).point - 1.0) < 1e-15);
  CHECK(cofixed_point(0.0).coincides_with_alpha);
  CHECK(std::abs(cofixed_point(-1.0).point - (std::sqrt(5.0) - 1.0) / 2.0) < 1e-15);
  CHECK_FALSE(cofixed_point(-1.0).coincides_with_alpha);
}

TEST_CASE("fixed and co-fixed points satisfy their equations") {
  for (Complex c : {Complex(-1.3), Complex(-0.2, 0.75), Complex(0.3, -0.4), Complex(-1.9), Complex(-0.1, 0.65)}) {
    const auto f = fixed_points(c);
    CHECK(std::abs(quad(c, f.alpha) - f.alpha) < 1e-10);
    CHECK(std::abs(quad(c, f.beta) - f.beta) < 1e-10);
    CHECK(std::abs(quad(c, cofixed_point(c).point) - f.alpha) < 1e-10);
  }
}

TEST_CASE("critical orbits") {
  auto o0 = critical_orbit(0.0, 5);
  CHECK(o0.points.size() == 6);
  CHECK_FALSE(o0.escaped_at);
  for (auto z : o0.points) CHECK(z == Complex(0.0));
  auto o2 = critical_orbit(-2.0, 4);
  REQUIRE(o2.points.size() == 5);
  CHECK(o2.points[1] == Complex(-2.0));
  CHECK(o2.points[4] == Complex(2.0));
  auto o1 = critical_orbit(1.0, 10, 4.0);
  REQUIRE(o1.escaped_at);
  CHECK(*o1.escaped_at == 3);
  CHECK(o1.points.back() == Complex(5.0));
  auto again = critical_orbit(Complex(-0.7, 0.3), 50);
  CHECK(again.points == critical_orbit(Complex(-0.7, 0.3), 50).points);
}

TEST_CASE("superattracting centers") {
  CHECK(std::abs(solve_center(1, 0.1)) < 1e-12);
  CHECK(std::abs(solve_center(2, -0.9) + 1.0) < 1e-12);
  const Complex c3 = solve_center(3, -1.8);
  // The real root of c^3 + 2c^2 + c + 1.
  CHECK(std::abs(c3.real() + 1.754877666246693) < 1e-12);
  CHECK(std::abs(orbit_real(c3.real(), 3)) < 1e-12);
  CHECK(std::abs(solve_center(3, c3) - c3) < 1e-13);
  CHECK_THROWS_AS(solve_center(4, -1.0), Error);  // converges to the period-2 center
}

TEST_CASE("Misiurewicz parameters") {
  const Complex d = solve_misiurewicz(2, 1, 1, -1.5);
  CHECK(std::abs(d.real() + 1.5436890126920764) < 1e-12);
  CHECK(std::abs(iterate(d, 0.0, 2) - cofixed_point(d).point) < 1e-12);
  CHECK(std::abs(iterate(d, 0.0, 3) - fixed_points(d).alpha) < 1e-12);
  CHECK(misiurewicz_d() == doctest::Approx(-1.5436890126920764).epsilon(1e-15));
  CHECK_THROWS_AS(solve_misiurewicz(2, 1, 1, 0.2), Error);
  const Complex m3 = solve_misiurewicz(3, 1, 1, Complex(-0.2, 0.8));
  CHECK(std::abs(iterate(m3, 0.0, 3) - cofixed_point(m3).point) < 1e-12);
  CHECK(m3.imag() > 0.0);
  for (int n = 1; n <= 6; ++n) {
    const Complex m = solve_misiurewicz(2, 1, n, n == 1 ? -1.5 : -1.9);
    CHECK(std::abs(iterate(m, 0.0, 2 * n) - cofixed_point(m).point) < 1e-10);
  }
}

TEST_CASE("parameter bounds") {
  CHECK_THROWS_AS(require_parameter(9.0), Error);
  CHECK_THROWS_AS(require_parameter(Complex(NAN, 0.0)), Error);
  CHECK_NOTHROW(require_parameter(Complex(-2.0, 0.0)));
}
