#include <doctest.h>

#include <cmath>
#include <sstream>

#include "parapuzzle/dynamics.hpp"
#include "parapuzzle/modulus.hpp"

using namespace parapuzzle;

namespace {

constexpr double kFibonacci = -1.8705286321646448;

Polyline circle(Complex c, double r, int n = 720) {
  Polyline p;
  for (int k = 0; k < n; ++k) p.push_back(c + std::polar(r, 2.0 * M_PI * k / n));
  return p;
}

Polyline square(Complex c, double half) {
  return {c + Complex(-half, -half), c + Complex(half, -half), c + Complex(half, half), c + Complex(-half, half)};
}

Polyline transformed(const Polyline& p, Complex shift, double scale) {
  Polyline out;
  for (auto z : p) out.push_back(shift + scale * z);
  return out;
}

double modulus(const Polyline& outer, const Polyline& inner, int res = 512, ModulusGrid grid = ModulusGrid::Uniform) {
  return annulus_modulus({outer, inner, res, grid}).mod;
}

ErrorCode error_of(const AnnulusSpec& spec) {
  try {
    annulus_modulus(spec);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("round annuli") {
  CHECK(modulus(circle(0.0, 2.0), circle(0.0, 1.0)) == doctest::Approx(std::log(2.0)).epsilon(0.02));
  CHECK(modulus(circle(0.0, std::exp(1.0)), circle(0.0, 1.0)) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(modulus(circle(0.0, 3.0), circle(0.0, 1.0)) == doctest::Approx(std::log(3.0)).epsilon(0.02));
  const double lp = modulus(circle(0.0, 50.0), circle(0.0, 1.0), 256, ModulusGrid::LogPolar);
  CHECK(lp == doctest::Approx(std::log(50.0)).epsilon(0.01));
}

TEST_CASE("square annulus") {
  const ModulusEstimate e = annulus_modulus({square(0.0, 1.5), square(0.0, 0.5), 512});
  // Monotonicity between the inscribed and circumscribed round annuli.
  CHECK(e.mod > std::log(1.5 / std::sqrt(0.5)));
  CHECK(e.mod < std::log(1.5 * std::sqrt(2.0) / 0.5));
  CHECK(e.mod == doctest::Approx(1.0113).epsilon(0.002));
  CHECK(e.richardson_error < 0.01 * e.mod);
  CHECK(e.resolution_pair.first == 512);
  CHECK(e.energy > 0.0);
}

TEST_CASE("conformal invariance under similarities") {
  const double base = modulus(circle(0.0, 2.0), circle(0.3, 0.7), 256);
  CHECK(modulus(transformed(circle(0.0, 2.0), Complex(3.0, -2.0), 1.0), transformed(circle(0.3, 0.7), Complex(3.0, -2.0), 1.0),
                256) == doctest::Approx(base).epsilon(1e-6));
  CHECK(modulus(transformed(circle(0.0, 2.0), 0.0, 1e-3), transformed(circle(0.3, 0.7), 0.0, 1e-3), 256) ==
        doctest::Approx(base).epsilon(1e-6));
  // Eccentric annulus: mod = acosh((R^2 + r^2 - d^2) / (2 R r)).
  const double exact = std::acosh((4.0 + 0.49 - 0.09) / (2.0 * 2.0 * 0.7));
  CHECK(base == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("grid refinement converges") {
  const double exact = std::log(2.0);
  const double coarse = std::abs(modulus(circle(0.0, 2.0), circle(0.0, 1.0), 128) - exact);
  const double fine = std::abs(modulus(circle(0.0, 2.0), circle(0.0, 1.0), 512) - exact);
  CHECK(fine < coarse);
}

TEST_CASE("annulus errors") {
  CHECK(error_of({circle(0.0, 1.0), circle(0.5, 1.0), 128}) == ErrorCode::CurvesIntersect);
  CHECK(error_of({circle(0.0, 1.0), circle(3.0, 0.5), 128}) == ErrorCode::CurvesIntersect);
  CHECK(error_of({circle(0.0, 1.0), circle(0.0, 0.995), 128}) == ErrorCode::TooThin);
  CHECK(error_of({circle(0.0, 1.0), circle(0.0, 0.001), 128}) == ErrorCode::TooThin);
  CHECK(error_of({circle(0.0, 2.0), circle(0.0, 1.0), 32}) == ErrorCode::InvalidArgument);
}

TEST_CASE("nest moduli bookkeeping") {
  CHECK(nest_moduli(kFibonacci, 0, {}, 256, 512).entries.empty());
  const auto partial = nest_moduli(solve_center(3, -1.75), 1, {}, 128, 256, 0);
  REQUIRE(partial.entries.size() == 1);
  CHECK_FALSE(partial.entries[0].annulus);
  REQUIRE(partial.entries[0].error);
  CHECK(*partial.entries[0].error == ErrorCode::EmptyTile);
  CHECK_THROWS_AS(nest_moduli(kFibonacci, 1, {}, 256, 512, -1), Error);
}

TEST_CASE("first Fibonacci nest annulus") {
  const auto r = nest_moduli(kFibonacci, 1, {}, 256, 512);
  REQUIRE(r.entries.size() == 1);
  const auto& e = r.entries[0];
  REQUIRE(e.annulus);
  REQUIRE(e.central);
  CHECK(e.annulus->mod == doctest::Approx(2.5542).epsilon(0.01));
  CHECK(e.central->mod == doctest::Approx(0.7481).epsilon(0.02));
  CHECK(e.contour_error < 0.05);
  REQUIRE(r.tiles.size() == 2);
  std::ostringstream csv;
  write_moduli_csv(csv, r);
  CHECK(csv.str().rfind("l,mod,richardson_error,contour_error,central_mod", 0) == 0);
}
