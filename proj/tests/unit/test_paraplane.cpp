#include <doctest.h>

#include <cmath>
#include <sstream>

#include "parapuzzle/dynamics.hpp"
#include "parapuzzle/paraplane.hpp"

using namespace parapuzzle;

namespace {

constexpr double kFibonacci = -1.8705286321646448;

Complex cardioid_point(int p, int q) {
  const Complex u = std::polar(1.0, 2.0 * M_PI * q / p);
  return u / 2.0 - u * u / 4.0;
}

std::vector<Complex> unit_circle(int n, double phase = 0.0) {
  std::vector<Complex> loop;
  for (int k = 0; k < n; ++k) loop.push_back(std::polar(1.0, phase + 2.0 * M_PI * k / n));
  loop.push_back(loop.front());
  return loop;
}

template <class F>
std::vector<Complex> map(const std::vector<Complex>& loop, F f) {
  std::vector<Complex> out;
  for (auto z : loop) out.push_back(f(z));
  return out;
}

long winding_of(const std::vector<Complex>& loop, auto f) {
  return winding_number(loop, map(loop, f), std::vector<Complex>(loop.size(), 0.0)).w;
}

// Level-0 key of the Fibonacci parameter read on the real line: v1 left of
// alpha, v2 right of -alpha, v3 back in (alpha, -alpha).
bool real_level0_key(double c) {
  const double a = (1.0 - std::sqrt(1.0 - 4.0 * c)) / 2.0;
  const double v1 = c, v2 = c * c + c, v3 = v2 * v2 + c;
  return v1 < a && v2 > -a && std::abs(v3) < -a;
}

double bisect_edge(double in, double out) {
  for (int k = 0; k < 80; ++k) {
    const double mid = 0.5 * (in + out);
    (real_level0_key(mid) ? in : out) = mid;
  }
  return in;
}

// 121 x 135 cells, so the middle row lies on the real axis.
const Box kWindow{-2.1, -0.4462809917355372, -1.3, 0.4462809917355372};
constexpr int kResolution = 121;

std::size_t outside_of(const Raster& inner, const Raster& outer, const Raster* unknown = nullptr) {
  std::size_t n = 0;
  for (std::size_t k = 0; k < inner.cells.size(); ++k)
    if (inner.cells[k] && !outer.cells[k] && !(unknown && unknown->cells[k])) ++n;
  return n;
}

}  // namespace

TEST_CASE("parabolic wakes") {
  const Wake w2 = wake_boundary(2, 1);
  CHECK(w2.boundary_angles.first == Angle(1, 3));
  CHECK(w2.boundary_angles.second == Angle(2, 3));
  CHECK(std::abs(w2.landing_param + 0.75) < 1e-5);
  CHECK(w2.landing_gap < 1e-5);
  const Wake w3 = wake_boundary(3, 1);
  CHECK(w3.boundary_angles.first == Angle(1, 7));
  CHECK(w3.boundary_angles.second == Angle(2, 7));
  CHECK(std::abs(w3.landing_param - cardioid_point(3, 1)) < 1e-5);
  const Wake w4 = wake_boundary(4, 3);
  CHECK(std::abs(w4.landing_param - cardioid_point(4, 3)) < 1e-5);
  for (const Wake* w : {&w2, &w3, &w4}) {
    CHECK(w->boundary_angles.first.doubled(static_cast<unsigned>(w->p)) == w->boundary_angles.first);
    CHECK(w->boundary_angles.second.doubled(static_cast<unsigned>(w->p)) == w->boundary_angles.second);
    CHECK(w->landing_gap < 1e-5);
  }
}

TEST_CASE("Misiurewicz wakes") {
  const Wake d = misiurewicz_wake(2, 1, "", 1);
  CHECK(std::abs(d.landing_param - misiurewicz_d()) < 1e-9);
  CHECK(d.landing_gap < 1e-5);
  CHECK(d.truncation_level == doctest::Approx(4.0));
  for (const char* code : {"+", "-"}) {
    const Wake w = misiurewicz_wake(2, 1, code, 1);
    const Complex mu = w.landing_param;
    CHECK(std::abs(iterate(mu, 0.0, 4) - cofixed_point(mu).point) < 1e-12);
    CHECK(w.landing_gap < 1e-5);
    CHECK(w.truncation_level == doctest::Approx(std::cbrt(4.0)));
    CHECK(w.boundary_angles.first.doubled(2) == d.boundary_angles.first);
  }
  CHECK_THROWS_AS(misiurewicz_wake(2, 1, "", 2), Error);
  CHECK_THROWS_AS(misiurewicz_wake(2, 1, "x", 1), Error);
}

TEST_CASE("wake CSV export") {
  std::ostringstream out;
  write_wake_csv(out, wake_boundary(2, 1));
  CHECK(out.str().rfind("curve,index,re,im", 0) == 0);
}

TEST_CASE("winding numbers of simple maps") {
  const auto loop = unit_circle(256);
  CHECK(winding_of(loop, [](Complex z) { return z; }) == 1);
  CHECK(winding_of(loop, [](Complex z) { return z * z; }) == 2);
  CHECK(winding_of(loop, [](Complex) { return Complex(5.0); }) == 0);
  CHECK(winding_of(loop, [](Complex z) { return std::conj(z); }) == -1);
  const auto r = winding_number(loop, loop, std::vector<Complex>(loop.size(), 0.0));
  CHECK(r.min_separation == doctest::Approx(1.0));
  CHECK(r.samples == 257);
  CHECK(std::abs(r.increment - 1.0) < 0.01);
}

TEST_CASE("winding of the critical value on the parameter equipotential") {
  const auto loop = trace_equipotential(Plane::parameter(), std::log(4.0), 512);
  CHECK(winding_of(loop, [](Complex c) { return c; }) == 1);
  CHECK(winding_of(loop, [](Complex c) { return quad(c, c) - fixed_points(c).beta; }) == 2);
}

TEST_CASE("winding invariance") {
  auto f = [](Complex z) { return z * z * z - 0.2 * z; };
  const long base = winding_of(unit_circle(200), f);
  CHECK(base == 3);
  CHECK(winding_of(unit_circle(200, 0.37), f) == base);
  CHECK(winding_of(unit_circle(400), f) == base);
  CHECK(winding_of(unit_circle(1600), f) == base);
  // Non-uniform reparameterization of the same circle.
  std::vector<Complex> warped;
  for (int k = 0; k < 300; ++k) {
    const double t = k / 300.0;
    warped.push_back(std::polar(1.0, 2.0 * M_PI * (t + 0.1 * std::sin(2.0 * M_PI * t))));
  }
  warped.push_back(warped.front());
  CHECK(winding_of(warped, f) == base);
}

TEST_CASE("winding errors") {
  const auto loop = unit_circle(64);
  try {
    winding_number(loop, loop, loop);
    FAIL("expected SeparationFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SeparationFailure);
  }
  const auto coarse = unit_circle(6);
  try {
    winding_number(coarse, map(coarse, [](Complex z) { return z * z; }), std::vector<Complex>(7, 0.0));
    FAIL("expected UnderResolved");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnderResolved);
  }
  auto open = loop;
  open.pop_back();
  CHECK_THROWS_AS(winding_number(open, open, std::vector<Complex>(open.size(), 0.0)), Error);
}

TEST_CASE("level-0 tile real slice matches a real bisection") {
  REQUIRE(real_level0_key(kFibonacci));
  const double lo = bisect_edge(kFibonacci, -2.0);
  const double hi = bisect_edge(kFibonacci, -1.0);
  CHECK(hi == doctest::Approx(misiurewicz_d()).epsilon(1e-12));

  const ParamTile t = extract_param_tile(kFibonacci, 0, kWindow, kResolution, false);
  REQUIRE(t.mask.ny % 2 == 1);
  const int j = t.mask.ny / 2;
  REQUIRE(std::abs(t.mask.center(0, j).imag()) < 1e-12);
  const double cell = kWindow.width() / t.mask.nx;
  int first = -1, last = -1;
  for (int i = 0; i < t.mask.nx; ++i)
    if (t.mask.at(i, j)) {
      if (first < 0) first = i;
      last = i;
    }
  REQUIRE(first >= 0);
  for (int i = first; i <= last; ++i) CHECK(t.mask.at(i, j));
  CHECK(std::abs(t.mask.center(first, j).real() - 0.5 * cell - lo) < 2 * cell);
  CHECK(std::abs(t.mask.center(last, j).real() + 0.5 * cell - hi) < 2 * cell);
  CHECK(t.unknown_fraction < 0.05);
  CHECK(t.outer_contour.front() == t.outer_contour.back());

  SUBCASE("mirror symmetry") {
    std::size_t asym = 0;
    for (int y = 0; y < t.mask.ny; ++y)
      for (int i = 0; i < t.mask.nx; ++i) asym += t.mask.at(i, y) != t.mask.at(i, t.mask.ny - 1 - y);
    CHECK(asym <= static_cast<std::size_t>(2 * t.mask.nx));
  }

  SUBCASE("a center with the same itinerary gives the same tile") {
    const double c3 = solve_center(3, -1.75).real();
    REQUIRE(real_level0_key(c3));
    const ParamTile tc = extract_param_tile(c3, 0, kWindow, kResolution, false);
    CHECK(tc.mask.cells == t.mask.cells);
    CHECK(tc.key.return_times == t.key.return_times);
    REQUIRE(tc.key.witness.size() == t.key.witness.size());
    for (std::size_t k = 0; k < t.key.witness.size(); ++k) CHECK(tc.key.witness[k].same_piece(t.key.witness[k]));
  }

  SUBCASE("deeper tiles and central subtiles are nested") {
    const ParamTile t1 = extract_param_tile(kFibonacci, 1, kWindow, kResolution, false);
    CHECK(t1.mask.count() < t.mask.count());
    CHECK(outside_of(t1.mask, t.mask, &t.unknown) == 0);
    const TileExtraction both = extract_tile_and_subtile(kFibonacci, 0, kWindow, kResolution);
    CHECK(both.tile.mask.cells == t.mask.cells);
    REQUIRE(both.subtile);
    CHECK(both.subtile->mask.count() > 0);
    CHECK(outside_of(both.subtile->mask, t.mask) == 0);
  }
}

TEST_CASE("tile input errors") {
  try {
    extract_param_tile(kFibonacci, 0, kWindow, 0, false);
    FAIL("expected an input error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
  CHECK_THROWS_AS(extract_param_tile(kFibonacci, 0, kWindow, 5000, false), Error);
  try {
    extract_param_tile(kFibonacci, 0, Box{-1.9, -0.05, -1.8, 0.05}, 32, false);
    FAIL("expected WindowClipped");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowClipped);
  }
  try {
    tile_key(-2.0, 0);
    FAIL("expected EmptyTile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyTile);
  }
}

TEST_CASE("cell evaluation") {
  const TileKey key = tile_key(kFibonacci, 0);
  CHECK(key.return_times == std::vector<std::uint64_t>{3});
  CHECK(evaluate_cell(kFibonacci, key).tile == CellVerdict::Member);
  CHECK(evaluate_cell(-1.2, key).tile == CellVerdict::Outside);
  CHECK(evaluate_cell(Complex(-1.7, 1.0), key).tile == CellVerdict::Outside);
  const double c3 = solve_center(3, -1.75).real();
  CHECK(evaluate_cell(c3, key).central == CellVerdict::Member);
  CHECK(evaluate_cell(kFibonacci, key).central == CellVerdict::Outside);
}
