#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <set>

#include "parapuzzle/dynamics.hpp"
#include "parapuzzle/measurelab.hpp"
#include "parapuzzle/puzzle.hpp"
#include "parapuzzle/realnest.hpp"

using namespace parapuzzle;

namespace {

constexpr double kFibonacci = -1.8705286321646448;

int count_kind(const InitialTiling& t, PieceKind kind, int generation = -1) {
  return static_cast<int>(std::count_if(t.catalog.begin(), t.catalog.end(), [&](const PieceRef& p) {
    return p.kind == kind && (generation < 0 || p.generation == generation);
  }));
}

// Cyclic position of each angle in the sorted cycle, advanced by doubling.
int rotation_step(const RayCycle& cycle) {
  std::set<int> steps;
  const int p = cycle.p;
  for (int k = 0; k < p; ++k) {
    const Angle img = cycle.angles[k].doubled();
    const int j = static_cast<int>(std::find(cycle.angles.begin(), cycle.angles.end(), img) - cycle.angles.begin());
    steps.insert(((j - k) % p + p) % p);
  }
  return steps.size() == 1 ? *steps.begin() : -1;
}

}  // namespace

TEST_CASE("alpha ray cycles") {
  auto a = alpha_ray_cycle(2, 1);
  CHECK(a.angles == std::vector<Angle>{Angle(1, 3), Angle(2, 3)});
  CHECK(alpha_ray_cycle(3, 1).angles == std::vector<Angle>{Angle(1, 7), Angle(2, 7), Angle(4, 7)});
  CHECK(alpha_ray_cycle(3, 2).angles == std::vector<Angle>{Angle(3, 7), Angle(5, 7), Angle(6, 7)});
  CHECK_THROWS_AS(alpha_ray_cycle(4, 2), Error);
  CHECK_THROWS_AS(alpha_ray_cycle(25, 1), Error);
}

TEST_CASE("cycles rotate by q and have exact period p") {
  for (int p = 2; p <= 9; ++p)
    for (int q = 1; q < p; ++q) {
      if (std::gcd(p, q) != 1) continue;
      const RayCycle c = alpha_ray_cycle(p, q);
      REQUIRE(c.angles.size() == static_cast<std::size_t>(p));
      CHECK(rotation_step(c) == q);
      for (const auto& t : c.angles) {
        CHECK(t.doubled(static_cast<unsigned>(p)) == t);
        for (int d = 1; d < p; ++d) CHECK_FALSE(t.doubled(static_cast<unsigned>(d)) == t);
      }
    }
}

TEST_CASE("initial tiling catalogs") {
  const InitialTiling t = build_initial_tiling(-1.3, 2, 1, 2);
  CHECK(count_kind(t, PieceKind::V0) == 1);
  CHECK(count_kind(t, PieceKind::Z, 1) == 1);
  CHECK(count_kind(t, PieceKind::Z, 2) == 2);
  CHECK(count_kind(t, PieceKind::Y) == 2);
  CHECK(count_kind(t, PieceKind::X) > 0);
  for (int depth = 1; depth <= 4; ++depth) {
    const InitialTiling d = build_initial_tiling(-1.3, 2, 1, depth);
    for (int n = 1; n <= depth; ++n) CHECK(count_kind(d, PieceKind::Z, n) == (1 << (n - 1)));
  }
  const InitialTiling t3 = build_initial_tiling(Complex(-0.2, 0.75), 3, 1, 1);
  CHECK(count_kind(t3, PieceKind::Z, 1) == 2);
  CHECK(t3.cycle.angles.size() == 3);
}

TEST_CASE("tiling errors") {
  try {
    build_initial_tiling(0.1, 2, 1, 1);
    FAIL("expected NotInWake");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInWake);
  }
  CHECK_THROWS_AS(build_initial_tiling(-1.3, 2, 1, 13), Error);
}

TEST_CASE("point location examples") {
  const InitialTiling t = build_initial_tiling(-1.3, 2, 1, 2);
  CHECK(locate_point(t, 0.0).kind == PieceKind::V0);
  CHECK(locate_point(t, 10.0).kind == PieceKind::Outside);
  CHECK(locate_point(t, t.alpha_prime).kind == PieceKind::Boundary);
  CHECK(locate_point(t, t.alpha).kind == PieceKind::Boundary);
  const InitialTiling t3 = build_initial_tiling(Complex(-0.2, 0.75), 3, 1, 1);
  CHECK(locate_point(t3, 0.0).kind == PieceKind::V0);
}

TEST_CASE("partition and Markov relocation") {
  for (auto [c, p, q] : {std::tuple{Complex(-1.3), 2, 1}, std::tuple{Complex(-0.2, 0.75), 3, 1}}) {
    const InitialTiling t = build_initial_tiling(c, p, q, 3);
    int located = 0, transitions = 0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
      const Complex z(-2.0 + 4.0 * uniform_at(11, 2 * k), -2.0 + 4.0 * uniform_at(11, 2 * k + 1));
      PieceRef a;
      try {
        a = locate_point(t, z);
      } catch (const Error&) {
        continue;
      }
      ++located;
      // Exactly one label: relocating the same point is stable.
      CHECK(locate_point(t, z).label() == a.label());
      if (a.kind == PieceKind::Z && a.generation >= 2) {
        const PieceRef b = locate_point(t, iterate(c, z, static_cast<std::size_t>(p)));
        ++transitions;
        CHECK(b.kind == PieceKind::Z);
        CHECK(b.index == a.index);
        CHECK(b.generation == a.generation - 1);
        CHECK(b.code == a.code.substr(1));
      }
      if (a.kind == PieceKind::X && a.generation > p) {
        const PieceRef b = locate_point(t, iterate(c, z, static_cast<std::size_t>(p)));
        CHECK(b.kind == PieceKind::X);
        CHECK(b.index == a.index);
        CHECK(b.generation == a.generation - p);
      }
    }
    CHECK(located > 900);
    CHECK(transitions > 0);
  }
}

TEST_CASE("complex principal nest examples") {
  const InitialTiling t0 = build_initial_tiling(-1.3, 2, 1, 1);
  const auto n0 = complex_principal_nest(0.0, t0, 5);
  REQUIRE(n0.size() == 1);
  CHECK(n0[0].central);
  CHECK(n0[0].cascade_len == 64);
  const InitialTiling f = build_initial_tiling(kFibonacci, 2, 1, 1);
  const auto nf = complex_principal_nest(kFibonacci, f, 6);
  std::vector<std::uint64_t> times;
  for (const auto& l : nf) {
    times.push_back(l.return_time);
    CHECK_FALSE(l.central);
  }
  CHECK(times == std::vector<std::uint64_t>{3, 5, 8, 13, 21, 34});
  const InitialTiling m = build_initial_tiling(-2.0, 2, 1, 1);
  try {
    complex_principal_nest(-2.0, m, 5);
    FAIL("expected MisiurewiczNoReturn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MisiurewiczNoReturn);
  }
}

TEST_CASE("complex nests agree with real nests") {
  int agree = 0, discarded = 0;
  for (std::uint64_t k = 0; k < 30; ++k) {
    const double c = -2.0 + 1.25 * uniform_at(5, k);
    const RealNest r = compute_real_nest(c);
    if (r.stop == NestStop::Graze || r.stop == NestStop::IterateCap || r.stop == NestStop::PrecisionExhausted) {
      ++discarded;
      continue;
    }
    InitialTiling t;
    try {
      t = build_initial_tiling(c, 2, 1, 1);
    } catch (const Error& e) {
      // Right of d the alpha rays still land, outside the 1/2 wake they do not.
      CHECK(c > -0.75 - 1e-12);
      continue;
    }
    ComplexNestConfig cc;
    cc.max_level = r.stop == NestStop::LongCascade ? 8 : static_cast<int>(r.levels.size());
    const ComplexNest n = compute_complex_nest(t, cc);
    if (n.stop == ComplexNestStop::Undecidable) {
      ++discarded;
      continue;
    }
    REQUIRE(n.levels.size() == r.levels.size());
    for (std::size_t l = 0; l < r.levels.size(); ++l) {
      CHECK(n.levels[l].return_time == r.levels[l].return_time);
      CHECK(n.levels[l].central == r.levels[l].central);
      CHECK(n.levels[l].cascade_len == r.levels[l].cascade_len);
    }
    ++agree;
  }
  CHECK(discarded <= 1);
  CHECK(agree >= 28);
}

TEST_CASE("nest return times increase") {
  for (double c : {-1.9, -1.65, -1.8, kFibonacci, -1.99}) {
    const InitialTiling t = build_initial_tiling(c, 2, 1, 1);
    const ComplexNest n = compute_complex_nest(t);
    for (std::size_t l = 1; l < n.levels.size(); ++l) CHECK(n.levels[l].return_time > n.levels[l - 1].return_time);
  }
}

TEST_CASE("truncation readings") {
  CHECK(truncation_level(2, 2, TruncationReading::Root) == doctest::Approx(std::pow(4.0, 1.0 / 3.0)));
  CHECK(truncation_level(2, 2, TruncationReading::Literal) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("z piece arcs") {
  const AngleArc a = z_piece_arc(2, 1, "", 1);
  CHECK(a.from == Angle(5, 6));
  CHECK(a.to == Angle(1, 6));
  const AngleArc deeper = z_piece_arc(2, 1, "+", 1);
  CHECK(deeper.length() == doctest::Approx(1.0 / 12.0));
  CHECK(deeper.from.doubled(2) == a.from);
  CHECK_THROWS_AS(z_piece_arc(2, 1, "x", 1), Error);
  CHECK_THROWS_AS(z_piece_arc(2, 1, "", 2), Error);
}
