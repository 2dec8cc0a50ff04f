#include <doctest.h>

#include <cmath>
#include <sstream>

#include "parapuzzle/dynamics.hpp"
#include "parapuzzle/measurelab.hpp"

using namespace parapuzzle;

namespace {

std::string json_of(const MeasureReport& r) {
  std::ostringstream out;
  write_measure_json(out, r);
  return out.str();
}

MeasureConfig with_threads(int threads) {
  MeasureConfig cfg;
  cfg.threads = threads;
  return cfg;
}

// Tip of the period-3 window: f^6(0) lands on a period-3 orbit, so f^9(0) = f^6(0).
long double period3_tip() {
  long double c = -1.7903L;
  for (int it = 0; it < 50; ++it) {
    long double z = 0, dz = 0, z6 = 0, dz6 = 0;
    for (int k = 1; k <= 9; ++k) {
      dz = 2 * z * dz + 1;
      z = z * z + c;
      if (k == 6) z6 = z, dz6 = dz;
    }
    const long double step = (z - z6) / (dz - dz6);
    c -= step;
    if (std::abs(step) < 1e-18L) break;
  }
  return c;
}

}  // namespace

TEST_CASE("counter-based uniforms") {
  CHECK(uniform_at(42, 7) == uniform_at(42, 7));
  CHECK(uniform_at(42, 7) != uniform_at(43, 7));
  CHECK(uniform_at(42, 7) != uniform_at(42, 8));
  double sum = 0.0;
  for (std::uint64_t k = 0; k < 100000; ++k) {
    const double u = uniform_at(1, k);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("Wilson intervals") {
  const auto half = wilson_interval(5, 10);
  CHECK(half.estimate == doctest::Approx(0.5));
  CHECK(half.low == doctest::Approx(0.2366).epsilon(1e-3));
  CHECK(half.high == doctest::Approx(0.7634).epsilon(1e-3));
  const auto none = wilson_interval(0, 10);
  CHECK(none.low == 0.0);
  CHECK(none.high == doctest::Approx(0.2775).epsilon(1e-3));
  const auto all = wilson_interval(10, 10);
  CHECK(all.low == doctest::Approx(0.7225).epsilon(1e-3));
  CHECK(all.high == 1.0);
  const auto empty = wilson_interval(0, 0);
  CHECK(empty.estimate == 0.0);
  CHECK(empty.low == 0.0);
  CHECK(empty.high == 1.0);
}

TEST_CASE("density experiment") {
  const double d = misiurewicz_d();
  const MeasureReport r = density_experiment(-2.0, d, 600, 8, 42, with_threads(1));
  REQUIRE(r.samples.size() == 600);

  SUBCASE("reproducible across thread counts") {
    CHECK(json_of(density_experiment(-2.0, d, 600, 8, 42, with_threads(3))) == json_of(r));
    CHECK(json_of(density_experiment(-2.0, d, 600, 8, 43, with_threads(1))) != json_of(r));
  }

  SUBCASE("samples follow the counter-based draw") {
    for (const auto& s : r.samples) {
      CHECK(s.c >= -2.0);
      CHECK(s.c < d);
      CHECK(s.c == doctest::Approx(-2.0 + (d + 2.0) * uniform_at(42, s.index)).epsilon(1e-15));
    }
  }

  SUBCASE("densities recount from the sample records") {
    for (const auto& level : r.densities) {
      std::size_t in_play = 0, central = 0;
      for (const auto& s : r.samples) {
        if (s.discarded || s.levels_computed <= level.level) continue;
        ++in_play;
        for (int l : s.central_levels) central += l == level.level;
      }
      CHECK(level.in_play == in_play);
      CHECK(level.central == central);
      CHECK(level.density.low <= level.density.estimate);
      CHECK(level.density.estimate <= level.density.high);
    }
    MeasureReport copy = r;
    summarize(copy);
    CHECK(json_of(copy) == json_of(r));
    std::size_t discarded = 0, nr = 0;
    for (const auto& s : r.samples) {
      discarded += s.discarded;
      if (!s.discarded && (s.verdict == Verdict::NonRenormFiniteCascades || s.verdict == Verdict::NonRenormCascadeAt)) ++nr;
    }
    CHECK(r.discarded == discarded);
    CHECK(r.discard_fraction < 0.02);
    const NrEstimate e = nr_measure_estimate(r);
    CHECK(e.samples == 600 - discarded);
    CHECK(e.fraction.estimate == doctest::Approx(static_cast<double>(nr) / e.samples));
  }

  SUBCASE("decay fit and Borel-Cantelli") {
    REQUIRE(r.decay_fit);
    CHECK(r.decay_fit->q > 0.0);
    CHECK(r.decay_fit->q < 1.0);
    CHECK(r.decay_fit->levels.size() >= 3);
    const auto bc = borel_cantelli_check(r, 2);
    CHECK(bc.tails.front().tail_level == 2);
    CHECK(bc.tails.size() == 6);
    for (const auto& t : bc.tails) CHECK(t.with_central <= t.at_risk);
    try {
      borel_cantelli_check(r, 8);
      FAIL("expected InsufficientData");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsufficientData);
    }
  }

  SUBCASE("non-decaying fits fail the check") {
    MeasureReport bad = r;
    bad.decay_fit->q = 1.2;
    const auto bc = borel_cantelli_check(bad, 2);
    CHECK_FALSE(bc.pass);
    CHECK_FALSE(bc.diagnostic.empty());
  }
}

TEST_CASE("estimates agree across seeds") {
  std::vector<double> nr;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const auto r = density_experiment(-2.0, misiurewicz_d(), 400, 8, seed);
    nr.push_back(r.nr_fraction.estimate);
    CHECK(r.nr_fraction.low < 0.8649);
    CHECK(r.nr_fraction.high > 0.8649);
  }
  CHECK(*std::max_element(nr.begin(), nr.end()) - *std::min_element(nr.begin(), nr.end()) < 0.1);
}

TEST_CASE("degenerate inputs") {
  MeasureReport empty;
  const auto e = nr_measure_estimate(empty);
  CHECK(e.degenerate);
  CHECK(e.fraction.low == 0.0);
  CHECK(e.fraction.high == 1.0);

  const auto small = density_experiment(-2.0, misiurewicz_d(), 10, 8, 42);
  CHECK_FALSE(small.decay_fit);
  CHECK(small.fit_diagnostic.find("InsufficientData") == 0);
  CHECK_THROWS_AS(borel_cantelli_check(small, 2), Error);
  try {
    density_experiment(-0.5, -0.4, 100, 8, 42);
    FAIL("expected DomainError");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::DomainError);
  }
  CHECK_THROWS_AS(density_experiment(-1.6, -1.7, 100, 8, 42), Error);
}

TEST_CASE("period-3 renormalization window") {
  const auto [lo, hi] = renormalization_window(3, -1.75);
  const double center = solve_center(3, -1.75).real();
  CHECK(lo < center);
  CHECK(center < hi);
  CHECK(std::abs(lo - static_cast<double>(period3_tip())) < 1e-9);
  // The saddle-node at -7/4; long cascades of the intermittent orbit extend the verdict slightly past it.
  CHECK(hi >= -1.75);
  CHECK(hi - -1.75 < 1e-4);
  for (int k = 1; k < 10; ++k) CHECK(classify_parameter(lo + (hi - lo) * k / 10.0).verdict == Verdict::LikelyRenormalizable);
}
