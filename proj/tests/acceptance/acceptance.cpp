#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "parapuzzle/dynamics.hpp"
#include "parapuzzle/measurelab.hpp"
#include "parapuzzle/modulus.hpp"
#include "parapuzzle/paraplane.hpp"
#include "parapuzzle/potential.hpp"
#include "parapuzzle/puzzle.hpp"
#include "parapuzzle/realnest.hpp"

using namespace parapuzzle;

namespace {

constexpr double kFibonacci = -1.8705286321646448;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string measure_json(const MeasureReport& r) {
  std::ostringstream out;
  write_measure_json(out, r);
  return out.str();
}

Polyline circle(double r, int n = 720) {
  Polyline p;
  for (int k = 0; k < n; ++k) p.push_back(std::polar(r, 2.0 * M_PI * k / n));
  return p;
}

Outcome modulus_anchor() {
  Outcome o{true, ""};
  for (auto [res, tol] : {std::pair{512, 0.02}, std::pair{1024, 0.01}}) {
    Stopwatch t;
    const double mod = annulus_modulus({circle(2.0), circle(1.0), res}).mod;
    const double secs = t.seconds();
    const double rel = std::abs(mod - std::log(2.0)) / std::log(2.0);
    o.pass = o.pass && rel < tol && secs < 10.0;
    o.detail += "res " + std::to_string(res) + ": mod=" + fixed(mod, 8) + " relerr=" + fixed(rel, 3) + " (tol " +
                fixed(tol * 100, 2) + "%) time=" + fixed(secs, 3) + "s (tol 10s)" + (res == 512 ? "; " : "");
  }
  return o;
}

Outcome winding_suite() {
  const int n = 1024;
  std::vector<Complex> circle_loop;
  for (int k = 0; k < n; ++k) circle_loop.push_back(std::polar(1.0, 2.0 * M_PI * k / n));
  circle_loop.push_back(circle_loop.front());
  const auto equip = trace_equipotential(Plane::parameter(), std::log(4.0), n);
  auto w = [](const std::vector<Complex>& loop, auto f) {
    std::vector<Complex> phi;
    for (auto z : loop) phi.push_back(f(z));
    const auto r = winding_number(loop, phi, std::vector<Complex>(loop.size(), 0.0));
    return std::pair{r.w, std::abs(r.increment - static_cast<double>(r.w))};
  };
  const std::vector<std::pair<long, double>> got{w(circle_loop, [](Complex) { return Complex(5.0); }),
                                                 w(circle_loop, [](Complex z) { return z; }),
                                                 w(circle_loop, [](Complex z) { return z * z; }),
                                                 w(equip, [](Complex c) { return c; })};
  const std::vector<long> want{0, 1, 2, 1};
  Outcome o{true, "samples=" + std::to_string(n) + " w="};
  for (std::size_t k = 0; k < got.size(); ++k) {
    o.pass = o.pass && got[k].first == want[k] && got[k].second < 0.01;
    o.detail += std::to_string(got[k].first) + (k + 1 < got.size() ? "," : "");
  }
  o.detail += " (expect 0,1,2,1; increments within 0.01 of integers)";
  return o;
}

Outcome ray_landing() {
  Stopwatch t1;
  const auto p = trace_ray(Plane::parameter(), Angle(1, 2), std::log(4.0), 1e-300);
  const double s1 = t1.seconds();
  Stopwatch t2;
  const auto d = trace_ray(Plane::dynamical(0.0), Angle(0, 1), std::log(4.0), 1e-300);
  const double s2 = t2.seconds();
  const double e1 = p.landed ? std::abs(*p.landing_point + 2.0) : INFINITY;
  const double e2 = d.landed ? std::abs(*d.landing_point - 1.0) : INFINITY;
  return {e1 < 1e-6 && e2 < 1e-9 && s1 < 1.0 && s2 < 1.0,
          "parameter 1/2: |land+2|=" + fixed(e1, 3) + " (tol 1e-6) time=" + fixed(s1, 3) + "s; dynamical c=0 angle 0: |land-1|=" +
              fixed(e2, 3) + " (tol 1e-9) time=" + fixed(s2, 3) + "s (tol 1s each)"};
}

Outcome misiurewicz_d_fixture() {
  const Complex d = solve_misiurewicz(2, 1, 1, -1.5);
  const double residual = std::abs(iterate(d, 0.0, 3) - fixed_points(d).alpha);
  const double gap = std::abs(d - Complex(-1.5436890127));
  return {residual < 1e-12 && gap < 1e-10,
          "d=" + fmt(d.real()) + " |f^3(0)-alpha|=" + fixed(residual, 3) + " (tol 1e-12) |d+1.5436890127|=" + fixed(gap, 3) +
              " (tol 1e-10)"};
}

Outcome nest_equivalence() {
  int agree = 0, disagree = 0, discarded = 0;
  std::string first_mismatch;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const double c = -2.0 + 1.25 * uniform_at(42, k);
    const RealNest r = compute_real_nest(c);
    if (r.stop == NestStop::Graze || r.stop == NestStop::IterateCap || r.stop == NestStop::PrecisionExhausted) {
      ++discarded;
      continue;
    }
    const InitialTiling t = build_initial_tiling(c, 2, 1, 1);
    ComplexNestConfig cc;
    cc.max_level = r.stop == NestStop::LongCascade ? 8 : static_cast<int>(r.levels.size());
    const ComplexNest n = compute_complex_nest(t, cc);
    if (n.stop == ComplexNestStop::Undecidable) {
      ++discarded;
      continue;
    }
    bool same = n.levels.size() == r.levels.size();
    for (std::size_t l = 0; same && l < r.levels.size(); ++l)
      same = n.levels[l].return_time == r.levels[l].return_time && n.levels[l].central == r.levels[l].central &&
             n.levels[l].cascade_len == r.levels[l].cascade_len;
    if (same) ++agree;
    else {
      ++disagree;
      if (first_mismatch.empty()) first_mismatch = " first mismatch c=" + fmt(c);
    }
  }
  return {disagree == 0 && discarded < 2,
          "agree=" + std::to_string(agree) + " disagree=" + std::to_string(disagree) + " discarded=" + std::to_string(discarded) +
              "/100 (tol < 2%)" + first_mismatch};
}

Outcome scaling_decay() {
  Stopwatch t;
  RealNestConfig cfg;
  cfg.model = OrbitModel::Exact;
  cfg.precision = Precision::Quad;
  cfg.resolution_floor = 1e-12;
  cfg.max_level = 12;
  const ScalingReport s = scaling_factors(kFibonacci, 10, cfg);
  const double secs = t.seconds();
  bool decreasing = s.lambdas.size() >= 8;
  for (std::size_t l = 3; l < s.lambdas.size(); ++l) decreasing = decreasing && s.lambdas[l] < s.lambdas[l - 1];
  return {decreasing && s.fit_rho < 0.9 && secs < 5.0,
          "levels=" + std::to_string(s.lambdas.size()) + " (need >= 8) strictly decreasing from l=2: " + (decreasing ? "yes" : "no") +
              " q=" + fixed(s.fit_rho, 4) + " (tol < 0.9) R2=" + fixed(s.fit_r2, 4) + " time=" + fixed(secs, 3) + "s (tol 5s)"};
}

// The first seed-42 sample of [-2, d) with a non-renormalizable verdict and at
// least five resolved real levels, so that tiles of levels 1 to 4 are defined.
std::pair<std::uint64_t, double> seeded_lambda() {
  const double d = misiurewicz_d();
  for (std::uint64_t k = 0;; ++k) {
    const double c = -2.0 + (d + 2.0) * uniform_at(42, k);
    const RealNest n = compute_real_nest(c);
    if (classify_nest(n, {}).non_renormalizable() && n.levels.size() >= 5) return {k, c};
  }
}

Outcome moduli_trend(int tile_resolution, int modulus_resolution) {
  Stopwatch t;
  const auto [index, lambda] = seeded_lambda();
  const NestModuliResult r = nest_moduli(lambda, 3, {}, tile_resolution, modulus_resolution, 1);
  const double secs = t.seconds();
  Outcome o{true, "lambda=" + fmt(lambda) + " (sample " + std::to_string(index) + ") tile res " + std::to_string(tile_resolution) +
                      ": "};
  std::optional<double> prev, prev_err;
  for (const auto& e : r.entries) {
    o.detail += "l=" + std::to_string(e.level) + " ";
    if (!e.annulus) {
      o.pass = false;
      o.detail += "unavailable (" + e.diagnostic + "); ";
      continue;
    }
    const double err = e.annulus->richardson_error + e.contour_error;
    o.detail += "mod=" + fixed(e.annulus->mod, 6) + " err=" + fixed(err, 3) + "; ";
    if (prev && e.annulus->mod + err + *prev_err < *prev) o.pass = false;
    prev = e.annulus->mod;
    prev_err = err;
  }
  std::size_t outside = 0, checked = 0;
  for (const auto& tile : r.tiles) {
    if (!tile || !tile->subtile) continue;
    ++checked;
    const auto& a = tile->subtile->mask.cells;
    const auto& b = tile->tile.mask.cells;
    for (std::size_t k = 0; k < a.size(); ++k) outside += a[k] && !b[k];
  }
  o.pass = o.pass && outside == 0 && secs <= 1800.0;
  o.detail += "Pi in Delta: " + std::to_string(outside) + " cells outside over " + std::to_string(checked) + " tiles; time=" +
              fixed(secs, 4) + "s (tol 1800s)";
  return o;
}

struct MeasureRun {
  MeasureReport report;
  double seconds = 0.0;
};

MeasureRun measure_run(int threads) {
  MeasureConfig cfg;
  cfg.threads = threads;
  Stopwatch t;
  MeasureRun run{density_experiment(-2.0, misiurewicz_d(), 10000, 8, 42, cfg), 0.0};
  run.seconds = t.seconds();
  return run;
}

Outcome density_decay(const MeasureRun& run) {
  const MeasureReport& r = run.report;
  bool weakly = true;
  std::string dens;
  for (const auto& d : r.densities) {
    dens += fixed(d.density.estimate, 3) + (d.level + 1 < static_cast<int>(r.densities.size()) ? "," : "");
    if (d.level > 2 && d.density.estimate > r.densities[d.level - 1].density.estimate) weakly = false;
  }
  if (!r.decay_fit) return {false, "no fit: " + r.fit_diagnostic};
  const auto bc = borel_cantelli_check(r, 2);
  const bool ok = weakly && r.decay_fit->q < 1.0 && r.decay_fit->r2 > 0.8 && bc.monotone && run.seconds <= 600.0;
  return {ok, "dens=[" + dens + "] weakly decreasing from l=2: " + (weakly ? "yes" : "no") + " q=" + fixed(r.decay_fit->q, 4) +
                  " (tol < 1) R2=" + fixed(r.decay_fit->r2, 4) + " (tol > 0.8) tails monotone: " + (bc.monotone ? "yes" : "no") +
                  " time=" + fixed(run.seconds, 4) + "s (tol 600s)"};
}

MeasureReport window_experiment(int threads) {
  const auto [lo, hi] = renormalization_window(3, -1.75);
  const double pad = 0.1 * (hi - lo);
  MeasureConfig cfg;
  cfg.threads = threads;
  return density_experiment(lo + pad, hi - pad, 1000, 8, 42, cfg);
}

Outcome nr_positive(const MeasureRun& run, const MeasureReport& window) {
  const NrEstimate all = nr_measure_estimate(run.report);
  const NrEstimate in = nr_measure_estimate(window);
  return {all.fraction.low > 0.0 && !in.degenerate && in.fraction.estimate < 0.05,
          "[-2,d): nr=" + fixed(all.fraction.estimate, 4) + " CI=[" + fixed(all.fraction.low, 4) + "," + fixed(all.fraction.high, 4) +
              "] (tol low > 0); period-3 window interior [" + fmt(window.lo) + "," + fmt(window.hi) + "]: nr=" +
              fixed(in.fraction.estimate, 4) + " (tol < 0.05)"};
}

Outcome determinism(const MeasureRun& base, const MeasureReport& window) {
  const bool threads = measure_json(measure_run(3).report) == measure_json(base.report);
  const bool rerun = measure_json(measure_run(1).report) == measure_json(base.report);
  const bool window_threads = measure_json(window_experiment(2)) == measure_json(window);
  return {threads && rerun && window_threads, std::string("n=1e4 report rerun identical: ") + (rerun ? "yes" : "no") +
                                                  "; 1 vs 3 threads identical: " + (threads ? "yes" : "no") +
                                                  "; window experiment 1 vs 2 threads identical: " + (window_threads ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> known;
  std::vector<int> only;
  int tile_resolution = 1024;
  int modulus_resolution = 512;
  std::string results_path;
  app.add_option("--known-failure", known, "Criteria whose failure is documented and does not fail the run");
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--tile-resolution", tile_resolution, "Tile grid of the moduli criterion")->capture_default_str();
  app.add_option("--modulus-resolution", modulus_resolution, "Annulus grid of the moduli criterion")->capture_default_str();
  app.add_option("--results", results_path, "Also write the criterion lines to this file");
  CLI11_PARSE(app, argc, argv);
  std::ofstream results;
  if (!results_path.empty()) results.open(results_path);
  std::setvbuf(stdout, nullptr, _IONBF, 0);

  const std::set<int> selected(only.begin(), only.end());
  auto want = [&](int k) { return selected.empty() || selected.count(k); };
  std::optional<MeasureRun> measure;
  std::optional<MeasureReport> window;
  auto needs_measure = [&] {
    if (!measure) measure = measure_run(1);
    if (!window) window = window_experiment(1);
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"modulus anchor", modulus_anchor},
      {"winding suite", winding_suite},
      {"ray landing", ray_landing},
      {"Misiurewicz d", misiurewicz_d_fixture},
      {"real/complex nest equivalence", nest_equivalence},
      {"scaling-factor decay", scaling_decay},
      {"parapuzzle moduli trend", [&] { return moduli_trend(tile_resolution, modulus_resolution); }},
      {"density decay", [&] { return needs_measure(), density_decay(*measure); }},
      {"positive NR measure", [&] { return needs_measure(), nr_positive(*measure, *window); }},
      {"determinism", [&] { return needs_measure(), determinism(*measure, *window); }},
  };

  const std::set<int> known_set(known.begin(), known.end());
  int unexpected = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!want(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const bool documented = !o.pass && known_set.count(id);
    char head[32];
    std::snprintf(head, sizeof head, "C%-2d %s  ", id, o.pass ? "PASS" : "FAIL");
    const std::string line = head + criteria[k].first + ": " + o.detail + (documented ? " [known failure]" : "");
    std::printf("%s\n", line.c_str());
    if (results) results << line << std::endl;
    if (!o.pass && !documented) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
