#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "parapuzzle/dynamics.hpp"
#include "parapuzzle/measurelab.hpp"
#include "parapuzzle/modulus.hpp"
#include "parapuzzle/paraplane.hpp"
#include "parapuzzle/potential.hpp"
#include "parapuzzle/puzzle.hpp"
#include "parapuzzle/realnest.hpp"
#include "parapuzzle/report.hpp"

namespace fs = std::filesystem;
using namespace parapuzzle;
using parapuzzle::cli::RunConfig;
using parapuzzle::cli::UsageError;

namespace {

constexpr double kFibonacci = -1.8705286321646448;

Complex parse_complex(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError("not a complex number: '" + text + "'");
    return x;
  };
  const auto comma = text.find(',');
  if (comma != std::string::npos) return {number(text.substr(0, comma)), number(text.substr(comma + 1))};
  if (!text.empty() && text.back() == 'i') {
    // The sign splitting real and imaginary parts is the last one not in an exponent.
    for (std::size_t k = text.size() - 1; k-- > 1;) {
      if ((text[k] == '+' || text[k] == '-') && text[k - 1] != 'e' && text[k - 1] != 'E') {
        const std::string im = text.substr(k, text.size() - 1 - k);
        return {number(text.substr(0, k)), number(im == "+" ? "1" : im == "-" ? "-1" : im)};
      }
    }
    const std::string im = text.substr(0, text.size() - 1);
    return {0.0, number(im.empty() ? "1" : im)};
  }
  return {number(text), 0.0};
}

Box parse_box(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("window must be x0,y0,x1,y1");
    }
  }
  if (v.size() != 4 || !(v[0] < v[2]) || !(v[1] < v[3])) throw UsageError("window must be x0,y0,x1,y1 with x0<x1, y0<y1");
  return {v[0], v[1], v[2], v[3]};
}

std::string complex_text(Complex z) { return fmt(z.real()) + " " + fmt(z.imag()); }

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) const {
    fs::create_directories(dir_);
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path.string());
    body(out);
    if (!out) throw UsageError("failed writing " + path.string());
    std::cout << "wrote: " << path.string() << '\n';
  }

  void json(const std::string& name, const Json& j) const {
    write(name, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  }

 private:
  fs::path dir_;
};

Json angles_json(const std::vector<Angle>& angles) {
  Json a = Json::array();
  for (const auto& t : angles) a.push_back(t.to_string());
  return a;
}

OrbitModel parse_model(const std::string& s) {
  if (s == "computed") return OrbitModel::Computed;
  if (s == "exact") return OrbitModel::Exact;
  throw UsageError("model must be computed or exact");
}

Precision parse_precision(const std::string& s) {
  if (s == "double") return Precision::Double;
  if (s == "quad") return Precision::Quad;
  if (s == "auto") return Precision::Auto;
  throw UsageError("precision must be double, quad or auto");
}

Json classification_json(double c, const NestClassification& cls) {
  Json j;
  j["c"] = json_number(c);
  j["verdict"] = to_string(cls.verdict);
  j["levels_computed"] = cls.levels_computed;
  j["cascade_levels"] = cls.cascade_levels;
  j["cascade_lengths"] = cls.cascade_lengths;
  j["return_times"] = cls.return_times;
  j["boundary_graze"] = cls.boundary_graze;
  j["censored"] = cls.censored;
  j["outside_wake"] = cls.outside_wake;
  return j;
}

Json scaling_json(double c, const ScalingReport& s) {
  Json j;
  j["c"] = json_number(c);
  Json l = Json::array();
  for (double x : s.lambdas) l.push_back(json_number(x));
  j["lambdas"] = l;
  j["sqrt_sum"] = json_number(s.sqrt_sum);
  j["fit"] = Json{{"C", json_number(s.fit_c)}, {"rho", json_number(s.fit_rho)}, {"r2", json_number(s.fit_r2)}};
  j["acim_criterion"] = s.acim_criterion;
  return j;
}

Json borel_cantelli_json(const BorelCantelliResult& b) {
  Json j;
  Json tails = Json::array();
  for (const auto& t : b.tails)
    tails.push_back(Json{{"tail_level", t.tail_level},
                         {"at_risk", t.at_risk},
                         {"with_central", t.with_central},
                         {"fraction", json_number(t.fraction)}});
  j["tails"] = tails;
  j["monotone"] = b.monotone;
  j["density_sum"] = json_number(b.density_sum);
  j["geometric_bound"] = json_number(b.geometric_bound);
  j["verdict"] = b.pass ? "PASS" : "FAIL";
  j["diagnostic"] = b.diagnostic;
  return j;
}

double resolve_endpoint(const std::string& text) {
  if (text == "auto-d") return misiurewicz_d();
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used == text.size()) return x;
  } catch (const std::exception&) {
  }
  throw UsageError("interval endpoint must be a number or auto-d: '" + text + "'");
}

// Options of every subcommand, filled by CLI11.
struct Options {
  std::string plane = "param";
  std::string c = "0";
  std::string z = "0";
  std::string angle;
  double g_start = std::log(4.0);
  double g_end = 1e-300;
  bool land = false;
  bool extrapolate = false;
  int p = 2;
  int q = 1;
  int depth = 1;
  int max_level = 8;
  bool complex_nest = false;
  std::string model = "computed";
  std::string precision = "double";
  std::optional<double> floor;
  int levels = 8;
  std::string kind = "parabolic";
  std::string code;
  int index = 1;
  std::string loop = "circle";
  std::string phi = "identity";
  double radius = 1.0;
  std::string center = "0";
  double constant = 5.0;
  int samples = 1024;
  std::string base;
  int level = 0;
  std::string window;
  std::optional<int> resolution;
  bool central_only = false;
  std::string lambda = "-1.8705286321646448";
  int first = 1;
  std::optional<int> modulus_resolution;
  std::string lo = "-2";
  std::string hi = "auto-d";
  std::size_t n = 10000;
  int tail_level = 2;
  bool samples_csv = false;
};

int run_ray(const Options& o, const RunConfig& cfg, const Artifacts& out) {
  const Angle angle = Angle::parse(o.angle);
  Plane plane;
  if (o.plane == "param") plane = Plane::parameter();
  else if (o.plane == "dynamical") plane = Plane::dynamical(parse_complex(o.c));
  else throw UsageError("plane must be param or dynamical");
  const RayTrace trace = trace_ray(plane, angle, o.g_start, o.g_end, cfg.rays());
  out.write("ray.csv", [&](std::ostream& s) {
    s << "index,potential,re,im\n";
    for (std::size_t k = 0; k < trace.points.size(); ++k)
      s << k << ',' << fmt(trace.potentials[k]) << ',' << fmt(trace.points[k].real()) << ',' << fmt(trace.points[k].imag())
        << '\n';
  });
  std::cout << "points: " << trace.points.size() << '\n';
  if (!trace.diagnostic.empty()) std::cout << "diagnostic: " << trace.diagnostic << '\n';
  if (trace.failure) fail(*trace.failure, trace.diagnostic);
  if (o.extrapolate) {
    if (!plane.is_parameter()) throw UsageError("--extrapolate applies to parameter rays");
    const RayLanding landing = parameter_ray_landing(trace);
    std::cout << "landing: " << complex_text(landing.point) << "\nspread: " << fmt(landing.spread) << '\n';
  } else if (o.land) {
    if (!trace.landed) fail(ErrorCode::RayLandingFailure, "ray did not land: " + trace.diagnostic);
    std::cout << "landing: " << complex_text(*trace.landing_point) << '\n';
  }
  return 0;
}

int run_green(const Options& o, const Artifacts& out) {
  const Complex c = parse_complex(o.c);
  PotentialValue v;
  Json j;
  if (o.plane == "param") {
    v = green_parameter(c);
  } else if (o.plane == "dynamical") {
    v = green_dynamical(c, parse_complex(o.z));
    j["z"] = json_complex(parse_complex(o.z));
  } else {
    throw UsageError("plane must be param or dynamical");
  }
  j["plane"] = o.plane;
  j["c"] = json_complex(c);
  j["g"] = json_number(v.g);
  j["level"] = json_number(v.level);
  j["escaped"] = v.escaped;
  out.json("green.json", j);
  std::cout << "g: " << fmt(v.g) << "\nlevel: " << fmt(v.level) << "\nescaped: " << (v.escaped ? "true" : "false") << '\n';
  return 0;
}

int run_cycle(const Options& o, const Artifacts& out) {
  const RayCycle cycle = alpha_ray_cycle(o.p, o.q);
  const SectorCombinatorics sectors = sector_combinatorics(o.p, o.q);
  Json j;
  j["p"] = o.p;
  j["q"] = o.q;
  j["angles"] = angles_json(cycle.angles);
  Json arcs = Json::array();
  for (const auto& a : sectors.arcs) arcs.push_back(Json::array({a.from.to_string(), a.to.to_string()}));
  j["sectors"] = arcs;
  j["characteristic_sector"] = sectors.characteristic;
  out.json("cycle.json", j);
  std::cout << "angles:";
  for (const auto& a : cycle.angles) std::cout << ' ' << a.to_string();
  std::cout << '\n';
  return 0;
}

int run_tiling(const Options& o, const RunConfig& cfg, const Artifacts& out) {
  const InitialTiling t = build_initial_tiling(parse_complex(o.c), o.p, o.q, o.depth, cfg.puzzle());
  Json j = tiling_json(t);
  Json itinerary = Json::array();
  for (const auto& s : t.critical_itinerary()) itinerary.push_back(s.to_string());
  j["critical_itinerary"] = itinerary;
  out.json("tiling.json", j);
  std::cout << "pieces: " << t.catalog.size() << "\nalpha: " << complex_text(t.alpha) << '\n';
  return 0;
}

RealNestConfig nest_config(const Options& o, const RunConfig& cfg, int max_level) {
  RealNestConfig n = cfg.nest(max_level);
  n.model = parse_model(o.model);
  n.precision = parse_precision(o.precision);
  if (o.floor) n.resolution_floor = *o.floor;
  return n;
}

int run_nest(const Options& o, const RunConfig& cfg, const Artifacts& out) {
  const Complex c = parse_complex(o.c);
  if (o.complex_nest) {
    const InitialTiling t = build_initial_tiling(c, 2, 1, 1, cfg.puzzle());
    ComplexNestConfig nc;
    nc.max_level = o.max_level;
    nc.max_cascade = cfg.max_cascade;
    nc.iterate_cap = cfg.iterate_cap;
    const ComplexNest nest = compute_complex_nest(t, nc);
    out.json("nest.json", complex_nest_json(nest));
    std::cout << "stop: " << to_string(nest.stop) << "\nreturn_times:";
    for (const auto& l : nest.levels) std::cout << ' ' << l.return_time;
    std::cout << '\n';
    return 0;
  }
  if (c.imag() != 0.0) throw UsageError("real nests need a real parameter; use --complex");
  const RealNest nest = compute_real_nest(c.real(), nest_config(o, cfg, o.max_level));
  out.write("nest.csv", [&](std::ostream& s) { write_nest_csv(s, nest); });
  std::cout << "stop: " << to_string(nest.stop) << "\nreturn_times:";
  for (const auto& l : nest.levels) std::cout << ' ' << l.return_time;
  std::cout << '\n';
  return 0;
}

int run_classify(const Options& o, const RunConfig& cfg, const Artifacts& out) {
  const double c = parse_complex(o.c).real();
  const NestClassification cls = classify_parameter(c, nest_config(o, cfg, o.max_level));
  out.json("classify.json", classification_json(c, cls));
  std::cout << "verdict: " << to_string(cls.verdict) << "\nlevels_computed: " << cls.levels_computed << '\n';
  return 0;
}

int run_scaling(const Options& o, const RunConfig& cfg, const Artifacts& out) {
  const double c = parse_complex(o.c).real();
  const ScalingReport s = scaling_factors(c, o.levels, nest_config(o, cfg, o.levels));
  out.json("scaling.json", scaling_json(c, s));
  std::vector<double> x;
  for (std::size_t k = 0; k < s.lambdas.size(); ++k) x.push_back(static_cast<double>(k));
  out.write("scaling.svg", [&](std::ostream& f) { write_line_chart_svg(f, "scaling factors", x, s.lambdas, true); });
  std::cout << "lambdas:";
  for (double l : s.lambdas) std::cout << ' ' << fmt(l);
  std::cout << "\nrho: " << fmt(s.fit_rho) << "\nr2: " << fmt(s.fit_r2) << '\n';
  return 0;
}

int run_wake(const Options& o, const RunConfig& cfg, const Artifacts& out) {
  Wake w;
  if (o.kind == "parabolic") w = wake_boundary(o.p, o.q, cfg.rays());
  else if (o.kind == "misiurewicz") w = misiurewicz_wake(o.p, o.q, o.code, o.index, cfg.truncation, cfg.rays());
  else throw UsageError("kind must be parabolic or misiurewicz");
  out.write("wake.csv", [&](std::ostream& s) { write_wake_csv(s, w); });
  std::cout << "angles: " << w.boundary_angles.first.to_string() << ' ' << w.boundary_angles.second.to_string()
            << "\nlanding: " << complex_text(w.landing_param) << "\ntruncation_level: " << fmt(w.truncation_level)
            << "\nlanding_gap: " << fmt(w.landing_gap) << '\n';
  return 0;
}

int run_winding(const Options& o, const RunConfig& cfg, const Artifacts& out) {
  if (o.samples < 3) throw UsageError("a loop needs at least 3 samples");
  std::vector<Complex> loop;
  if (o.loop == "circle") {
    const Complex z0 = parse_complex(o.center);
    for (int k = 0; k <= o.samples; ++k) loop.push_back(z0 + std::polar(o.radius, 2.0 * M_PI * (k % o.samples) / o.samples));
  } else if (o.loop == "equipotential") {
    loop = trace_equipotential(Plane::parameter(), std::log(4.0), o.samples, cfg.rays());
  } else {
    throw UsageError("loop must be circle or equipotential");
  }
  std::vector<Complex> phi, psi(loop.size(), 0.0);
  for (const auto& z : loop) {
    if (o.phi == "identity" || o.phi == "critical-value") phi.push_back(z);  // f_lambda(0) = lambda
    else if (o.phi == "square") phi.push_back(z * z);
    else if (o.phi == "constant") phi.push_back(o.constant);
    else throw UsageError("phi must be identity, square, constant or critical-value");
  }
  const WindingResult r = winding_number(loop, phi, psi);
  Json j;
  j["loop"] = o.loop;
  j["phi"] = o.phi;
  j["w"] = r.w;
  j["increment"] = json_number(r.increment);
  j["min_separation"] = json_number(r.min_separation);
  j["samples"] = r.samples;
  out.json("winding.json", j);
  std::cout << "w: " << r.w << "\nmin_separation: " << fmt(r.min_separation) << '\n';
  return 0;
}

int run_tile(const Options& o, const RunConfig& cfg, const Artifacts& out) {
  if (o.base.empty()) throw UsageError("--base is required");
  const Complex base = parse_complex(o.base);
  const ParamTileConfig tc = cfg.tiles();
  Box window;
  if (!o.window.empty()) window = parse_box(o.window);
  else if (base.imag() == 0.0) window = real_slice_window(base.real(), tile_key(base, o.level, tc), {}, tc);
  else throw UsageError("complex bases need --window");
  const int res = o.resolution.value_or(cfg.tile_resolution);
  // A defaulted window grows until the tile fits; an explicit one is taken as given.
  const WindowPolicy policy;
  std::optional<ParamTile> found;
  for (int attempt = 0; !found; ++attempt) {
    try {
      found = extract_param_tile(base, o.level, window, res, o.central_only, tc);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WindowClipped || !o.window.empty() || attempt >= policy.max_enlargements) throw;
      const Complex c = window.center();
      const double hw = 0.5 * policy.growth * window.width(), hh = 0.5 * policy.growth * window.height();
      window = {c.real() - hw, c.imag() - hh, c.real() + hw, c.imag() + hh};
    }
  }
  const ParamTile& tile = *found;
  out.write("tile.json", [&](std::ostream& s) { write_tile_json(s, tile); });
  out.write("tile.svg", [&](std::ostream& s) { write_tile_svg(s, {&tile}); });
  std::cout << "key: " << tile.key.to_string() << "\ncells: " << std::count(tile.mask.cells.begin(), tile.mask.cells.end(), 1)
            << "\nunknown_fraction: " << fmt(tile.unknown_fraction) << '\n';
  return 0;
}

int run_moduli(const Options& o, const RunConfig& cfg, const Artifacts& out) {
  const NestModuliResult r =
      nest_moduli(parse_complex(o.lambda), o.levels, {}, o.resolution.value_or(cfg.tile_resolution),
                  o.modulus_resolution.value_or(cfg.modulus_resolution), o.first, cfg.tiles());
  out.write("moduli.csv", [&](std::ostream& s) { write_moduli_csv(s, r); });
  bool any_tile = false;
  for (const auto& t : r.tiles) any_tile = any_tile || t.has_value();
  if (any_tile) out.write("moduli.svg", [&](std::ostream& s) { write_moduli_svg(s, r); });
  for (const auto& e : r.entries) {
    std::cout << "l=" << e.level << ": ";
    if (e.annulus) std::cout << "mod " << fmt(e.annulus->mod) << " richardson " << fmt(e.annulus->richardson_error);
    if (e.error) std::cout << "error " << to_string(*e.error) << ": " << e.diagnostic;
    std::cout << '\n';
  }
  return 0;
}

int run_measure(const Options& o, const RunConfig& cfg, const Artifacts& out) {
  MeasureConfig mc = cfg.measure();
  mc.nest = cfg.nest(o.max_level);
  const MeasureReport r = density_experiment(resolve_endpoint(o.lo), resolve_endpoint(o.hi), o.n, o.max_level, cfg.seed, mc);
  out.write("measure.json", [&](std::ostream& s) { write_measure_json(s, r); });
  out.write("density.svg", [&](std::ostream& s) { write_density_svg(s, r); });
  if (o.samples_csv) out.write("samples.csv", [&](std::ostream& s) { write_samples_csv(s, r); });
  const NrEstimate nr = nr_measure_estimate(r);
  std::cout << "nr_fraction: " << fmt(nr.fraction.estimate) << " [" << fmt(nr.fraction.low) << ", "
            << fmt(nr.fraction.high) << "]\ndiscard_fraction: " << fmt(r.discard_fraction) << '\n';
  if (r.decay_fit) std::cout << "q: " << fmt(r.decay_fit->q) << "\nr2: " << fmt(r.decay_fit->r2) << '\n';
  else std::cout << "fit: " << r.fit_diagnostic << '\n';
  if (r.decay_fit && o.tail_level < r.max_level) {
    const BorelCantelliResult b = borel_cantelli_check(r, o.tail_level);
    out.json("borel_cantelli.json", borel_cantelli_json(b));
    std::cout << "borel_cantelli: " << (b.pass ? "PASS" : "FAIL") << '\n';
  }
  return 0;
}

int run_report(const Options& o, const RunConfig& cfg, const Artifacts& out) {
  Json j;
  const double d = misiurewicz_d();
  j["d"] = json_number(d);
  const RayTrace ray = trace_ray(Plane::parameter(), Angle(1, 2), std::log(4.0), 1e-300, cfg.rays());
  j["ray_half_landing"] = ray.landed ? json_complex(*ray.landing_point) : Json(nullptr);
  RealNestConfig exact = cfg.nest(12);
  exact.model = OrbitModel::Exact;
  exact.precision = Precision::Auto;
  exact.resolution_floor = 1e-12;
  const RealNest fib = compute_real_nest(kFibonacci, exact);
  Json times = Json::array();
  for (const auto& l : fib.levels) times.push_back(l.return_time);
  j["fibonacci"] = Json{{"c", json_number(kFibonacci)}, {"return_times", times}};
  const ScalingReport s = scaling_factors(kFibonacci, 12, exact);
  j["fibonacci"]["scaling"] = scaling_json(kFibonacci, s);
  MeasureConfig mc = cfg.measure();
  const MeasureReport m = density_experiment(-2.0, d, o.n, 8, cfg.seed, mc);
  std::ostringstream mj;
  write_measure_json(mj, m);
  j["measure"] = Json::parse(mj.str());
  if (m.decay_fit) j["borel_cantelli"] = borel_cantelli_json(borel_cantelli_check(m, 2));
  out.json("report.json", j);
  out.write("density.svg", [&](std::ostream& f) { write_density_svg(f, m); });
  std::vector<double> x;
  for (std::size_t k = 0; k < s.lambdas.size(); ++k) x.push_back(static_cast<double>(k));
  out.write("scaling.svg", [&](std::ostream& f) { write_line_chart_svg(f, "Fibonacci scaling factors", x, s.lambdas, true); });
  std::cout << "d: " << fmt(d) << "\nnr_fraction: " << fmt(m.nr_fraction.estimate) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parapuzzle toolkit: quadratic-family rays, puzzles, nests, parameter tiles and measure experiments"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "TOML-style key = value configuration file");
  app.add_option("--set", overrides, "Configuration override key=value (repeatable)");
  app.add_option("--out-dir", out_dir, "Directory for written artifacts");
  app.add_option("--threads", threads, "Worker threads (0: hardware concurrency)");
  app.add_option("--seed", seed, "Seed of stochastic experiments");

  Options o;
  auto* ray = app.add_subcommand("ray", "Trace an external ray and write its polyline as CSV");
  ray->add_option("--plane", o.plane, "param or dynamical")->capture_default_str();
  ray->add_option("--c", o.c, "Parameter of the dynamical plane")->capture_default_str();
  ray->add_option("--angle", o.angle, "Angle in turns as p/q")->required();
  ray->add_option("--g-start", o.g_start, "Starting potential")->capture_default_str();
  ray->add_option("--g-end", o.g_end, "Final potential")->capture_default_str();
  ray->add_flag("--land", o.land, "Require and print the landing point");
  ray->add_flag("--extrapolate", o.extrapolate, "Landing of a parameter ray by extrapolation in 1/log(1/g)");

  auto* green = app.add_subcommand("green", "Green's function of the dynamical or parameter plane");
  green->add_option("--plane", o.plane, "param or dynamical")->capture_default_str();
  green->add_option("--c", o.c, "Parameter")->capture_default_str();
  green->add_option("--z", o.z, "Dynamical point")->capture_default_str();

  auto* cycle = app.add_subcommand("cycle", "The q/p cycle of angles landing at the alpha fixed point");
  cycle->add_option("--p", o.p)->capture_default_str();
  cycle->add_option("--q", o.q)->capture_default_str();

  auto* tiling = app.add_subcommand("tiling", "Initial tiling of a parameter in the q/p Misiurewicz wake as JSON");
  tiling->add_option("--c", o.c)->required();
  tiling->add_option("--p", o.p)->capture_default_str();
  tiling->add_option("--q", o.q)->capture_default_str();
  tiling->add_option("--depth", o.depth, "Dyadic depth of the catalog")->capture_default_str();

  auto add_nest_flags = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "computed or exact orbit model")->capture_default_str();
    sub->add_option("--precision", o.precision, "double, quad or auto")->capture_default_str();
    sub->add_option("--floor", o.floor, "Resolution floor of central intervals");
  };
  auto* nest = app.add_subcommand("nest", "Principal nest of a parameter (real CSV, or complex JSON)");
  nest->add_option("--c", o.c)->required();
  nest->add_option("--max-level", o.max_level)->capture_default_str();
  nest->add_flag("--complex", o.complex_nest, "Use the complex puzzle engine");
  add_nest_flags(nest);

  auto* classify = app.add_subcommand("classify", "Nest classification of a real parameter");
  classify->add_option("--c", o.c)->required();
  classify->add_option("--max-level", o.max_level)->capture_default_str();
  add_nest_flags(classify);

  auto* scaling = app.add_subcommand("scaling", "Scaling factors of the real principal nest");
  scaling->add_option("--c", o.c)->required();
  scaling->add_option("--levels", o.levels)->capture_default_str();
  add_nest_flags(scaling);

  auto* wake = app.add_subcommand("wake", "Parabolic or Misiurewicz wake boundary as CSV");
  wake->add_option("--kind", o.kind, "parabolic or misiurewicz")->capture_default_str();
  wake->add_option("--p", o.p)->capture_default_str();
  wake->add_option("--q", o.q)->capture_default_str();
  wake->add_option("--code", o.code, "Dyadic code in + and -")->capture_default_str();
  wake->add_option("--index", o.index)->capture_default_str();

  auto* winding = app.add_subcommand("winding", "Winding number of phi - 0 along a closed loop");
  winding->add_option("--loop", o.loop, "circle or equipotential (parameter level 4)")->capture_default_str();
  winding->add_option("--phi", o.phi, "identity, square, constant or critical-value")->capture_default_str();
  winding->add_option("--radius", o.radius)->capture_default_str();
  winding->add_option("--center", o.center)->capture_default_str();
  winding->add_option("--constant", o.constant)->capture_default_str();
  winding->add_option("--samples", o.samples)->capture_default_str();

  auto* tile = app.add_subcommand("tile", "Parameter tile of a base parameter as JSON and SVG");
  tile->add_option("--base", o.base)->required();
  tile->add_option("--level", o.level)->capture_default_str();
  tile->add_option("--window", o.window, "x0,y0,x1,y1; defaults to the padded real slice for real bases");
  tile->add_option("--resolution", o.resolution, "Grid cells across the window");
  tile->add_flag("--central-only", o.central_only, "Central subtile");

  auto* moduli = app.add_subcommand("moduli", "Moduli of the annuli between nested parameter tiles");
  moduli->add_option("--lambda", o.lambda)->capture_default_str();
  moduli->add_option("--levels", o.levels)->capture_default_str();
  moduli->add_option("--first", o.first)->capture_default_str();
  moduli->add_option("--tile-resolution", o.resolution);
  moduli->add_option("--modulus-resolution", o.modulus_resolution);

  auto* measure = app.add_subcommand("measure", "Monte Carlo central-return densities over a real interval");
  measure->add_option("--lo", o.lo, "Lower endpoint or auto-d")->capture_default_str();
  measure->add_option("--hi", o.hi, "Upper endpoint or auto-d")->capture_default_str();
  measure->add_option("--n", o.n)->capture_default_str();
  measure->add_option("--max-level", o.max_level)->capture_default_str();
  measure->add_option("--tail-level", o.tail_level)->capture_default_str();
  measure->add_flag("--samples-csv", o.samples_csv, "Also write per-sample records");

  auto* report = app.add_subcommand("report", "Summary of the headline computations as JSON and SVG");
  report->add_option("--n", o.n, "Samples of the measure experiment")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cli::load_config_file(cfg, config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value");
      cli::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (out_dir) cfg.output_dir = *out_dir;
    if (threads) cfg.threads = *threads;
    if (seed) cfg.seed = *seed;
    cli::validate(cfg);
    const Artifacts out(cfg.output_dir);
    std::cout.precision(15);
    if (*ray) return run_ray(o, cfg, out);
    if (*green) return run_green(o, out);
    if (*cycle) return run_cycle(o, out);
    if (*tiling) return run_tiling(o, cfg, out);
    if (*nest) return run_nest(o, cfg, out);
    if (*classify) return run_classify(o, cfg, out);
    if (*scaling) return run_scaling(o, cfg, out);
    if (*wake) return run_wake(o, cfg, out);
    if (*winding) return run_winding(o, cfg, out);
    if (*tile) return run_tile(o, cfg, out);
    if (*moduli) return run_moduli(o, cfg, out);
    if (*measure) return run_measure(o, cfg, out);
    if (*report) return run_report(o, cfg, out);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidArgument ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
