#include "parapuzzle/paraplane.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <Eigen/Dense>

#include "parapuzzle/dynamics.hpp"
#include "parapuzzle/report.hpp"

namespace parapuzzle {

namespace {

constexpr double kLog2 = 0.6931471805599453;
constexpr double kTwoPi = 6.283185307179586;
// Parameter rays are traced down to this potential; the landing fit uses the
// part below kFitPotential.
constexpr double kDeepPotential = 1e-300;
constexpr double kFitPotential = 2e-22;
constexpr double kLandingTolerance = 1e-5;

Complex fit_at_zero(const std::vector<double>& x, const std::vector<Complex>& y, int degree) {
  const double scale = *std::max_element(x.begin(), x.end());
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(x.size()), degree + 1);
  Eigen::VectorXcd b(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (int k = 0; k <= degree; ++k) a(r, k) = std::pow(x[i] / scale, k);
    b(r) = y[i];
  }
  const Eigen::VectorXcd coef = a.colPivHouseholderQr().solve(b);
  return coef(0);
}

RayTrace trace_parameter_ray(const Angle& angle, double g_start, const RayConfig& config) {
  auto trace = trace_ray(Plane::parameter(), angle, g_start, kDeepPotential, config);
  if (trace.failure)
    fail(ErrorCode::RayLandingFailure, "parameter ray " + angle.to_string() + ": " + trace.diagnostic);
  return trace;
}

// Endpoints of a wake: the two parameter rays, their landings, and the
// truncating equipotential between them.
void trace_wake(Wake& wake, const RayConfig& config) {
  const double g = std::log(wake.truncation_level);
  wake.rays[0] = trace_parameter_ray(wake.boundary_angles.first, g, config);
  wake.rays[1] = trace_parameter_ray(wake.boundary_angles.second, g, config);
  const auto l0 = parameter_ray_landing(wake.rays[0]);
  const auto l1 = parameter_ray_landing(wake.rays[1]);
  for (const auto* l : {&l0, &l1})
    if (l->spread > kLandingTolerance)
      fail(ErrorCode::RayLandingFailure, "landing fit spread " + fmt(l->spread) + " exceeds tolerance");
  wake.landing_gap = std::abs(l0.point - l1.point);
  if (wake.landing_gap > kLandingTolerance)
    fail(ErrorCode::RayLandingFailure, "boundary rays land " + fmt(wake.landing_gap) + " apart");
  wake.landing_param = 0.5 * (l0.point + l1.point);
  wake.equipotential = trace_equipotential_arc(Plane::parameter(), g, wake.boundary_angles.first,
                                               wake.boundary_angles.second, 256, wake.rays[0].points.front(), config);
}

}  // namespace

RayLanding parameter_ray_landing(const RayTrace& trace) {
  std::vector<double> x;
  std::vector<Complex> y;
  for (std::size_t k = 0; k < trace.points.size(); ++k) {
    if (trace.potentials[k] > kFitPotential) continue;
    x.push_back(1.0 / -std::log(trace.potentials[k]));
    y.push_back(trace.points[k]);
  }
  RayLanding out;
  // Geometric landings stall at the precision floor before the fit range.
  if (x.size() < 16) {
    if (!trace.landed) fail(ErrorCode::RayLandingFailure, "ray " + trace.angle.to_string() + " did not land");
    const std::size_t m = trace.points.size();
    out.point = trace.points.back();
    out.spread = std::abs(trace.points[m - 1] - trace.points[m - 2]);
    return out;
  }
  out.point = fit_at_zero(x, y, 3);
  out.spread = std::abs(out.point - fit_at_zero(x, y, 2));
  out.tail_gap = std::abs(trace.points.back() - out.point);
  return out;
}

Wake wake_boundary(int p, int q, const RayConfig& rays) {
  const auto sc = sector_combinatorics(p, q);
  Wake wake;
  wake.kind = Wake::Kind::Parabolic;
  wake.p = p;
  wake.q = q;
  const AngleArc& arc = sc.arcs[sc.characteristic];
  wake.boundary_angles = {arc.from, arc.to};
  wake.truncation_level = 4.0;
  trace_wake(wake, rays);
  return wake;
}

Wake misiurewicz_wake(int p, int q, const std::string& code, int index, TruncationReading reading,
                      const RayConfig& rays) {
  const auto sc = sector_combinatorics(p, q);
  if (index < 1 || index >= p) fail(ErrorCode::InvalidArgument, "Z piece index must lie in [1, p - 1]");
  const AngleArc z_arc = z_piece_arc(p, q, code, index);
  // The critical value lies in the characteristic sector and f^{p-1} carries
  // it to the tip of the Z piece.
  std::optional<AngleArc> param_arc;
  for (const auto& a : arc_preimages(z_arc, static_cast<unsigned>(p - 1)))
    if (sc.arcs[sc.characteristic].contains_arc(a)) param_arc = a;
  if (!param_arc) fail(ErrorCode::NotFound, "no preimage of the Z arc in the characteristic arc");

  Wake wake;
  wake.kind = Wake::Kind::Misiurewicz;
  wake.p = p;
  wake.q = q;
  wake.code = code;
  wake.index = index;
  wake.boundary_angles = {param_arc->from, param_arc->to};
  const int n = static_cast<int>(code.size()) + 1;
  wake.truncation_level = truncation_level(p, n, reading);
  trace_wake(wake, rays);
  const Complex ray_landing = wake.landing_param;
  wake.landing_param = solve_misiurewicz(p, q, n, ray_landing);
  const double gap = std::abs(wake.landing_param - ray_landing);
  if (gap > kLandingTolerance)
    fail(ErrorCode::RayLandingFailure, "rays land " + fmt(gap) + " away from the Misiurewicz parameter");
  return wake;
}

void write_wake_csv(std::ostream& out, const Wake& wake) {
  out << "curve,index,re,im\n";
  for (int r = 0; r < 2; ++r) {
    const std::string name = "ray " + wake.rays[r].angle.to_string();
    for (std::size_t k = 0; k < wake.rays[r].points.size(); ++k)
      out << csv_field(name) << ',' << k << ',' << fmt(wake.rays[r].points[k].real()) << ','
          << fmt(wake.rays[r].points[k].imag()) << '\n';
  }
  for (std::size_t k = 0; k < wake.equipotential.size(); ++k)
    out << "equipotential," << k << ',' << fmt(wake.equipotential[k].real()) << ','
        << fmt(wake.equipotential[k].imag()) << '\n';
  out << "landing,0," << fmt(wake.landing_param.real()) << ',' << fmt(wake.landing_param.imag()) << '\n';
}

WindingResult winding_number(const std::vector<Complex>& loop, const std::vector<Complex>& phi,
                             const std::vector<Complex>& psi) {
  if (loop.size() < 3 || phi.size() != loop.size() || psi.size() != loop.size())
    fail(ErrorCode::InvalidArgument, "loop, phi and psi need equal lengths of at least 3");
  if (loop.front() != loop.back()) fail(ErrorCode::InvalidArgument, "loop must be closed (first sample = last)");
  WindingResult out;
  out.samples = loop.size();
  out.min_separation = std::numeric_limits<double>::infinity();
  double total = 0.0;
  Complex prev = 0.0;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const Complex d = phi[k] - psi[k];
    const double sep = std::abs(d);
    out.min_separation = std::min(out.min_separation, sep);
    if (!(sep >= 1e-12)) fail(ErrorCode::SeparationFailure, "|phi - psi| = " + fmt(sep) + " at sample " + std::to_string(k));
    if (k > 0) {
      const double jump = std::arg(d / prev);
      if (std::abs(jump) >= 0.5 * M_PI)
        fail(ErrorCode::UnderResolved, "argument jump " + fmt(jump) + " at sample " + std::to_string(k));
      total += jump;
    }
    prev = d;
  }
  out.increment = total / kTwoPi;
  out.w = std::lround(out.increment);
  return out;
}

std::string TileKey::to_string() const {
  std::string s = "l=" + std::to_string(level) + ";m=";
  for (std::size_t k = 0; k < return_times.size(); ++k) s += (k ? "," : "") + std::to_string(return_times[k]);
  s += ";N=";
  for (std::size_t k = 0; k < cascades.size(); ++k) s += (k ? "," : "") + std::to_string(cascades[k]);
  s += ";v=";
  for (std::size_t k = 0; k < witness.size(); ++k) s += (k ? " " : "") + witness[k].to_string();
  return s;
}

namespace {

ComplexNest nest_for_key(const InitialTiling& tiling, int level, std::uint64_t cap, const ParamTileConfig& config) {
  ComplexNestConfig nc;
  nc.max_level = level + 1;
  nc.max_cascade = config.max_cascade;
  nc.iterate_cap = cap;
  return compute_complex_nest(tiling, nc);
}

}  // namespace

TileKey tile_key(Complex base, int level, const ParamTileConfig& config) {
  if (level < 0) fail(ErrorCode::InvalidArgument, "level must be nonnegative");
  InitialTiling tiling;
  try {
    tiling = build_initial_tiling(base, config.p, config.q, 1, config.puzzle);
  } catch (const Error& e) {
    fail(ErrorCode::EmptyTile, std::string("base parameter has no tiling: ") + e.what());
  }
  const auto nest = nest_for_key(tiling, level, 10'000'000, config);
  if (static_cast<int>(nest.levels.size()) <= level)
    fail(ErrorCode::EmptyTile, "base nest resolves " + std::to_string(nest.levels.size()) + " levels (" +
                                   std::string(to_string(nest.stop)) + "), level " + std::to_string(level) +
                                   " needed");
  TileKey key;
  key.level = level;
  for (int l = 0; l <= level; ++l) {
    key.return_times.push_back(nest.levels[l].return_time);
    if (l < level) key.cascades.push_back(nest.levels[l].cascade_len);
  }
  key.witness = nest.levels[level].witness;
  return key;
}

CellEvaluation evaluate_cell(Complex mu, const TileKey& key, const ParamTileConfig& config) {
  const CellEvaluation outside{CellVerdict::Outside, CellVerdict::Outside};
  const CellEvaluation unknown{CellVerdict::Unknown, CellVerdict::Unknown};
  const std::uint64_t m = key.return_times.back();
  // Every witness symbol lies below the level log 2, so v_m does too.
  const auto gm = green_parameter(mu, PotentialConfig{1e6, 64, 0.0});
  if (gm.escaped && std::ldexp(gm.g, static_cast<int>(std::min<std::uint64_t>(m, 1000)) - 1) > kLog2 * (1 + 1e-6))
    return outside;
  InitialTiling tiling;
  try {
    tiling = build_initial_tiling(mu, config.p, config.q, 1, config.puzzle);
  } catch (const Error& e) {
    return e.code() == ErrorCode::NotInWake ? outside : unknown;
  }
  Complex z = 0.0;
  for (std::uint64_t k = 1; k <= m; ++k) {
    z = z * z + mu;
    const Symbol s = tiling.symbol(z);
    const Symbol& w = key.witness[k - 1];
    if (!s.decided()) return unknown;
    if (!s.same_piece(w)) return outside;
    if (k < m && s.kind == Symbol::Kind::V) {
      if (s.half == 0) return unknown;
      if (s.half != w.half) return outside;
    }
  }
  const auto nest = nest_for_key(tiling, key.level, m, config);
  const int have = static_cast<int>(nest.levels.size());
  for (int l = 0; l < std::min(have, key.level + 1); ++l) {
    if (nest.levels[l].return_time != key.return_times[l]) return outside;
    if (l < key.level && nest.levels[l].cascade_len != key.cascades[l]) return outside;
  }
  if (have <= key.level) return nest.stop == ComplexNestStop::Undecidable ? unknown : outside;
  return {CellVerdict::Member, nest.levels[key.level].central ? CellVerdict::Member : CellVerdict::Outside};
}

namespace {

struct GridEvaluation {
  Raster tile;
  Raster tile_unknown;
  Raster central;
  Raster central_unknown;
};

GridEvaluation evaluate_grid(const TileKey& key, const Box& window, int resolution, const ParamTileConfig& config) {
  const int nx = resolution;
  const int ny = std::max(1, static_cast<int>(std::lround(resolution * window.height() / window.width())));
  GridEvaluation g{Raster(window, nx, ny), Raster(window, nx, ny), Raster(window, nx, ny), Raster(window, nx, ny)};
  std::vector<CellEvaluation> cells(static_cast<std::size_t>(nx) * ny);
  std::atomic<int> next_row{0};
  auto work = [&] {
    for (int j = next_row++; j < ny; j = next_row++)
      for (int i = 0; i < nx; ++i)
        cells[static_cast<std::size_t>(j) * nx + i] = evaluate_cell(g.tile.center(i, j), key, config);
  };
  const int threads = config.threads > 0 ? config.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(work);
  }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const auto& e = cells[static_cast<std::size_t>(j) * nx + i];
      g.tile.at(i, j) = e.tile == CellVerdict::Member;
      g.tile_unknown.at(i, j) = e.tile == CellVerdict::Unknown;
      g.central.at(i, j) = e.tile == CellVerdict::Member && e.central == CellVerdict::Member;
      g.central_unknown.at(i, j) = e.tile == CellVerdict::Unknown || (e.tile == CellVerdict::Member && e.central == CellVerdict::Unknown);
    }
  return g;
}

// Unknown cells among the component and its 8-neighbors.
double unknown_fraction(const Raster& component, const Raster& unknown) {
  std::size_t region = 0;
  std::size_t noisy = 0;
  for (int j = 0; j < component.ny; ++j)
    for (int i = 0; i < component.nx; ++i) {
      bool near = false;
      for (int dj = -1; dj <= 1 && !near; ++dj)
        for (int di = -1; di <= 1 && !near; ++di) {
          const int a = i + di;
          const int b = j + dj;
          near = a >= 0 && b >= 0 && a < component.nx && b < component.ny && component.at(a, b);
        }
      if (!near) continue;
      ++region;
      noisy += unknown.at(i, j);
    }
  return region ? static_cast<double>(noisy) / region : 0.0;
}

// Checks and contours a component; fills the superattracting center of period m_l when found inside.
void finish_tile(ParamTile& tile, Raster component, const Raster& unknown, const ParamTileConfig& config) {
  if (touches_edge(component)) fail(ErrorCode::WindowClipped, "tile reaches the window edge; enlarge the window");
  tile.unknown_fraction = unknown_fraction(component, unknown);
  tile.unknown = unknown;
  tile.mask = std::move(component);
  if (tile.unknown_fraction > config.max_unknown_fraction)
    fail(ErrorCode::NoisyTile, "unknown cells make up " + fmt(tile.unknown_fraction) + " of the tile neighborhood");

  double best = 0.0;
  for (auto& loop : contours(tile.mask)) {
    const double area = signed_area(loop);
    if (area > best) {
      if (!tile.outer_contour.empty()) tile.inner_contours.push_back(std::move(tile.outer_contour));
      best = area;
      tile.outer_contour = std::move(loop);
    } else {
      tile.inner_contours.push_back(std::move(loop));
    }
  }

  const auto period = static_cast<int>(tile.key.return_times.back());
  Complex centroid = 0.0;
  std::size_t count = 0;
  for (int j = 0; j < tile.mask.ny; ++j)
    for (int i = 0; i < tile.mask.nx; ++i)
      if (tile.mask.at(i, j)) {
        centroid += tile.mask.center(i, j);
        ++count;
      }
  centroid /= static_cast<double>(count);
  for (const Complex seed : {tile.base, centroid}) {
    try {
      const Complex c = solve_center(period, seed);
      const auto at = tile.mask.cell(c);
      if (at && tile.mask.at(at->first, at->second)) {
        tile.center = c;
        break;
      }
    } catch (const Error&) {
    }
  }
}

// Largest 4-connected component of the mask within `inside`.
Raster largest_component(const Raster& mask, const Raster& inside) {
  Raster work = mask;
  for (std::size_t k = 0; k < work.cells.size(); ++k) work.cells[k] = work.cells[k] && inside.cells[k];
  Raster best(mask.window, mask.nx, mask.ny);
  std::size_t best_count = 0;
  for (int j = 0; j < work.ny; ++j)
    for (int i = 0; i < work.nx; ++i) {
      if (!work.at(i, j)) continue;
      Raster comp = component4(work, i, j);
      const std::size_t n = comp.count();
      for (std::size_t k = 0; k < work.cells.size(); ++k)
        if (comp.cells[k]) work.cells[k] = 0;
      if (n > best_count) {
        best_count = n;
        best = std::move(comp);
      }
    }
  return best;
}

void check_grid_request(Complex base, const Box& window, int resolution) {
  if (resolution < 1 || resolution > 4096) fail(ErrorCode::InvalidArgument, "resolution must lie in [1, 4096]");
  if (!(window.width() > 0) || !(window.height() > 0)) fail(ErrorCode::InvalidArgument, "window must be nondegenerate");
  if (!window.contains(base)) fail(ErrorCode::InvalidArgument, "window must contain the base parameter");
}

}  // namespace

TileExtraction extract_tile_and_subtile(Complex base, int level, const Box& window, int resolution,
                                        const ParamTileConfig& config) {
  check_grid_request(base, window, resolution);
  TileExtraction out;
  ParamTile& tile = out.tile;
  tile.level = level;
  tile.base = base;
  tile.key = tile_key(base, level, config);
  const bool base_central = evaluate_cell(base, tile.key, config).central == CellVerdict::Member;
  auto grid = evaluate_grid(tile.key, window, resolution, config);

  // The base parameter is a member by construction; its cell therefore is.
  const auto cell = grid.tile.cell(base);
  grid.tile.at(cell->first, cell->second) = 1;
  grid.tile_unknown.at(cell->first, cell->second) = 0;
  if (base_central) grid.central.at(cell->first, cell->second) = 1;
  finish_tile(tile, component4(grid.tile, cell->first, cell->second), grid.tile_unknown, config);

  // The central subtile: the component of the base when it returns centrally,
  // else the largest central component inside the tile.
  try {
    ParamTile sub;
    sub.level = level;
    sub.base = base;
    sub.central_only = true;
    sub.key = tile.key;
    Raster component = base_central ? component4(grid.central, cell->first, cell->second)
                                    : largest_component(grid.central, tile.mask);
    if (component.count() == 0) fail(ErrorCode::EmptyTile, "no central subtile resolved in the tile");
    finish_tile(sub, std::move(component), grid.central_unknown, config);
    out.subtile = std::move(sub);
  } catch (const Error& e) {
    out.subtile_error = e.what();
    out.subtile_code = e.code();
  }
  return out;
}

ParamTile extract_param_tile(Complex base, int level, const Box& window, int resolution, bool central_only,
                             const ParamTileConfig& config) {
  auto ex = extract_tile_and_subtile(base, level, window, resolution, config);
  if (!central_only) return std::move(ex.tile);
  if (!ex.subtile) fail(*ex.subtile_code, ex.subtile_error);
  return std::move(*ex.subtile);
}

void write_tile_json(std::ostream& out, const ParamTile& tile) {
  Json j;
  j["level"] = tile.level;
  j["central_only"] = tile.central_only;
  j["base"] = json_complex(tile.base);
  j["key"] = tile.key.to_string();
  j["return_times"] = tile.key.return_times;
  j["cascades"] = tile.key.cascades;
  j["window"] = {{"x0", json_number(tile.mask.window.x0)},
                 {"y0", json_number(tile.mask.window.y0)},
                 {"x1", json_number(tile.mask.window.x1)},
                 {"y1", json_number(tile.mask.window.y1)}};
  j["nx"] = tile.mask.nx;
  j["ny"] = tile.mask.ny;
  j["cells"] = tile.mask.count();
  j["unknown_fraction"] = json_number(tile.unknown_fraction);
  j["mask_rle"] = run_lengths(tile.mask);
  j["center"] = tile.center ? json_complex(*tile.center) : Json(nullptr);
  j["outer_contour"] = json_polyline(tile.outer_contour);
  Json holes = Json::array();
  for (const auto& h : tile.inner_contours) holes.push_back(json_polyline(h));
  j["inner_contours"] = holes;
  out << j.dump(1) << '\n';
}

void write_tile_svg(std::ostream& out, const std::vector<const ParamTile*>& tiles) {
  if (tiles.empty()) fail(ErrorCode::InvalidArgument, "no tiles to draw");
  Box view = tiles.front()->mask.window;
  for (const auto* t : tiles) {
    const Box& w = t->mask.window;
    view = {std::min(view.x0, w.x0), std::min(view.y0, w.y0), std::max(view.x1, w.x1), std::max(view.y1, w.y1)};
  }
  SvgCanvas svg(view, 800);
  static const char* colors[] = {"black", "crimson", "royalblue", "darkgreen", "darkorange", "purple"};
  for (std::size_t k = 0; k < tiles.size(); ++k) {
    const char* color = colors[k % 6];
    svg.polyline(tiles[k]->outer_contour, color, true);
    for (const auto& h : tiles[k]->inner_contours) svg.polyline(h, color, true);
    if (tiles[k]->center) svg.circle(*tiles[k]->center, 2.0, color);
  }
  svg.circle(tiles.front()->base, 2.5, "black");
  svg.write(out);
}

}  // namespace parapuzzle
