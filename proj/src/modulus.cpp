#include "parapuzzle/modulus.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <cmath>
#include <numeric>

#include "parapuzzle/report.hpp"

namespace parapuzzle {

namespace {

constexpr double kTwoPi = 6.283185307179586;

enum : std::uint8_t { kInner = 0, kOuter = 1, kFree = 2 };

// Nodes sit at cell centers of a square lattice in the w plane; z = w
// (uniform) or z = z0 + exp(w) with w = log r + i phi periodic in phi.
struct Lattice {
  ModulusGrid kind = ModulusGrid::Uniform;
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 1.0;
  int nx = 0;
  int ny = 0;
  Complex z0 = 0.0;

  bool periodic() const { return kind == ModulusGrid::LogPolar; }
  Complex w(double i, double j) const { return {x0 + (i + 0.5) * h, y0 + (j + 0.5) * h}; }
  Complex z_of(Complex w) const { return kind == ModulusGrid::Uniform ? w : z0 + std::exp(w); }
  std::size_t id(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
};

struct Classifier {
  const RegionLocator* outer;
  const RegionLocator* inner;
  std::uint8_t operator()(Complex z) const {
    bool near = false;
    if (outer->locate(z, 0.0, near) != 0) return kOuter;
    if (inner->locate(z, 0.0, near) == 0) return kInner;
    return kFree;
  }
};

struct Field {
  Lattice lattice;
  std::vector<double> u;  // every node, Dirichlet values included
  double energy = 0.0;
  int iterations = 0;
};

double interpolate(const Field& f, Complex w) {
  const Lattice& l = f.lattice;
  double fi = (w.real() - l.x0) / l.h - 0.5;
  double fj = (w.imag() - l.y0) / l.h - 0.5;
  fi = std::clamp(fi, 0.0, l.nx - 1.0);
  if (!l.periodic()) fj = std::clamp(fj, 0.0, l.ny - 1.0);
  const int i0 = std::min(static_cast<int>(fi), l.nx - 2);
  const double ti = fi - i0;
  int j0 = static_cast<int>(std::floor(fj));
  const double tj = fj - j0;
  auto at = [&](int i, int j) {
    if (l.periodic()) j = ((j % l.ny) + l.ny) % l.ny;
    else j = std::clamp(j, 0, l.ny - 1);
    return f.u[l.id(i, j)];
  };
  return (1 - ti) * (1 - tj) * at(i0, j0) + ti * (1 - tj) * at(i0 + 1, j0) + (1 - ti) * tj * at(i0, j0 + 1) +
         ti * tj * at(i0 + 1, j0 + 1);
}

// Minimizes sum (u_a - u_b)^2 over free-free edges plus (u_a - g)^2 / t over
// edges cut by a curve at fraction t from the free node: a linear
// interpolant along every edge with the curve at its true crossing.
Field solve(const Lattice& lat, const Classifier& classify, const Field* guess, const SolverConfig& cfg) {
  const std::size_t n = static_cast<std::size_t>(lat.nx) * lat.ny;
  std::vector<std::uint8_t> state(n);
  for (int j = 0; j < lat.ny; ++j)
    for (int i = 0; i < lat.nx; ++i) state[lat.id(i, j)] = classify(lat.z_of(lat.w(i, j)));

  std::vector<std::int64_t> unknown(n, -1);
  std::vector<std::size_t> node_of;
  for (std::size_t k = 0; k < n; ++k)
    if (state[k] == kFree) {
      unknown[k] = static_cast<std::int64_t>(node_of.size());
      node_of.push_back(k);
    }
  const std::size_t m = node_of.size();
  std::vector<double> diag(m, 0.0);
  std::vector<double> rhs(m, 0.0);
  std::vector<std::array<std::int64_t, 4>> nbr(m, {-1, -1, -1, -1});
  struct Cut {
    std::size_t a;
    double g;
    double weight;
  };
  std::vector<Cut> cuts;
  double constant = 0.0;

  auto crossing = [&](Complex wa, Complex wb) {
    double lo = 0.0;
    double hi = 1.0;
    for (int k = 0; k < 30; ++k) {
      const double mid = 0.5 * (lo + hi);
      (classify(lat.z_of(wa + mid * (wb - wa))) == kFree ? lo : hi) = mid;
    }
    return std::max(0.5 * (lo + hi), 1e-3);
  };
  auto edge = [&](int i, int j, int i2, int j2, int slot_a, int slot_b) {
    const std::size_t a = lat.id(i, j);
    const std::size_t b = lat.id(i2, j2);
    const Complex wa = lat.w(i, j);
    const Complex wb = wa + (i2 != i ? Complex(lat.h, 0) : Complex(0, lat.h));
    if (state[a] == kFree && state[b] == kFree) {
      const auto ua = static_cast<std::size_t>(unknown[a]);
      const auto ub = static_cast<std::size_t>(unknown[b]);
      diag[ua] += 1.0;
      diag[ub] += 1.0;
      nbr[ua][slot_a] = unknown[b];
      nbr[ub][slot_b] = unknown[a];
    } else if (state[a] == kFree || state[b] == kFree) {
      const bool a_free = state[a] == kFree;
      const std::size_t f = a_free ? a : b;
      const double g = a_free ? state[b] : state[a];
      const double t = a_free ? crossing(wa, wb) : crossing(wb, wa);
      const auto uf = static_cast<std::size_t>(unknown[f]);
      diag[uf] += 1.0 / t;
      rhs[uf] += g / t;
      cuts.push_back({uf, g, 1.0 / t});
    } else if (state[a] != state[b]) {
      constant += 1.0;
    }
  };
  for (int j = 0; j < lat.ny; ++j)
    for (int i = 0; i < lat.nx; ++i) {
      if (i + 1 < lat.nx) edge(i, j, i + 1, j, 0, 1);
      if (j + 1 < lat.ny) edge(i, j, i, j + 1, 2, 3);
      else if (lat.periodic()) edge(i, j, i, 0, 2, 3);
    }

  Field out;
  out.lattice = lat;
  out.u.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    if (state[k] == kOuter) out.u[k] = 1.0;
  std::vector<double> x(m, 0.5);
  if (guess)
    for (std::size_t a = 0; a < m; ++a) {
      const std::size_t k = node_of[a];
      const int i = static_cast<int>(k % lat.nx);
      const int j = static_cast<int>(k / lat.nx);
      x[a] = std::clamp(interpolate(*guess, lat.w(i, j)), 0.0, 1.0);
    }

  auto apply = [&](const std::vector<double>& v, std::vector<double>& y) {
    for (std::size_t a = 0; a < m; ++a) {
      double s = diag[a] * v[a];
      for (auto b : nbr[a])
        if (b >= 0) s -= v[static_cast<std::size_t>(b)];
      y[a] = s;
    }
  };
  // Jacobi-preconditioned conjugate gradients.
  std::vector<double> r(m), z(m), p(m), q(m);
  apply(x, q);
  for (std::size_t a = 0; a < m; ++a) r[a] = rhs[a] - q[a];
  const double bnorm = std::sqrt(std::inner_product(rhs.begin(), rhs.end(), rhs.begin(), 0.0));
  for (std::size_t a = 0; a < m; ++a) z[a] = r[a] / diag[a];
  p = z;
  double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    const double rnorm = std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0));
    if (!(rnorm > cfg.relative_residual * bnorm)) break;
    apply(p, q);
    const double alpha = rz / std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      x[a] += alpha * p[a];
      r[a] -= alpha * q[a];
      z[a] = r[a] / diag[a];
    }
    const double rz_next = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t a = 0; a < m; ++a) p[a] = z[a] + beta * p[a];
  }
  if (it >= cfg.max_iterations) fail(ErrorCode::NoConvergence, "conjugate gradients did not converge");
  out.iterations = it;

  double e = constant;
  for (std::size_t a = 0; a < m; ++a) {
    out.u[node_of[a]] = x[a];
    for (int s : {0, 2})
      if (nbr[a][s] >= 0) {
        const double d = x[a] - x[static_cast<std::size_t>(nbr[a][s])];
        e += d * d;
      }
  }
  for (const auto& c : cuts) e += c.weight * (x[c.a] - c.g) * (x[c.a] - c.g);
  out.energy = e;
  return out;
}

// Interior point of a polygon far from its boundary.
Complex deep_point(const Polyline& poly) {
  const Box b = bounding_box(poly);
  Complex best = b.center();
  double best_d = -1.0;
  constexpr int kSamples = 64;
  for (int j = 0; j < kSamples; ++j)
    for (int i = 0; i < kSamples; ++i) {
      const Complex z{b.x0 + (i + 0.5) * b.width() / kSamples, b.y0 + (j + 0.5) * b.height() / kSamples};
      if (!point_in_polygon(poly, z)) continue;
      const double d = distance_to_polyline(poly, z, true);
      if (d > best_d) {
        best_d = d;
        best = z;
      }
    }
  if (best_d <= 0) fail(ErrorCode::TooThin, "inner curve encloses no interior");
  return best;
}

Lattice make_lattice(const AnnulusSpec& spec, int resolution, Complex z0) {
  Lattice lat;
  lat.kind = spec.grid;
  if (spec.grid == ModulusGrid::Uniform) {
    const Box b = bounding_box(spec.outer);
    lat.h = std::max(b.width(), b.height()) / resolution;
    lat.x0 = b.x0 - 2 * lat.h;
    lat.y0 = b.y0 - 2 * lat.h;
    lat.nx = static_cast<int>(std::ceil(b.width() / lat.h)) + 4;
    lat.ny = static_cast<int>(std::ceil(b.height() / lat.h)) + 4;
  } else {
    lat.z0 = z0;
    lat.h = kTwoPi / resolution;
    const double r0 = 0.5 * distance_to_polyline(spec.inner, z0, true);
    double r1 = 0.0;
    for (const auto& z : spec.outer) r1 = std::max(r1, std::abs(z - z0));
    lat.x0 = std::log(r0);
    lat.y0 = 0.0;
    lat.nx = static_cast<int>(std::ceil((std::log(1.05 * r1) - lat.x0) / lat.h)) + 2;
    lat.ny = resolution;
  }
  return lat;
}

}  // namespace

ModulusEstimate annulus_modulus(const AnnulusSpec& spec, const SolverConfig& solver) {
  if (spec.grid_resolution < 64) fail(ErrorCode::InvalidArgument, "grid resolution must be at least 64");
  if (spec.outer.size() < 3 || spec.inner.size() < 3) fail(ErrorCode::InvalidArgument, "curves need three vertices");
  if (polygons_intersect(spec.outer, spec.inner)) fail(ErrorCode::CurvesIntersect, "inner and outer curves cross");
  for (const auto& z : spec.inner)
    if (!point_in_polygon(spec.outer, z)) fail(ErrorCode::CurvesIntersect, "inner curve leaves the outer curve");

  const Complex z0 = spec.grid == ModulusGrid::LogPolar ? deep_point(spec.inner) : Complex(0.0);
  const Lattice fine = make_lattice(spec, spec.grid_resolution, z0);
  // Thickness in cells of the fine lattice, measured locally.
  auto cell_at = [&](Complex z) { return spec.grid == ModulusGrid::Uniform ? fine.h : fine.h * std::abs(z - z0); };
  double thinnest = INFINITY;
  for (const auto& z : spec.inner) thinnest = std::min(thinnest, distance_to_polyline(spec.outer, z, true) / cell_at(z));
  for (const auto& z : spec.outer) thinnest = std::min(thinnest, distance_to_polyline(spec.inner, z, true) / cell_at(z));
  if (thinnest < 3.0) fail(ErrorCode::TooThin, "annulus is " + fmt(thinnest) + " cells thick");
  const Box ib = bounding_box(spec.inner);
  if (spec.grid == ModulusGrid::Uniform && std::max(ib.width(), ib.height()) < 3 * fine.h)
    fail(ErrorCode::TooThin, "inner curve spans fewer than 3 cells");

  const RegionLocator outer({closed(spec.outer)}, 256);
  const RegionLocator inner({closed(spec.inner)}, 256);
  const Classifier classify{&outer, &inner};

  // Nested iteration: each level starts from the interpolated coarser solution.
  std::vector<int> chain{spec.grid_resolution};
  while (chain.back() / 2 >= 32) chain.push_back(chain.back() / 2);
  std::optional<Field> previous;
  std::optional<Field> coarse;
  Field field;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    field = solve(make_lattice(spec, *it, z0), classify, previous ? &*previous : nullptr, solver);
    if (*it == spec.grid_resolution / 2) coarse = field;
    previous = field;
  }
  ModulusEstimate out;
  out.energy = field.energy;
  out.mod = kTwoPi / field.energy;
  out.iterations = field.iterations;
  out.resolution_pair = {spec.grid_resolution, spec.grid_resolution / 2};
  out.richardson_error = std::abs(out.mod - kTwoPi / coarse->energy);
  return out;
}

Box real_slice_window(double base, const TileKey& key, const WindowPolicy& policy, const ParamTileConfig& config) {
  auto member = [&](double x) { return evaluate_cell(x, key, config).tile == CellVerdict::Member; };
  auto edge = [&](double in, double out) {
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (in + out);
      (member(mid) ? in : out) = mid;
    }
    return in;
  };
  auto march = [&](double dir) {
    double x = base;
    double step = 1e-12 * std::max(1.0, std::abs(base));
    while (member(x + dir * step)) {
      x += dir * step;
      step *= 1.5;
      if (step > 4.0) fail(ErrorCode::WindowClipped, "real slice does not end");
    }
    return edge(x, x + dir * step);
  };
  const double lo = march(-1.0);
  const double hi = march(1.0);
  const double c = 0.5 * (lo + hi);
  const double w = hi - lo;
  // A grid of such a slice would need cells near the spacing of doubles.
  if (!(w > 1e-12 * std::max(1.0, std::abs(base))))
    fail(ErrorCode::UnderResolved, "real slice of the level-" + std::to_string(key.level) + " tile is narrower than " +
                                       fmt(1e-12 * std::max(1.0, std::abs(base))));
  return {c - policy.margin_x * w, -policy.margin_y * w, c + policy.margin_x * w, policy.margin_y * w};
}

namespace {

Box grown(const Box& b, double factor) {
  const Complex c = b.center();
  const double hw = 0.5 * factor * b.width();
  const double hh = 0.5 * factor * b.height();
  return {c.real() - hw, c.imag() - hh, c.real() + hw, c.imag() + hh};
}

// Tile with enlargement on clipping; for complex bases refined once when the
// tile fills little of the window.
TileExtraction extract_adaptive(Complex base, int level, Box window, bool refine, int resolution,
                                const WindowPolicy& policy, const ParamTileConfig& config) {
  for (int attempt = 0;; ++attempt) {
    try {
      auto ex = extract_tile_and_subtile(base, level, window, resolution, config);
      const Box b = bounding_box(ex.tile.outer_contour);
      if (refine && std::max(b.width() / window.width(), b.height() / window.height()) < 0.4) {
        refine = false;
        const double s = std::max(b.width(), b.height());
        window = Box::around(b.center(), 0.5 * policy.growth * s);
        if (!window.contains(base)) window = grown(window, 2.0);
        continue;
      }
      return ex;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WindowClipped || attempt >= policy.max_enlargements) throw;
      window = grown(window, policy.growth);
    }
  }
}

double equivalent_radius(const Polyline& loop) { return std::sqrt(std::abs(signed_area(loop)) / M_PI); }

double cell_size(const ParamTile& t) { return t.mask.window.width() / t.mask.nx; }

}  // namespace

NestModuliResult nest_moduli(Complex lambda, int levels, const WindowPolicy& policy, int tile_resolution,
                             int modulus_resolution, int first, const ParamTileConfig& config) {
  NestModuliResult out;
  if (levels <= 0) return out;
  if (first < 0) fail(ErrorCode::InvalidArgument, "first level must be nonnegative");
  const bool real = lambda.imag() == 0.0;
  std::vector<std::string> errors(static_cast<std::size_t>(levels) + 1);
  std::vector<std::optional<ErrorCode>> codes(static_cast<std::size_t>(levels) + 1);
  std::optional<Box> previous;
  for (int k = 0; k <= levels; ++k) {
    const int l = first + k;
    try {
      const TileKey key = tile_key(lambda, l, config);
      Box window = real ? real_slice_window(lambda.real(), key, policy, config)
                        : previous ? grown(*previous, 1.2) : Box::around(lambda, policy.initial_half_width);
      out.tiles.push_back(extract_adaptive(lambda, l, window, !real, tile_resolution, policy, config));
      previous = bounding_box(out.tiles.back()->tile.outer_contour);
    } catch (const Error& e) {
      out.tiles.emplace_back(std::nullopt);
      errors[k] = e.what();
      codes[k] = e.code();
    }
  }
  for (int k = 0; k < levels; ++k) {
    NestModulusEntry entry;
    entry.level = first + k;
    const auto& outer = out.tiles[k];
    const auto& inner = out.tiles[k + 1];
    if (!outer || !inner) {
      entry.error = codes[outer ? k + 1 : k];
      entry.diagnostic = "level " + std::to_string(outer ? first + k + 1 : first + k) + ": " + errors[outer ? k + 1 : k];
      out.entries.push_back(entry);
      continue;
    }
    const ModulusGrid grid = ModulusGrid::LogPolar;
    try {
      entry.annulus = annulus_modulus({outer->tile.outer_contour, inner->tile.outer_contour, modulus_resolution, grid});
      entry.contour_error = 0.5 * cell_size(outer->tile) / equivalent_radius(outer->tile.outer_contour) +
                            0.5 * cell_size(inner->tile) / equivalent_radius(inner->tile.outer_contour);
    } catch (const Error& e) {
      entry.error = e.code();
      entry.diagnostic = e.what();
    }
    if (outer->subtile) {
      try {
        entry.central = annulus_modulus({outer->tile.outer_contour, outer->subtile->outer_contour, modulus_resolution, grid});
      } catch (const Error& e) {
        entry.central_diagnostic = e.what();
      }
    } else {
      entry.central_diagnostic = outer->subtile_error;
    }
    out.entries.push_back(entry);
  }
  return out;
}

void write_moduli_csv(std::ostream& out, const NestModuliResult& result) {
  out << "l,mod,richardson_error,contour_error,central_mod,central_richardson_error,error\n";
  for (const auto& e : result.entries) {
    out << e.level << ',' << (e.annulus ? fmt(e.annulus->mod) : "") << ','
        << (e.annulus ? fmt(e.annulus->richardson_error) : "") << ',' << (e.annulus ? fmt(e.contour_error) : "") << ','
        << (e.central ? fmt(e.central->mod) : "") << ',' << (e.central ? fmt(e.central->richardson_error) : "") << ','
        << csv_field(e.error ? std::string(to_string(*e.error)) + ": " + e.diagnostic : "") << '\n';
  }
}

void write_moduli_svg(std::ostream& out, const NestModuliResult& result) {
  std::vector<const ParamTile*> tiles;
  for (const auto& t : result.tiles)
    if (t) tiles.push_back(&t->tile);
  if (tiles.empty()) fail(ErrorCode::InvalidArgument, "no tiles to draw");
  // Each level is drawn in its own panel, scaled to its window.
  const int panel = 320;
  const int n = static_cast<int>(tiles.size());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << panel * n << "\" height=\"" << panel + 40 << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int k = 0; k < n; ++k) {
    const ParamTile& t = *tiles[k];
    const Box& w = t.mask.window;
    const double s = panel / std::max(w.width(), w.height());
    auto draw = [&](const Polyline& line, const char* color) {
      out << "<polygon fill=\"none\" stroke=\"" << color << "\" points=\"";
      for (const auto& z : line) out << fmt(k * panel + (z.real() - w.x0) * s) << ',' << fmt(panel - (z.imag() - w.y0) * s) << ' ';
      out << "\"/>\n";
    };
    draw(t.outer_contour, "black");
    if (k + 1 < n) draw(tiles[k + 1]->outer_contour, "crimson");
    std::string label = "level " + std::to_string(t.level);
    for (const auto& e : result.entries)
      if (e.level == t.level && e.annulus) label += "  mod " + fmt(round15(e.annulus->mod)).substr(0, 6);
    out << "<text x=\"" << k * panel + 8 << "\" y=\"" << panel + 24 << "\" font-size=\"13\" font-family=\"monospace\">"
        << label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace parapuzzle
