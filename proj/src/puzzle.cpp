#include "parapuzzle/puzzle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parapuzzle/dynamics.hpp"

namespace parapuzzle {

namespace {

constexpr double kLog4 = 1.3862943611198906;
constexpr double kLog2 = 0.6931471805599453;
constexpr double kStartG = 9.210340371976184;  // log 1e4
// Sector polygons keep ray points inside this radius and close along the
// circle; every decided point lies well inside it.
constexpr double kPolygonRadius = 8.0;

// Rotation number of doubling on a finite cycle: the cyclic order of the
// angles is preserved; the index shift divided by p.
int rotation_numerator(const std::vector<Angle>& sorted) {
  const int p = static_cast<int>(sorted.size());
  const Angle image = sorted[0].doubled();
  for (int k = 0; k < p; ++k)
    if (sorted[k] == image) return k;
  return -1;
}

// Potential with an early exit: orbits bounded for this many steps have
// potential below 2^-48 log(escape radius), far under every decision surface.
PotentialValue fast_potential(Complex c, Complex z) {
  return green_dynamical(c, z, PotentialConfig{1e6, 48, 0.0});
}

Symbol make(Symbol::Kind kind, int index = 0, int half = 0) {
  return Symbol{kind, static_cast<std::int8_t>(index), static_cast<std::int8_t>(half)};
}

Complex iterate_n(Complex c, Complex z, int n) {
  for (int k = 0; k < n; ++k) z = z * z + c;
  return z;
}

}  // namespace

RayCycle alpha_ray_cycle(int p, int q) {
  if (p < 2 || p > 24) fail(ErrorCode::NotFound, "period must lie in [2, 24]");
  if (q < 1 || q >= p || std::gcd(p, q) != 1) fail(ErrorCode::NotFound, "q must be coprime to p with 0 < q < p");
  const std::uint64_t den = (std::uint64_t{1} << p) - 1;
  for (std::uint64_t num = 1; num < den; ++num) {
    const Angle start(num, den);
    if (start.den() != den) continue;
    std::vector<Angle> orbit{start};
    bool minimal = true;
    for (int k = 1; k < p; ++k) {
      orbit.push_back(orbit.back().doubled());
      if (orbit.back() < start) {
        minimal = false;
        break;
      }
    }
    if (!minimal || orbit.back().doubled() != start) continue;
    std::sort(orbit.begin(), orbit.end());
    if (std::adjacent_find(orbit.begin(), orbit.end()) != orbit.end()) continue;
    bool preserves_order = true;
    const int shift = rotation_numerator(orbit);
    if (shift < 0) continue;
    for (int k = 0; k < p && preserves_order; ++k)
      preserves_order = orbit[(k + shift) % p] == orbit[k].doubled();
    if (preserves_order && shift == q) return RayCycle{p, q, orbit};
  }
  fail(ErrorCode::NotFound, "no rotation cycle for " + std::to_string(q) + "/" + std::to_string(p));
}

SectorCombinatorics sector_combinatorics(int p, int q) {
  const auto cycle = alpha_ray_cycle(p, q);
  std::vector<AngleArc> raw;
  for (int k = 0; k < p; ++k) raw.push_back({cycle.angles[k], cycle.angles[(k + 1) % p]});
  int longest = 0;
  int shortest = 0;
  for (int k = 1; k < p; ++k) {
    if (raw[k].length() > raw[longest].length()) longest = k;
    if (raw[k].length() < raw[shortest].length()) shortest = k;
  }
  SectorCombinatorics out;
  for (int k = 0; k < p; ++k) out.arcs.push_back(raw[(k + longest) % p]);
  out.characteristic = (shortest - longest + p) % p;
  return out;
}

AngleArc z_piece_arc(int p, int q, const std::string& code, int index) {
  const auto sc = sector_combinatorics(p, q);
  if (index < 1 || index >= p) fail(ErrorCode::InvalidArgument, "Z piece index must lie in [1, p - 1]");
  std::vector<AngleArc> v_arcs;
  for (const auto& a : arc_preimages(sc.arcs[sc.characteristic], 1))
    if (sc.arcs[0].contains_arc(a)) v_arcs.push_back(a);
  std::sort(v_arcs.begin(), v_arcs.end(), [](const AngleArc& x, const AngleArc& y) { return x.from < y.from; });
  AngleArc arc{sc.arcs[index].from.plus_half(), sc.arcs[index].to.plus_half()};
  for (auto it = code.rbegin(); it != code.rend(); ++it) {
    if (*it != '+' && *it != '-') fail(ErrorCode::InvalidArgument, "dyadic code uses '+' and '-' only");
    const AngleArc& target = v_arcs[*it == '+' ? 0 : 1];
    bool found = false;
    for (const auto& a : arc_preimages(arc, static_cast<unsigned>(p)))
      if (target.contains_arc(a)) {
        arc = a;
        found = true;
        break;
      }
    if (!found) fail(ErrorCode::NotFound, "no pullback of the Z arc in the selected V arc");
  }
  return arc;
}

double truncation_level(int p, int n, TruncationReading reading) {
  const int e = p * n - 1;
  if (e < 1) fail(ErrorCode::InvalidArgument, "pn - 1 must be positive");
  return reading == TruncationReading::Root ? std::pow(4.0, 1.0 / e) : 4.0 / e;
}

std::string Symbol::to_string() const {
  switch (kind) {
    case Kind::Outside: return "out";
    case Kind::Boundary: return "bd";
    case Kind::Sector: return "Y" + std::to_string(index);
    case Kind::Z: return "Z" + std::to_string(index);
    case Kind::V: return half > 0 ? "V+" : half < 0 ? "V-" : "V0";
  }
  return "?";
}

std::string PieceRef::label() const {
  switch (kind) {
    case PieceKind::Y: return "Y(" + std::to_string(index) + ")";
    case PieceKind::V0: return "V0";
    case PieceKind::X: return "X(" + std::to_string(index) + "," + std::to_string(generation) + ")";
    case PieceKind::Z: return "Z(" + code + "," + std::to_string(index) + ")";
    case PieceKind::Outside: return "Outside";
    case PieceKind::Boundary: return "Boundary";
  }
  return "?";
}

bool PieceRef::same_label(const PieceRef& o) const {
  return kind == o.kind && index == o.index && generation == o.generation && code == o.code;
}

int InitialTiling::sector(Complex z, bool& boundary) const {
  boundary = false;
  Complex w = z;
  const double r2 = near_alpha_radius_ * near_alpha_radius_;
  // Every ray at alpha passes through points this close to it.
  const double tol = config.boundary_tolerance * std::max(1.0, std::abs(alpha));
  if (norm2(z - alpha) <= tol * tol) {
    boundary = true;
    return -1;
  }
  for (int k = 0; norm2(w - alpha) < r2; ++k) {
    if (k >= config.near_alpha_steps) {
      boundary = true;
      return -1;
    }
    w = iterate_n(c, w, p);
  }
  bool near = false;
  const int s = locator_.locate(w, config.boundary_tolerance, near);
  if (near || s < 0) {
    boundary = true;
    return -1;
  }
  return (s - raw_critical_ + p) % p;
}

Symbol InitialTiling::symbol(Complex z) const {
  const auto pot = fast_potential(c, z);
  const double tol = config.boundary_tolerance;
  if (pot.escaped) {
    if (std::abs(pot.g - kLog2) <= tol) return make(Symbol::Kind::Boundary);
    if (pot.g > kLog2) return make(Symbol::Kind::Outside);
  }
  bool boundary = false;
  const int s = sector(z, boundary);
  if (boundary) return make(Symbol::Kind::Boundary);
  if (s != critical_sector) return make(Symbol::Kind::Sector, s);
  const int t = sector(-z, boundary);
  if (boundary) return make(Symbol::Kind::Boundary);
  if (t != critical_sector) return make(Symbol::Kind::Z, t);
  const double h = (z * std::conj(half_axis_)).real();
  const int half = std::abs(h) <= tol * std::max(1.0, std::abs(z)) ? 0 : (h > 0 ? 1 : -1);
  return make(Symbol::Kind::V, 0, half);
}

namespace {

struct CycleRays {
  std::vector<Polyline> rays;  // from the outer equipotential towards the landing point
  std::vector<Complex> landing;
  bool converged = true;
  double tail = 0.0;  // distance of the last kept ray point to its landing point
};

// Rays start near infinity, where the Boettcher map is z - c / (2z) to
// leading order, and are continued by inverse branches only: point n of ray t
// is the preimage of point n - s of ray 2t (s steps per halving) closest to
// point n - 1. Inverse branches contract, so errors shrink.
CycleRays trace_cycle(Complex c, const RayCycle& cycle, const PuzzleConfig& config) {
  const int p = cycle.p;
  const int s = config.rays.steps_per_halving;
  if (s < 2) fail(ErrorCode::InvalidArgument, "steps per halving must be at least 2");
  std::vector<int> image(p);
  for (int k = 0; k < p; ++k) {
    const Angle img = cycle.angles[k].doubled();
    image[k] = static_cast<int>(std::find(cycle.angles.begin(), cycle.angles.end(), img) - cycle.angles.begin());
  }
  const Complex alpha = fixed_points(c).alpha;
  CycleRays out;
  out.rays.resize(p);
  // Kept points resolve each ray to a small fraction of their distance to
  // alpha; only the last s + 1 points of every ray are needed to continue.
  auto keep = [&](int k, Complex z) {
    if (std::abs(z) > kPolygonRadius) return;
    Polyline& ray = out.rays[k];
    const double d2 = norm2(z - alpha);
    if (d2 < config.alpha_disk * config.alpha_disk) return;
    if (ray.empty() || norm2(z - ray.back()) > config.ray_resolution * config.ray_resolution * d2) ray.push_back(z);
  };
  const std::size_t window = static_cast<std::size_t>(s) + 1;
  std::vector<std::vector<Complex>> ring(p, std::vector<Complex>(window));
  for (int k = 0; k < p; ++k)
    for (int n = 0; n < s; ++n) {
      const Complex w = std::polar(std::exp(kStartG * std::exp2(-static_cast<double>(n) / s)),
                                   2.0 * M_PI * cycle.angles[k].turns());
      ring[k][n] = w - c / (2.0 * w);
      keep(k, ring[k][n]);
    }

  const std::size_t fundamental = static_cast<std::size_t>(s) * p;
  const std::size_t start = static_cast<std::size_t>(s);
  const std::size_t cap = start + fundamental * static_cast<std::size_t>(config.max_pullback_cycles);
  std::vector<Complex> segment_start(p);
  std::vector<Complex> next(p);
  std::size_t n = start;
  for (; n < cap; ++n) {
    for (int k = 0; k < p; ++k) {
      const Complex w = ring[image[k]][(n - s) % window];
      const Complex r = std::sqrt(w - c);
      const Complex previous = ring[k][(n - 1) % window];
      next[k] = norm2(r - previous) <= norm2(r + previous) ? r : -r;
    }
    for (int k = 0; k < p; ++k) {
      ring[k][n % window] = next[k];
      keep(k, next[k]);
    }
    // Converged once a full fundamental segment moves less than 1e-13.
    if ((n - start) % fundamental == 0) {
      double moved = 0.0;
      for (int k = 0; k < p; ++k) moved = std::max(moved, std::abs(next[k] - segment_start[k]));
      segment_start = next;
      double gap = 0.0;
      for (int k = 0; k < p; ++k) gap = std::max(gap, std::abs(next[k] - alpha));
      if (n > start + 16 * fundamental && (moved < 1e-13 || gap < 1e-3 * config.landing_tolerance)) break;
    }
  }
  out.converged = n < cap;
  for (int k = 0; k < p; ++k) {
    const Complex land = ring[k][std::min(n, cap - 1) % window];
    out.landing.push_back(land);
    if (out.rays[k].empty()) out.rays[k].push_back(land);
    out.tail = std::max(out.tail, std::abs(out.rays[k].back() - land));
  }
  return out;
}

}  // namespace

InitialTiling build_initial_tiling(Complex c, int p, int q, int dyadic_depth, const PuzzleConfig& config) {
  require_parameter(c);
  if (dyadic_depth < 1 || dyadic_depth > 12) fail(ErrorCode::InvalidArgument, "dyadic depth must lie in [1, 12]");
  InitialTiling t;
  t.c = c;
  t.p = p;
  t.q = q;
  t.dyadic_depth = dyadic_depth;
  t.config = config;
  t.cycle = alpha_ray_cycle(p, q);
  t.equip_level = truncation_level(p, dyadic_depth, config.truncation);
  const auto fp = fixed_points(c);
  t.alpha = fp.alpha;
  t.alpha_prime = -fp.alpha;
  if (std::abs(fp.alpha_multiplier) <= 1.0 + 1e-9)
    fail(ErrorCode::NotInWake, "alpha is not repelling (|multiplier| = " + fmt(std::abs(fp.alpha_multiplier)) + ")");

  auto rays = trace_cycle(c, t.cycle, config);
  for (int k = 0; k < p; ++k) {
    if (std::abs(rays.landing[k] - t.alpha) > config.landing_tolerance) {
      if (!rays.converged && std::abs(rays.landing[k] - t.alpha) > config.landing_tolerance)
        fail(ErrorCode::RayLandingFailure, "ray " + t.cycle.angles[k].to_string() + " did not converge");
      fail(ErrorCode::NotInWake, "ray " + t.cycle.angles[k].to_string() + " lands at " + fmt(rays.landing[k].real()) +
                                     (rays.landing[k].imag() < 0 ? "" : "+") + fmt(rays.landing[k].imag()) +
                                     "i, not at alpha");
    }
  }
  t.near_alpha_radius_ = 2.0 * std::max(rays.tail, config.alpha_disk);

  std::vector<Polyline> sectors;
  std::vector<AngleArc> raw_arcs;
  for (int k = 0; k < p; ++k) {
    const Angle& from = t.cycle.angles[k];
    const Angle& to = t.cycle.angles[(k + 1) % p];
    raw_arcs.push_back({from, to});
    Polyline poly{t.alpha};
    const auto& r0 = rays.rays[k];
    const auto& r1 = rays.rays[(k + 1) % p];
    poly.insert(poly.end(), r0.rbegin(), r0.rend());
    const double a0 = std::arg(r0.front());
    double sweep = std::arg(r1.front()) - a0;
    while (sweep <= 0) sweep += 2.0 * M_PI;
    const int samples = 8 + static_cast<int>(8 * sweep);
    for (int j = 1; j < samples; ++j) poly.push_back(std::polar(kPolygonRadius, a0 + sweep * j / samples));
    poly.insert(poly.end(), r1.begin(), r1.end());
    sectors.push_back(std::move(poly));
  }
  t.rays = std::move(rays.rays);
  for (auto& r : t.rays) r.push_back(t.alpha);
  t.locator_ = RegionLocator(std::move(sectors), config.locator_grid);

  const Complex axis = std::sqrt(-c);
  t.half_axis_ = std::abs(axis) > 0 ? axis / std::abs(axis) : Complex(1.0);

  // Sectors are numbered counterclockwise from the critical one.
  bool boundary = false;
  t.raw_critical_ = t.sector(0.0, boundary);
  if (boundary || t.raw_critical_ < 0) fail(ErrorCode::Undecidable, "critical point on a sector boundary");
  t.critical_sector = 0;
  for (int k = 0; k < p; ++k) t.sector_arcs.push_back(raw_arcs[(k + t.raw_critical_) % p]);
  t.characteristic_sector = t.sector(c, boundary);
  if (boundary || t.characteristic_sector < 0 || t.characteristic_sector == t.critical_sector)
    fail(ErrorCode::NotInWake, "critical value does not lie in a non-critical sector");

  // Symbols of the critical f^p itinerary decide which returns are central.
  Complex w = 0.0;
  for (int j = 0; j <= dyadic_depth; ++j) {
    t.critical_itinerary_.push_back(t.symbol(w));
    w = iterate_n(c, w, p);
  }

  // Catalog in external angles.
  const AngleArc crit_arc = t.sector_arcs[t.critical_sector];
  for (int k = 0; k < p; ++k) {
    PieceRef y;
    y.kind = PieceKind::Y;
    y.index = k;
    y.arcs = {t.sector_arcs[k]};
    y.level = 4.0;
    y.depth = 0;
    t.catalog.push_back(y);
  }
  PieceRef v0;
  v0.kind = PieceKind::V0;
  for (const auto& a : arc_preimages(t.sector_arcs[t.characteristic_sector], 1))
    if (crit_arc.contains_arc(a)) v0.arcs.push_back(a);
  std::sort(v0.arcs.begin(), v0.arcs.end(), [](const AngleArc& x, const AngleArc& y) { return x.from < y.from; });
  v0.level = 2.0;
  v0.depth = 1;
  t.catalog.push_back(v0);

  std::vector<PieceRef> parents;
  for (int k = 0; k < p; ++k) {
    if (k == t.critical_sector) continue;
    PieceRef z;
    z.kind = PieceKind::Z;
    z.index = k;
    z.generation = 1;
    z.arcs = {{t.sector_arcs[k].from.plus_half(), t.sector_arcs[k].to.plus_half()}};
    z.level = 2.0;
    z.depth = 1;
    parents.push_back(z);
    t.catalog.push_back(z);
  }
  for (int n = 2; n <= dyadic_depth; ++n) {
    std::vector<PieceRef> children;
    const int depth = 1 + (n - 1) * p;
    const double g_piece = kLog4 * std::exp2(-depth);
    for (const auto& parent : parents) {
      // Children of a parent come as a pair z, -z, one in each arc of V; the
      // code bit names the arc ('+' for the first in angle order).
      for (const auto& a : arc_preimages(parent.arcs.front(), static_cast<unsigned>(p))) {
        int arc_index = -1;
        for (std::size_t v = 0; v < v0.arcs.size(); ++v)
          if (v0.arcs[v].contains_arc(a)) arc_index = static_cast<int>(v);
        if (arc_index < 0) continue;
        PieceRef child;
        child.kind = PieceKind::Z;
        child.index = parent.index;
        child.generation = n;
        child.code = std::string(1, arc_index == 0 ? '+' : '-') + parent.code;
        child.arcs = {a};
        child.level = std::exp(g_piece);
        child.depth = depth;
        children.push_back(child);
      }
    }
    for (const auto& ch : children) t.catalog.push_back(ch);
    parents = std::move(children);
  }
  for (int k = 0; k <= 1 + (dyadic_depth - 1) * p; ++k) {
    for (int i = 0; i < p; ++i) {
      PieceRef x;
      x.kind = PieceKind::X;
      x.index = i;
      x.generation = k;
      x.level = std::exp(kLog4 * std::exp2(-k));
      x.depth = k;
      t.catalog.push_back(x);
    }
  }
  return t;
}

PieceRef locate_point(const InitialTiling& t, Complex z) {
  const double tol = t.config.boundary_tolerance;
  PieceRef out;
  const auto pot = fast_potential(t.c, z);
  if (pot.escaped && std::abs(pot.g - kLog4) <= tol) {
    out.kind = PieceKind::Boundary;
    return out;
  }
  if (pot.escaped && pot.g > kLog4) return out;
  bool boundary = false;
  const int s = t.sector(z, boundary);
  if (boundary) {
    out.kind = PieceKind::Boundary;
    return out;
  }
  if (s != t.critical_sector) {
    out.kind = PieceKind::Y;
    out.index = s;
    out.level = 4.0;
    return out;
  }
  const int last = 1 + (t.dyadic_depth - 1) * t.p;
  std::string code;
  bool central = true;
  Complex w = z;
  for (int k = 0; k <= last; ++k) {
    const auto pw = fast_potential(t.c, w);
    if (pw.escaped && std::abs(pw.g - kLog2) <= tol) {
      out.kind = PieceKind::Boundary;
      return out;
    }
    if (pw.escaped && pw.g > kLog2) {
      const int i = t.sector(w, boundary);
      if (boundary) {
        out.kind = PieceKind::Boundary;
        return out;
      }
      out.kind = PieceKind::X;
      out.index = i;
      out.generation = k;
      out.depth = k;
      out.level = std::exp(kLog4 * std::exp2(-k));
      return out;
    }
    if (k % t.p == 0 && k < last) {
      const int j = k / t.p;
      const Symbol sym = t.symbol(w);
      if (sym.kind == Symbol::Kind::Boundary) {
        out.kind = PieceKind::Boundary;
        return out;
      }
      if (sym.kind == Symbol::Kind::Z) {
        out.kind = PieceKind::Z;
        out.index = sym.index;
        out.generation = j + 1;
        out.code = code;
        out.depth = 1 + j * t.p;
        out.level = std::exp(kLog4 * std::exp2(-out.depth));
        return out;
      }
      if (sym.kind != Symbol::Kind::V)
        fail(ErrorCode::Undecidable, "f^p itinerary left the critical sector at step " + std::to_string(j));
      if (j >= 1 && !(sym == t.critical_itinerary()[j])) central = false;
      code += sym.half > 0 ? '+' : '-';
    }
    w = w * w + t.c;
  }
  if (!central) fail(ErrorCode::Undecidable, "point stays in off-critical pullbacks of V beyond the catalog depth");
  out.kind = PieceKind::V0;
  out.depth = last;
  out.level = std::exp(kLog4 * std::exp2(-last));
  return out;
}

std::string_view to_string(ComplexNestStop stop) {
  switch (stop) {
    case ComplexNestStop::MaxLevel: return "MaxLevel";
    case ComplexNestStop::LongCascade: return "LongCascade";
    case ComplexNestStop::NoReturn: return "NoReturn";
    case ComplexNestStop::IterateCap: return "IterateCap";
    case ComplexNestStop::Undecidable: return "Undecidable";
    case ComplexNestStop::OrbitEscaped: return "OrbitEscaped";
  }
  return "?";
}

namespace {

// Symbols of the critical orbit, extended on demand. Pieces of the nest are
// stacks of pullback times over V: v_j lies in pull_m(Q) when the symbols of
// v_{j+k} repeat those of v_k for k < m and v_{j+m} lies in Q.
class SymbolicOrbit {
 public:
  explicit SymbolicOrbit(const InitialTiling& t) : t_(t) {
    points_.push_back(0.0);
    symbols_.push_back(t.symbol(0.0));
  }

  Symbol at(std::uint64_t k) {
    while (symbols_.size() <= k) {
      const Complex z = points_.back() * points_.back() + t_.c;
      points_.push_back(z);
      symbols_.push_back(t_.symbol(z));
    }
    return symbols_[k];
  }
  Complex point(std::uint64_t k) {
    at(k);
    return points_[k];
  }
  const std::vector<Symbol>& symbols() const { return symbols_; }

 private:
  const InitialTiling& t_;
  std::vector<Complex> points_;
  std::vector<Symbol> symbols_;
};

enum class Member { Yes, No, Undecided };

Member symbol_match(const Symbol& a, const Symbol& b, bool piece_only) {
  if (!a.decided() || !b.decided()) return Member::Undecided;
  if (a.kind == Symbol::Kind::V && b.kind == Symbol::Kind::V && !piece_only && (a.half == 0 || b.half == 0))
    return Member::Undecided;
  return (piece_only ? a.same_piece(b) : a == b) ? Member::Yes : Member::No;
}

Member in_piece(SymbolicOrbit& orbit, const std::vector<std::uint64_t>& stack, std::uint64_t j) {
  std::uint64_t offset = j;
  for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
    const std::uint64_t m = *it;
    for (std::uint64_t k = 0; k < m; ++k) {
      const Member r = symbol_match(orbit.at(offset + k), orbit.at(k), k == 0);
      if (r != Member::Yes) return r;
    }
    offset += m;
  }
  return symbol_match(orbit.at(offset), orbit.at(0), true);
}

}  // namespace

ComplexNest compute_complex_nest(const InitialTiling& t, const ComplexNestConfig& config) {
  if (config.max_level < 0 || config.max_cascade < 1) fail(ErrorCode::InvalidArgument, "invalid nest configuration");
  ComplexNest out;
  SymbolicOrbit orbit(t);
  std::vector<std::uint64_t> piece;  // pullback times, innermost last
  std::uint64_t depth = 1;
  std::uint64_t search_from = 1;
  auto finish = [&](ComplexNestStop stop, std::string diagnostic) {
    out.stop = stop;
    out.diagnostic = std::move(diagnostic);
    if (config.keep_symbols) out.symbols = orbit.symbols();
    return out;
  };
  for (int l = 0; l < config.max_level; ++l) {
    std::uint64_t m = 0;
    for (std::uint64_t k = search_from;; ++k) {
      if (k > config.iterate_cap) return finish(ComplexNestStop::IterateCap, "iterate cap reached before a return");
      const Symbol s = orbit.at(k);
      if (orbit.point(k) == orbit.point(k - 1))
        return finish(ComplexNestStop::NoReturn, "critical orbit is stationary off the nest");
      if (s.kind == Symbol::Kind::Outside) return finish(ComplexNestStop::OrbitEscaped, "critical orbit escapes at iterate " + std::to_string(k));
      const Member r = in_piece(orbit, piece, k);
      if (r == Member::Undecided)
        return finish(ComplexNestStop::Undecidable, "symbol on a decision surface near iterate " + std::to_string(k));
      if (r == Member::Yes) {
        m = k;
        break;
      }
    }
    ComplexNestLevel level;
    level.level = l;
    level.return_time = m;
    level.depth = depth;
    for (std::uint64_t k = 1; k <= m; ++k) level.witness.push_back(orbit.at(k));
    int cascade = 0;
    for (;;) {
      piece.push_back(m);
      depth += m;
      ++cascade;
      const Member r = in_piece(orbit, piece, m);
      if (r == Member::Undecided)
        return finish(ComplexNestStop::Undecidable, "cascade return at iterate " + std::to_string(m) + " is undecided");
      if (r == Member::No) break;
      if (cascade >= config.max_cascade) {
        level.cascade_len = cascade;
        level.central = true;
        out.levels.push_back(level);
        return finish(ComplexNestStop::LongCascade, "cascade reached the configured cap");
      }
    }
    level.cascade_len = cascade;
    level.central = cascade > 1;
    out.levels.push_back(level);
    search_from = m + 1;
  }
  return finish(ComplexNestStop::MaxLevel, "");
}

std::vector<ComplexNestLevel> complex_principal_nest(Complex c, const InitialTiling& tiling, int max_level,
                                                     int max_cascade) {
  // A fixed critical point returns centrally forever; no tiling is involved.
  if (c == Complex(0.0)) {
    ComplexNestLevel level;
    level.return_time = 1;
    level.cascade_len = max_cascade;
    level.central = true;
    return {level};
  }
  if (std::abs(c - tiling.c) > 1e-15 * std::max(1.0, std::abs(c)))
    fail(ErrorCode::InvalidArgument, "tiling was built for a different parameter");
  ComplexNestConfig config;
  config.max_level = max_level;
  config.max_cascade = max_cascade;
  auto nest = compute_complex_nest(tiling, config);
  switch (nest.stop) {
    case ComplexNestStop::NoReturn: fail(ErrorCode::MisiurewiczNoReturn, nest.diagnostic);
    case ComplexNestStop::OrbitEscaped: fail(ErrorCode::OrbitEscaped, nest.diagnostic);
    case ComplexNestStop::Undecidable:
    case ComplexNestStop::IterateCap: fail(ErrorCode::Undecidable, nest.diagnostic);
    default: break;
  }
  return nest.levels;
}

Itinerary critical_itinerary(const InitialTiling& t, std::size_t n) {
  Itinerary out;
  Complex z = t.c;
  for (std::size_t k = 0; k < n; ++k) {
    PieceRef piece;
    try {
      piece = locate_point(t, z);
    } catch (const Error&) {
      out.truncated = true;
      break;
    }
    out.symbols.push_back(piece);
    if (piece.kind == PieceKind::Outside || piece.kind == PieceKind::Boundary) {
      out.truncated = true;
      break;
    }
    if (piece.kind == PieceKind::V0 && !out.return_index) out.return_index = k;
    z = iterate_n(t.c, z, t.p);
  }
  return out;
}

std::vector<Symbol> critical_symbols(const InitialTiling& t, std::size_t n) {
  std::vector<Symbol> out;
  Complex z = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    z = z * z + t.c;
    out.push_back(t.symbol(z));
    if (!out.back().decided() || out.back().kind == Symbol::Kind::Outside) break;
  }
  return out;
}

}  // namespace parapuzzle
