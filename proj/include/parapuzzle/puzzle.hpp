#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parapuzzle/angle.hpp"
#include "parapuzzle/common.hpp"
#include "parapuzzle/geometry.hpp"
#include "parapuzzle/potential.hpp"

namespace parapuzzle {

/// The period-p cycle of doubling with combinatorial rotation number q/p.
struct RayCycle {
  int p = 0;
  int q = 0;
  std::vector<Angle> angles;  // sorted
};

RayCycle alpha_ray_cycle(int p, int q);

/// Sector arcs of the cycle counterclockwise from the critical sector, which
/// spans the longest arc; the characteristic sector spans the shortest.
struct SectorCombinatorics {
  std::vector<AngleArc> arcs;
  int characteristic = -1;
};

SectorCombinatorics sector_combinatorics(int p, int q);

/// Arc of external angles of the catalog piece Z(code, index): '+' selects the
/// preimage in the first V arc in angle order, the first character the deepest pullback.
AngleArc z_piece_arc(int p, int q, const std::string& code, int index);

/// Reading of the truncating equipotential of a Misiurewicz wake: Root is
/// 4^{1/(pn-1)}, Literal is 4/(pn-1).
enum class TruncationReading { Root, Literal };

double truncation_level(int p, int n, TruncationReading reading);

struct PuzzleConfig {
  /// Only steps_per_halving is used: rays are continued from near infinity
  /// to alpha by the inverse branches of f along the cycle.
  RayConfig rays;
  /// Kept ray vertices are spaced at most this fraction of their distance to alpha.
  double ray_resolution = 0.01;
  /// Ray vertices stop at this distance from alpha; closer points are first
  /// pushed out by f^p, which maps every sector near alpha into itself.
  double alpha_disk = 1e-4;
  double landing_tolerance = 1e-6;
  int max_pullback_cycles = 200000;
  /// Decision surfaces (rays, equipotentials, the half split) closer than this are Boundary.
  double boundary_tolerance = 1e-9;
  int locator_grid = 128;
  int near_alpha_steps = 100000;
  TruncationReading truncation = TruncationReading::Root;
};

/// Depth-1 symbol: the sector Y_i (non-critical), the piece Z_i = -Y_i
/// attached to the co-fixed point, or the central piece V with its half.
struct Symbol {
  enum class Kind : std::uint8_t { Outside, Boundary, Sector, Z, V };
  Kind kind = Kind::Outside;
  std::int8_t index = 0;
  std::int8_t half = 0;  // +1 / -1 for V, 0 on the split

  bool same_piece(const Symbol& o) const { return kind == o.kind && index == o.index; }
  bool operator==(const Symbol& o) const { return kind == o.kind && index == o.index && half == o.half; }
  bool decided() const { return kind != Kind::Boundary; }
  std::string to_string() const;
};

enum class PieceKind { Y, V0, X, Z, Outside, Boundary };

/// Symbolic puzzle piece: arcs of external angles bounding it, truncating level
/// exp(G), pullback depth and the dyadic code of its f^p itinerary.
struct PieceRef {
  PieceKind kind = PieceKind::Outside;
  int index = 0;       // sector i for X, Z
  int generation = 0;  // k for X; n for Z^{(1+(n-1)p)}
  std::string code;    // halves as '+' / '-'
  std::vector<AngleArc> arcs;
  double level = 4.0;
  int depth = 0;

  std::string label() const;
  bool same_label(const PieceRef& o) const;
};

class InitialTiling {
 public:
  Complex c;
  int p = 0;
  int q = 0;
  int dyadic_depth = 0;
  double equip_level = 4.0;
  Complex alpha;
  Complex alpha_prime;
  RayCycle cycle;
  int critical_sector = -1;
  int characteristic_sector = -1;
  std::vector<AngleArc> sector_arcs;
  std::vector<PieceRef> catalog;
  std::vector<Polyline> rays;  // per cycle angle, from radius 8 to alpha
  PuzzleConfig config;

  Symbol symbol(Complex z) const;
  /// Sector index of z among the p sectors cut by the rays at alpha (any
  /// potential below the outer polygon level), or -1 on a ray. Boundary sets flag.
  int sector(Complex z, bool& boundary) const;  // 0 is the critical sector
  const RegionLocator& locator() const { return locator_; }
  double near_alpha_radius() const { return near_alpha_radius_; }
  /// Symbols of f^{pj}(0) for j = 0 .. dyadic_depth.
  const std::vector<Symbol>& critical_itinerary() const { return critical_itinerary_; }

 private:
  friend InitialTiling build_initial_tiling(Complex c, int p, int q, int dyadic_depth, const PuzzleConfig& config);
  RegionLocator locator_;
  int raw_critical_ = 0;
  double near_alpha_radius_ = 0.0;
  Complex half_axis_ = 1.0;
  std::vector<Symbol> critical_itinerary_;
};

/// Traces the p alpha rays, verifies they land together at alpha and builds the catalog.
InitialTiling build_initial_tiling(Complex c, int p, int q, int dyadic_depth, const PuzzleConfig& config = {});

/// Piece of the catalog containing z (Outside for points outside the critical
/// piece Y^(0) of level 4, Boundary near decision surfaces). Throws Undecidable
/// when the f^p itinerary stays undecided for the whole catalog depth.
PieceRef locate_point(const InitialTiling& tiling, Complex z);

/// Pieces of f^{pk}(c), k = 0, 1, ...; truncated when an entry is Outside,
/// Boundary or undecidable.
struct Itinerary {
  std::vector<PieceRef> symbols;
  std::optional<std::size_t> return_index;  // first entry into V0
  bool truncated = false;
};

Itinerary critical_itinerary(const InitialTiling& tiling, std::size_t n);

struct ComplexNestLevel {
  int level = 0;
  std::uint64_t return_time = 0;
  int cascade_len = 1;
  bool central = false;
  /// Depth of the central piece of this level (1 for the base piece).
  std::uint64_t depth = 1;
  /// Symbols of the critical orbit from 1 to return_time, the segment defining the level.
  std::vector<Symbol> witness;
};

enum class ComplexNestStop { MaxLevel, LongCascade, NoReturn, IterateCap, Undecidable, OrbitEscaped };
std::string_view to_string(ComplexNestStop stop);

struct ComplexNest {
  std::vector<ComplexNestLevel> levels;
  ComplexNestStop stop = ComplexNestStop::MaxLevel;
  std::string diagnostic;
  /// Symbols of the critical orbit v_0 .. v_n used by the nest.
  std::vector<Symbol> symbols;
};

struct ComplexNestConfig {
  int max_level = 8;
  int max_cascade = 64;
  std::uint64_t iterate_cap = 10'000'000;
  bool keep_symbols = false;
};

/// Never throws for dynamical outcomes; the stop field reports them.
ComplexNest compute_complex_nest(const InitialTiling& tiling, const ComplexNestConfig& config = {});

/// Nest levels; c = 0 is the immediate infinite cascade. Throws OrbitEscaped, Undecidable or MisiurewiczNoReturn for those stops.
std::vector<ComplexNestLevel> complex_principal_nest(Complex c, const InitialTiling& tiling, int max_level,
                                                     int max_cascade = 64);

/// Symbols of v_1 .. v_n for the tiling's parameter; stops early at the first
/// undecided or Outside symbol (included).
std::vector<Symbol> critical_symbols(const InitialTiling& tiling, std::size_t n);

}  // namespace parapuzzle
