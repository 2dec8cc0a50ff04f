#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "parapuzzle/angle.hpp"
#include "parapuzzle/common.hpp"
#include "parapuzzle/geometry.hpp"
#include "parapuzzle/potential.hpp"
#include "parapuzzle/puzzle.hpp"

namespace parapuzzle {

/// Landing point of a parameter ray traced to potentials near 1e-300, by a
/// cubic fit in 1 / log(1/g): parabolic landings converge like 1 / log(1/g).
struct RayLanding {
  Complex point;
  /// Distance between the cubic and quadratic fits.
  double spread = 0.0;
  /// Distance of the last traced point from the landing point.
  double tail_gap = 0.0;
};

RayLanding parameter_ray_landing(const RayTrace& trace);

struct Wake {
  enum class Kind { Parabolic, Misiurewicz };
  Kind kind = Kind::Parabolic;
  int p = 0;
  int q = 0;
  std::string code;  // sigma in '+' / '-'
  int index = 0;     // i
  Complex landing_param;
  std::pair<Angle, Angle> boundary_angles;
  double truncation_level = 4.0;
  std::array<RayTrace, 2> rays;
  Polyline equipotential;  // from the first boundary ray counterclockwise to the second
  /// Distance between the two ray landings.
  double landing_gap = 0.0;
};

/// The q/p wake of the main cardioid, truncated at parameter level 4.
Wake wake_boundary(int p, int q, const RayConfig& rays = {});

/// The wake of the Misiurewicz parameter with f^{pn}(0) = alpha', n = |code| + 1,
/// reached through the piece Z(code, index); truncated per the reading.
Wake misiurewicz_wake(int p, int q, const std::string& code, int index,
                      TruncationReading reading = TruncationReading::Root, const RayConfig& rays = {});

void write_wake_csv(std::ostream& out, const Wake& wake);

struct WindingResult {
  long w = 0;
  double min_separation = 0.0;
  std::size_t samples = 0;
  /// Total argument increment in turns.
  double increment = 0.0;
};

/// Winding number of phi - psi along a closed loop (first sample = last).
WindingResult winding_number(const std::vector<Complex>& loop, const std::vector<Complex>& phi,
                             const std::vector<Complex>& psi);

/// The level-l combinatorics of a parameter: return times and cascade lengths
/// of levels below l, the level-l return time and the critical symbols up to it.
struct TileKey {
  int level = 0;
  std::vector<std::uint64_t> return_times;  // levels 0 .. l
  std::vector<int> cascades;                // levels 0 .. l-1
  std::vector<Symbol> witness;              // v_1 .. v_{m_l}
  std::string to_string() const;
};

struct ParamTileConfig {
  /// Per-cell tilings: coarse rays and locator suffice for symbol reading.
  PuzzleConfig puzzle = coarse_puzzle();
  int p = 2;
  int q = 1;
  double max_unknown_fraction = 0.05;
  int threads = 0;  // 0: hardware concurrency
  int max_cascade = 64;

  static PuzzleConfig coarse_puzzle() {
    PuzzleConfig c;
    c.locator_grid = 16;
    c.ray_resolution = 0.05;
    return c;
  }
};

enum class CellVerdict : std::uint8_t { Outside, Member, Unknown };

struct CellEvaluation {
  CellVerdict tile = CellVerdict::Outside;
  CellVerdict central = CellVerdict::Outside;
};

/// The key of the base parameter; throws EmptyTile when its nest does not
/// resolve the level.
TileKey tile_key(Complex base, int level, const ParamTileConfig& config = {});
/// Membership of a parameter in the tile and its central subtile.
CellEvaluation evaluate_cell(Complex mu, const TileKey& key, const ParamTileConfig& config = {});

struct ParamTile {
  int level = 0;
  Complex base;
  bool central_only = false;
  TileKey key;
  Raster mask;
  Raster unknown;
  double unknown_fraction = 0.0;
  Polyline outer_contour;
  std::vector<Polyline> inner_contours;
  std::optional<Complex> center;
};

/// Central subtile: the component of the base when its level-l return is
/// central, else the largest central component inside the tile.
ParamTile extract_param_tile(Complex base, int level, const Box& window, int resolution, bool central_only,
                             const ParamTileConfig& config = {});

/// Tile and central subtile from one grid evaluation; subtile failures are
/// reported without failing the tile.
struct TileExtraction {
  ParamTile tile;
  std::optional<ParamTile> subtile;
  std::optional<ErrorCode> subtile_code;
  std::string subtile_error;
};

TileExtraction extract_tile_and_subtile(Complex base, int level, const Box& window, int resolution,
                                        const ParamTileConfig& config = {});

void write_tile_json(std::ostream& out, const ParamTile& tile);
void write_tile_svg(std::ostream& out, const std::vector<const ParamTile*>& tiles);

}  // namespace parapuzzle
