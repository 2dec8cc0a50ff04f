#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "parapuzzle/common.hpp"
#include "parapuzzle/geometry.hpp"
#include "parapuzzle/paraplane.hpp"

namespace parapuzzle {

/// Uniform: square cells over the box of the outer curve. LogPolar: cells of
/// the plane log(z - z0) with z0 inside the inner curve, for annuli whose
/// curves differ greatly in size (the energy is conformally invariant).
enum class ModulusGrid { Uniform, LogPolar };

struct AnnulusSpec {
  Polyline outer;
  Polyline inner;
  int grid_resolution = 512;
  ModulusGrid grid = ModulusGrid::Uniform;
};

/// mod A(r, R) = log(R / r).
struct ModulusEstimate {
  double mod = 0.0;
  double energy = 0.0;
  std::pair<int, int> resolution_pair;  // fine, coarse
  double richardson_error = 0.0;
  int iterations = 0;
};

struct SolverConfig {
  double relative_residual = 1e-8;
  int max_iterations = 100000;
};

ModulusEstimate annulus_modulus(const AnnulusSpec& spec, const SolverConfig& solver = {});

struct WindowPolicy {
  /// Windows from the real slice of the tile (real bases) or from the
  /// previous tile refined once (complex bases).
  double margin_x = 0.65;    // half width / slice length
  double margin_y = 0.45;    // half height / slice length
  double growth = 1.6;       // enlargement on WindowClipped
  int max_enlargements = 4;
  double initial_half_width = 0.05;  // complex bases without a previous tile
};

struct NestModulusEntry {
  int level = 0;
  std::optional<ModulusEstimate> annulus;  // Delta^l minus Delta^{l+1}
  std::optional<ModulusEstimate> central;  // Delta^l minus Pi^l
  /// Modulus change from moving both contours by half a tile cell.
  double contour_error = 0.0;
  std::optional<ErrorCode> error;
  std::string diagnostic;
  std::string central_diagnostic;
};

struct NestModuliResult {
  std::vector<NestModulusEntry> entries;
  /// Tiles of levels first .. first + count, when extracted.
  std::vector<std::optional<TileExtraction>> tiles;
};

/// Entries for l = first .. first + levels - 1.
NestModuliResult nest_moduli(Complex lambda, int levels, const WindowPolicy& policy, int tile_resolution,
                             int modulus_resolution, int first = 1, const ParamTileConfig& config = {});

/// Window for the level-l tile of a real base: the real slice found by
/// marching and bisection on the real axis, padded per the policy.
Box real_slice_window(double base, const TileKey& key, const WindowPolicy& policy, const ParamTileConfig& config);

void write_moduli_csv(std::ostream& out, const NestModuliResult& result);
void write_moduli_svg(std::ostream& out, const NestModuliResult& result);

}  // namespace parapuzzle
