#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "parapuzzle/measurelab.hpp"
#include "parapuzzle/paraplane.hpp"
#include "parapuzzle/potential.hpp"
#include "parapuzzle/puzzle.hpp"
#include "parapuzzle/realnest.hpp"

namespace parapuzzle::cli {

/// Malformed configuration or flags; reported as a usage error.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double land_threshold = 1e-5;
  double tail_tolerance = 1e-7;
  int steps_per_halving = 8;
  std::uint64_t iterate_cap = 10'000'000;
  int max_cascade = 64;
  double resolution_floor = 1e-6;
  /// "power" is the root reading 4^{1/(pn-1)}, "literal" is 4/(pn-1).
  TruncationReading truncation = TruncationReading::Root;
  int tile_resolution = 256;
  int modulus_resolution = 512;
  std::uint64_t seed = 42;
  int threads = 0;
  std::string output_dir = ".";

  RayConfig rays() const;
  RealNestConfig nest(int max_level) const;
  PuzzleConfig puzzle() const;
  ParamTileConfig tiles() const;
  MeasureConfig measure() const;
};

/// Sets one key ("section.key" or bare key); throws UsageError.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// TOML-style file: "key = value" lines, "[section]" headers prefixing keys,
/// '#' comments and optionally quoted string values.
void load_config_file(RunConfig& config, const std::string& path);

/// All caps and resolutions positive.
void validate(const RunConfig& config);

}  // namespace parapuzzle::cli
