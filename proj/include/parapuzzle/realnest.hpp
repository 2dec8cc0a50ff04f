#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "parapuzzle/common.hpp"

namespace parapuzzle {

enum class Precision { Auto, Double, Quad };

/// Computed: the nest of the floating-point critical orbit, each step read as
/// an exact step of a map perturbed by its rounding residual. Exact: residuals
/// are carried so every interval is a true pullback for z^2 + c, and the engine
/// stops once the orbit error bound no longer resolves the current interval.
enum class OrbitModel { Computed, Exact };

struct RealNestConfig {
  int max_level = 8;
  int max_cascade = 64;
  std::uint64_t iterate_cap = 10'000'000;
  Precision precision = Precision::Double;
  OrbitModel model = OrbitModel::Computed;
  /// A comparison |v| < b is a graze when |v^2 - b^2| <= graze_relative * b^2 +
  /// graze_rounding * u, u the unit roundoff: x^2 + c does not resolve squares
  /// finer than that.
  double graze_relative = 1e-9;
  double graze_rounding = 16.0;
  /// Nests stop once the central interval is narrower than this: the next
  /// return would take on the order of 1 / half_width iterates.
  double resolution_floor = 1e-6;
  /// Centers this close to c pre-classify it as renormalizable.
  double center_tolerance = 1e-12;
};

/// One level I^l = [-half_width, half_width] of the real principal nest.
/// The cascade of length cascade_len started by the return at return_time
/// produces I^{l+1}; central means cascade_len > 1.
struct RealNestLevel {
  int level = 0;
  double half_width = 0.0;
  std::uint64_t return_time = 0;
  bool central = false;
  int cascade_len = 1;

  double a() const { return -half_width; }
  double b() const { return half_width; }
};

enum class NestStop {
  MaxLevel,
  LongCascade,
  NearCenter,
  NoReturn,
  IterateCap,
  Graze,
  PrecisionExhausted,
  BelowResolution,
};

std::string_view to_string(NestStop stop);

struct RealNest {
  double c = 0.0;
  std::vector<RealNestLevel> levels;
  /// Half width of the interval produced by the last completed cascade (0 if
  /// none, or if it underflowed).
  double last_half_width = 0.0;
  NestStop stop = NestStop::MaxLevel;
  Precision precision_used = Precision::Double;
  std::string diagnostic;
};

/// Runs the engine and reports how it stopped; never throws for dynamical outcomes.
RealNest compute_real_nest(double c, const RealNestConfig& config = {});

/// Nest levels; throws MisiurewiczNoReturn or ToleranceFailure for the
/// corresponding stops. A long cascade is reported by the final level.
std::vector<RealNestLevel> real_nest(double c, int max_level, int max_cascade = 64);

enum class Verdict {
  NonRenormFiniteCascades,
  NonRenormCascadeAt,
  LikelyRenormalizable,
  MisiurewiczNoReturn,
  Undetermined,
};

std::string_view to_string(Verdict verdict);

struct NestClassification {
  Verdict verdict = Verdict::Undetermined;
  std::vector<int> cascade_levels;
  int levels_computed = 0;
  std::vector<int> cascade_lengths;
  std::vector<std::uint64_t> return_times;
  bool boundary_graze = false;
  /// The nest reached the resolution floor before max_level; the verdict then
  /// describes the resolved depth levels_computed.
  bool censored = false;
  /// c >= d: the critical value never leaves the 1/2 satellite, so the
  /// parameter lies outside the Misiurewicz wake the nest is designed for.
  bool outside_wake = false;

  bool non_renormalizable() const {
    return verdict == Verdict::NonRenormFiniteCascades || verdict == Verdict::NonRenormCascadeAt;
  }
};

NestClassification classify_parameter(double c, const RealNestConfig& config = {});
NestClassification classify_nest(const RealNest& nest, const RealNestConfig& config);

struct ScalingReport {
  std::vector<double> lambdas;
  double sqrt_sum = 0.0;
  double fit_c = 0.0;
  double fit_rho = 0.0;
  double fit_r2 = 0.0;
  bool acim_criterion = false;
};

ScalingReport scaling_factors(double c, int levels, const RealNestConfig& config = {});

/// Least-squares fit log y = log C + l log rho over the given samples.
struct GeometricFit {
  double c = 0.0;
  double rho = 0.0;
  double r2 = 0.0;
};
GeometricFit fit_geometric(const std::vector<int>& l, const std::vector<double>& y);

void write_nest_csv(std::ostream& out, const RealNest& nest, bool header = true);

}  // namespace parapuzzle
