#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "parapuzzle/realnest.hpp"

namespace parapuzzle {

/// Counter-based generator: the value at (seed, index) depends on nothing else.
std::uint64_t splitmix64(std::uint64_t x);
/// Uniform in [0, 1) with 53 random bits.
double uniform_at(std::uint64_t seed, std::uint64_t index);

struct SampleRecord {
  std::uint64_t index = 0;
  double c = 0.0;
  Verdict verdict = Verdict::Undetermined;
  std::vector<int> central_levels;
  int levels_computed = 0;
  /// Grazes, iterate caps and precision loss; excluded from every count.
  bool discarded = false;
  /// The nest stopped at the resolution floor; the sample leaves the risk set there.
  bool censored = false;
};

struct WilsonInterval {
  double estimate = 0.0;
  double low = 0.0;
  double high = 1.0;
};

/// 95% Wilson score interval; (0, 0, 1) for n = 0.
WilsonInterval wilson_interval(std::size_t successes, std::size_t n);

/// dens(Gamma^l | D^l): central returns at level l among samples in play at l.
struct LevelDensity {
  int level = 0;
  std::size_t in_play = 0;
  std::size_t central = 0;
  WilsonInterval density;
};

struct DecayFit {
  double c = 0.0;
  double q = 0.0;
  double r2 = 0.0;
  std::vector<int> levels;
};

struct MeasureConfig {
  RealNestConfig nest;
  int threads = 0;  // 0: hardware concurrency
  /// Levels enter the fit with at least this many samples in play.
  std::size_t min_effective = 30;
};

struct MeasureReport {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  int max_level = 0;
  std::vector<LevelDensity> densities;
  std::optional<DecayFit> decay_fit;
  std::string fit_diagnostic;
  WilsonInterval nr_fraction;
  std::size_t discarded = 0;
  double discard_fraction = 0.0;
  std::size_t censored = 0;
  std::vector<SampleRecord> samples;
};

/// Samples c = lo + (hi - lo) u_k, u_k = uniform_at(seed, k). Throws DomainError
/// unless -2 <= lo < hi <= d; the fit failing is reported in fit_diagnostic.
MeasureReport density_experiment(double lo, double hi, std::size_t n_samples, int max_level, std::uint64_t seed,
                                 const MeasureConfig& config = {});

/// Densities, fit and fractions recounted from the sample records.
void summarize(MeasureReport& report, std::size_t min_effective = 30);

struct NrEstimate {
  WilsonInterval fraction;
  std::size_t samples = 0;
  /// No usable samples: the interval is the trivial one.
  bool degenerate = false;
};

/// Fraction of the usable samples with a non-renormalizable verdict.
NrEstimate nr_measure_estimate(const MeasureReport& report);

struct TailFraction {
  int tail_level = 0;
  std::size_t at_risk = 0;
  std::size_t with_central = 0;
  double fraction = 0.0;
};

struct BorelCantelliResult {
  std::vector<TailFraction> tails;
  bool monotone = false;
  double density_sum = 0.0;
  double geometric_bound = 0.0;
  bool pass = false;
  std::string diagnostic;
};

/// Tails t = tail_level .. max_level - 1 over non-renormalizable samples
/// resolved past t. Throws InsufficientData for tail_level >= max_level or a
/// missing fit.
BorelCantelliResult borel_cantelli_check(const MeasureReport& report, int tail_level);

/// The real renormalization window around the center of the given period:
/// the interval of LikelyRenormalizable verdicts, by bisection.
std::pair<double, double> renormalization_window(int period, double seed, const RealNestConfig& config = {});

void write_measure_json(std::ostream& out, const MeasureReport& report);
void write_samples_csv(std::ostream& out, const MeasureReport& report);
void write_density_svg(std::ostream& out, const MeasureReport& report);

}  // namespace parapuzzle
