#include "parapuzzle/measurelab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "parapuzzle/dynamics.hpp"
#include "parapuzzle/report.hpp"

namespace parapuzzle {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform_at(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t bits = splitmix64(splitmix64(seed) ^ splitmix64(index ^ 0xd1b54a32d192ed03ULL));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t n) {
  if (n == 0) return {0.0, 0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
  return {p, successes == 0 ? 0.0 : std::max(0.0, center - half), successes == n ? 1.0 : std::min(1.0, center + half)};
}

namespace {

SampleRecord make_record(std::uint64_t index, double c, const MeasureConfig& config) {
  const NestClassification cls = classify_parameter(c, config.nest);
  SampleRecord r;
  r.index = index;
  r.c = c;
  r.verdict = cls.verdict;
  r.central_levels = cls.cascade_levels;
  r.levels_computed = cls.levels_computed;
  r.discarded = cls.verdict == Verdict::Undetermined;
  r.censored = cls.censored;
  return r;
}

bool has_central_from(const SampleRecord& s, int level) {
  return std::any_of(s.central_levels.begin(), s.central_levels.end(), [&](int l) { return l >= level; });
}

}  // namespace

void summarize(MeasureReport& report, std::size_t min_effective) {
  report.densities.clear();
  report.decay_fit.reset();
  report.fit_diagnostic.clear();
  report.discarded = 0;
  report.censored = 0;
  std::size_t usable = 0, nr = 0;
  for (const auto& s : report.samples) {
    if (s.discarded) {
      ++report.discarded;
      continue;
    }
    ++usable;
    if (s.censored) ++report.censored;
    if (s.verdict == Verdict::NonRenormFiniteCascades || s.verdict == Verdict::NonRenormCascadeAt) ++nr;
  }
  report.discard_fraction =
      report.samples.empty() ? 0.0 : static_cast<double>(report.discarded) / static_cast<double>(report.samples.size());
  report.nr_fraction = wilson_interval(nr, usable);
  for (int l = 0; l < report.max_level; ++l) {
    LevelDensity d;
    d.level = l;
    for (const auto& s : report.samples) {
      if (s.discarded || s.levels_computed <= l) continue;
      ++d.in_play;
      if (std::find(s.central_levels.begin(), s.central_levels.end(), l) != s.central_levels.end()) ++d.central;
    }
    d.density = wilson_interval(d.central, d.in_play);
    report.densities.push_back(d);
  }
  std::vector<int> ls;
  std::vector<double> ys;
  for (const auto& d : report.densities)
    if (d.in_play >= min_effective && d.central > 0) {
      ls.push_back(d.level);
      ys.push_back(d.density.estimate);
    }
  if (report.samples.size() < 100) {
    report.fit_diagnostic = "InsufficientData: fewer than 100 samples";
  } else if (ls.size() < 3) {
    report.fit_diagnostic = "InsufficientData: fewer than 3 levels with " + std::to_string(min_effective) +
                            " samples in play and a central return";
  } else {
    const GeometricFit fit = fit_geometric(ls, ys);
    report.decay_fit = DecayFit{fit.c, fit.rho, fit.r2, ls};
  }
}

MeasureReport density_experiment(double lo, double hi, std::size_t n_samples, int max_level, std::uint64_t seed,
                                 const MeasureConfig& config) {
  const double d = misiurewicz_d();
  if (!(lo >= -2.0 && lo < hi && hi <= d))
    fail(ErrorCode::DomainError, "interval [" + fmt(lo) + ", " + fmt(hi) + ") is not inside [-2, " + fmt(d) + ")");
  if (max_level < 1) fail(ErrorCode::InvalidArgument, "max_level must be positive");
  MeasureReport report;
  report.lo = lo;
  report.hi = hi;
  report.n_samples = n_samples;
  report.seed = seed;
  report.max_level = max_level;
  MeasureConfig cfg = config;
  cfg.nest.max_level = max_level;
  report.samples.resize(n_samples);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < n_samples; k = next++) {
      // The half-open interval: a draw rounding onto hi is folded back to lo.
      double c = lo + (hi - lo) * uniform_at(seed, k);
      if (c >= hi) c = lo;
      report.samples[k] = make_record(k, c, cfg);
    }
  };
  const int threads = config.threads > 0 ? config.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(work);
  }
  summarize(report, config.min_effective);
  return report;
}

NrEstimate nr_measure_estimate(const MeasureReport& report) {
  NrEstimate out;
  std::size_t nr = 0;
  for (const auto& s : report.samples) {
    if (s.discarded) continue;
    ++out.samples;
    if (s.verdict == Verdict::NonRenormFiniteCascades || s.verdict == Verdict::NonRenormCascadeAt) ++nr;
  }
  out.degenerate = out.samples == 0;
  out.fraction = wilson_interval(nr, out.samples);
  return out;
}

BorelCantelliResult borel_cantelli_check(const MeasureReport& report, int tail_level) {
  if (tail_level < 0 || tail_level >= report.max_level)
    fail(ErrorCode::InsufficientData, "tail level " + std::to_string(tail_level) + " is not below max_level " +
                                          std::to_string(report.max_level));
  if (!report.decay_fit) fail(ErrorCode::InsufficientData, "no density fit: " + report.fit_diagnostic);
  BorelCantelliResult out;
  for (int t = tail_level; t < report.max_level; ++t) {
    TailFraction tf;
    tf.tail_level = t;
    for (const auto& s : report.samples) {
      if (s.discarded || s.levels_computed <= t) continue;
      if (s.verdict != Verdict::NonRenormFiniteCascades && s.verdict != Verdict::NonRenormCascadeAt) continue;
      ++tf.at_risk;
      if (has_central_from(s, t)) ++tf.with_central;
    }
    tf.fraction = tf.at_risk ? static_cast<double>(tf.with_central) / static_cast<double>(tf.at_risk) : 0.0;
    out.tails.push_back(tf);
  }
  // Tails with an empty risk set carry no information and are skipped.
  out.monotone = true;
  const TailFraction* last = nullptr;
  for (const auto& tf : out.tails) {
    if (tf.at_risk == 0) continue;
    if (last && tf.fraction > last->fraction) out.monotone = false;
    last = &tf;
  }
  const DecayFit& fit = *report.decay_fit;
  for (const auto& d : report.densities) out.density_sum += d.density.estimate;
  if (fit.q >= 1.0) {
    out.diagnostic = "fitted q = " + fmt(fit.q) + " >= 1: densities do not decay";
    return out;
  }
  const int first = report.densities.empty() ? 0 : report.densities.front().level;
  out.geometric_bound = fit.c * std::pow(fit.q, first) / (1.0 - fit.q);
  const bool dominated = out.density_sum <= out.geometric_bound;
  out.pass = out.monotone && dominated;
  if (!out.monotone) out.diagnostic = "tail fractions increase";
  else if (!dominated) out.diagnostic = "density sum exceeds the fitted geometric series";
  return out;
}

std::pair<double, double> renormalization_window(int period, double seed, const RealNestConfig& config) {
  const double center = solve_center(period, seed).real();
  auto inside = [&](double c) { return classify_parameter(c, config).verdict == Verdict::LikelyRenormalizable; };
  auto edge = [&](double dir) {
    double in = center;
    double step = 1e-9;
    double out = center + dir * step;
    while (inside(out)) {
      in = out;
      step *= 1.5;
      out = center + dir * step;
      if (step > 1.0) fail(ErrorCode::NotFound, "renormalization window does not end");
    }
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (in + out);
      (inside(mid) ? in : out) = mid;
    }
    return in;
  };
  return {edge(-1.0), edge(1.0)};
}

namespace {

Json wilson_json(const WilsonInterval& w) {
  return Json{{"estimate", json_number(w.estimate)}, {"ci_low", json_number(w.low)}, {"ci_high", json_number(w.high)}};
}

}  // namespace

void write_measure_json(std::ostream& out, const MeasureReport& r) {
  Json j;
  j["interval"] = Json::array({json_number(r.lo), json_number(r.hi)});
  j["n_samples"] = r.n_samples;
  j["seed"] = r.seed;
  j["max_level"] = r.max_level;
  Json dens = Json::array();
  for (const auto& d : r.densities) {
    Json e = wilson_json(d.density);
    e["level"] = d.level;
    e["in_play"] = d.in_play;
    e["central"] = d.central;
    dens.push_back(e);
  }
  j["densities"] = dens;
  if (r.decay_fit) {
    j["decay_fit"] = Json{{"C", json_number(r.decay_fit->c)},
                          {"q", json_number(r.decay_fit->q)},
                          {"r2", json_number(r.decay_fit->r2)},
                          {"levels", r.decay_fit->levels}};
  } else {
    j["decay_fit"] = nullptr;
  }
  j["fit_diagnostic"] = r.fit_diagnostic;
  j["nr_fraction"] = wilson_json(r.nr_fraction);
  j["discarded"] = r.discarded;
  j["discard_fraction"] = json_number(r.discard_fraction);
  j["censored"] = r.censored;
  out << j.dump(2) << '\n';
}

void write_samples_csv(std::ostream& out, const MeasureReport& r) {
  out << "index,c,verdict,levels_computed,central_levels,discarded,censored\n";
  for (const auto& s : r.samples) {
    std::string levels;
    for (int l : s.central_levels) levels += (levels.empty() ? "" : " ") + std::to_string(l);
    out << s.index << ',' << fmt(s.c) << ',' << to_string(s.verdict) << ',' << s.levels_computed << ','
        << csv_field(levels) << ',' << (s.discarded ? 1 : 0) << ',' << (s.censored ? 1 : 0) << '\n';
  }
}

void write_density_svg(std::ostream& out, const MeasureReport& r) {
  std::vector<double> x, y;
  for (const auto& d : r.densities)
    if (d.in_play > 0) {
      x.push_back(d.level);
      y.push_back(d.density.estimate);
    }
  write_line_chart_svg(out, "dens(Gamma^l | D^l)", x, y, true);
}

}  // namespace parapuzzle
