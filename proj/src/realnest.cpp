#include "parapuzzle/realnest.hpp"

#include <quadmath.h>

#include <cmath>
#include <limits>

#include "parapuzzle/dynamics.hpp"

namespace parapuzzle {

namespace {

template <class T>
struct Arith;

template <>
struct Arith<double> {
  static double sqrt(double x) { return std::sqrt(x); }
  static double fma(double a, double b, double c) { return std::fma(a, b, c); }
  static double abs(double x) { return std::fabs(x); }
  static double to_double(double x) { return x; }
  static constexpr double unit_roundoff = 0x1p-53;
  static constexpr Precision precision = Precision::Double;
};

template <>
struct Arith<__float128> {
  static __float128 sqrt(__float128 x) { return sqrtq(x); }
  static __float128 fma(__float128 a, __float128 b, __float128 c) { return fmaq(a, b, c); }
  static __float128 abs(__float128 x) { return fabsq(x); }
  static double to_double(__float128 x) { return static_cast<double>(x); }
  static constexpr double unit_roundoff = 0x1p-113;
  static constexpr Precision precision = Precision::Quad;
};

constexpr double kUnderflow = 1e-280;

struct Status {
  NestStop stop;
  std::string diagnostic;
};

// The computed critical orbit v_k together with the exact rounding residual
// r_k = (v_k^2 + c) - v_{k+1} and a forward error bound against the true orbit.
// Intervals are pulled back as offsets from v_k, so the residuals make every
// pullback exact for the true map even when v_k itself has drifted.
// Orbit storage reused across parameters of one thread; long orbits would
// otherwise fault in fresh pages for every parameter.
template <class T>
struct OrbitStore {
  std::vector<T> v;
  std::vector<T> r;
  std::vector<double> err;

  static OrbitStore& local() {
    thread_local OrbitStore store;
    return store;
  }
};

// One engine per thread and precision is alive at a time.
template <class T>
class Engine {
  using A = Arith<T>;

 public:
  Engine(double c, const RealNestConfig& config)
      : c_(c), config_(config), v_(OrbitStore<T>::local().v), r_(OrbitStore<T>::local().r), err_(OrbitStore<T>::local().err) {
    v_.clear();
    r_.clear();
    err_.clear();
    v_.push_back(T(0));
    r_.push_back(T(0));
    err_.push_back(0.0);
  }

  RealNest run() {
    RealNest out;
    out.c = static_cast<double>(c_);
    out.precision_used = A::precision;
    const T alpha = (T(1) - A::sqrt(T(1) - T(4) * c_)) / T(2);
    T half = -alpha;
    std::uint64_t search_from = 1;
    for (int l = 0; l < config_.max_level; ++l) {
      std::uint64_t m = 0;
      if (auto st = find_return(half, search_from, m)) return finish(out, *st);
      int cascade = 0;
      T inner = half;
      for (;;) {
        T next;
        if (auto st = pull_back(inner, m, next)) return finish(out, *st);
        ++cascade;
        const T vm = A::abs(v_[m]);
        if (grazes(vm, next, m)) return finish(out, {NestStop::Graze, "return at iterate " + std::to_string(m) + " grazes the cascade boundary " + fmt(A::to_double(next))});
        if (!(vm < next)) {
          inner = next;
          break;
        }
        if (cascade >= config_.max_cascade) {
          out.levels.push_back({l, A::to_double(half), m, true, cascade});
          return finish(out, {NestStop::LongCascade, "cascade reached the configured cap"});
        }
        inner = next;
      }
      out.levels.push_back({l, A::to_double(half), m, cascade > 1, cascade});
      out.last_half_width = A::to_double(inner);
      if (out.last_half_width < config_.resolution_floor)
        return finish(out, {NestStop::BelowResolution, "central interval below the resolution floor"});
      half = inner;
      search_from = m + 1;
    }
    return finish(out, {NestStop::MaxLevel, ""});
  }

 private:
  static RealNest finish(RealNest& out, const Status& st) {
    out.stop = st.stop;
    out.diagnostic = st.diagnostic;
    return out;
  }

  bool grazes(T value, T bound, std::uint64_t k) const {
    const double gap = A::to_double(A::abs(value * value - bound * bound));
    const double b = A::to_double(bound);
    double tol = config_.graze_relative * b * b + config_.graze_rounding * A::unit_roundoff;
    if (exact()) tol += 4.0 * err_[k] * (A::to_double(value) + b + err_[k]);
    return gap <= tol;
  }

  bool exact() const { return config_.model == OrbitModel::Exact; }

  // Appends v_{k+1}, its residual and error bound.
  void extend() {
    const T v = v_.back();
    const T p = v * v;
    const T e1 = A::fma(v, v, -p);
    const T s = p + c_;
    const T bb = s - p;
    const T e2 = (p - (s - bb)) + (c_ - bb);
    r_.back() = e1 + e2;
    const double ev = err_.back();
    const double av = A::to_double(A::abs(v));
    err_.push_back((2.0 * av + ev) * ev + A::to_double(A::abs(r_.back())));
    v_.push_back(s);
    r_.push_back(T(0));
  }

  std::optional<Status> find_return(T half, std::uint64_t from, std::uint64_t& m) {
    const double half_d = A::to_double(half);
    for (std::uint64_t k = from;; ++k) {
      if (k > config_.iterate_cap) return Status{NestStop::IterateCap, "iterate cap reached before a return"};
      while (v_.size() <= k) extend();
      const T v = v_[k];
      if (v_[k] == v_[k - 1]) return Status{NestStop::NoReturn, "critical orbit is stationary off the nest"};
      const T av = A::abs(v);
      if (A::to_double(av) > 2.5) return Status{NestStop::NoReturn, "critical orbit escapes"};
      if (exact() && err_[k] >= 0.25 * half_d)
        return Status{NestStop::PrecisionExhausted, "orbit error exceeds the interval at iterate " + std::to_string(k)};
      if (grazes(av, half, k)) return Status{NestStop::Graze, "iterate " + std::to_string(k) + " grazes the nest boundary " + fmt(half_d)};
      if (av < half) {
        m = k;
        return std::nullopt;
      }
    }
  }

  // Half width of the component around 0 of f^{-m}([-half, half]).
  std::optional<Status> pull_back(T half, std::uint64_t m, T& out) const {
    T lo = -half - v_[m];
    T hi = half - v_[m];
    for (std::uint64_t k = m - 1; k >= 1; --k) {
      const T v = v_[k];
      const T r = exact() ? r_[k] : T(0);
      const T t_lo = lo - r;
      const T t_hi = hi - r;
      const T v2 = v * v;
      const T d_lo = v2 + t_lo;
      const T d_hi = v2 + t_hi;
      if (!(d_lo > T(0)) || !(d_hi > T(0)))
        return Status{NestStop::PrecisionExhausted, "pullback of the return at iterate " + std::to_string(m) + " meets the critical point at iterate " + std::to_string(k)};
      const T sign = v > T(0) ? T(1) : T(-1);
      const T e_lo = t_lo / (v + sign * A::sqrt(d_lo));
      const T e_hi = t_hi / (v + sign * A::sqrt(d_hi));
      if (v > T(0)) {
        lo = e_lo;
        hi = e_hi;
      } else {
        lo = e_hi;
        hi = e_lo;
      }
      // Far below any resolvable width: report an empty interval.
      if (A::abs(lo) < T(kUnderflow) && A::abs(hi) < T(kUnderflow)) {
        out = T(0);
        return std::nullopt;
      }
    }
    if (!(lo < T(0)) || !(hi > T(0)))
      return Status{NestStop::PrecisionExhausted, "return at iterate " + std::to_string(m) + " is not a true return"};
    out = A::sqrt(hi);
    return std::nullopt;
  }

  T c_;
  const RealNestConfig& config_;
  std::vector<T>& v_;
  std::vector<T>& r_;
  std::vector<double>& err_;
};

std::optional<RealNest> near_center(double c, const RealNestConfig& config) {
  Complex z = 0.0;
  for (int k = 1; k <= 64; ++k) {
    z = z * z + c;
    if (std::abs(z) < 1e-6) {
      try {
        const Complex center = solve_center(k, c);
        if (std::abs(center - Complex(c)) < config.center_tolerance) {
          RealNest nest;
          nest.c = c;
          nest.stop = NestStop::NearCenter;
          nest.diagnostic = "within tolerance of the period " + std::to_string(k) + " center";
          return nest;
        }
      } catch (const Error&) {
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

bool escalates(NestStop stop) { return stop == NestStop::PrecisionExhausted || stop == NestStop::Graze; }

}  // namespace

std::string_view to_string(NestStop stop) {
  switch (stop) {
    case NestStop::MaxLevel: return "MaxLevel";
    case NestStop::LongCascade: return "LongCascade";
    case NestStop::NearCenter: return "NearCenter";
    case NestStop::NoReturn: return "NoReturn";
    case NestStop::IterateCap: return "IterateCap";
    case NestStop::Graze: return "Graze";
    case NestStop::PrecisionExhausted: return "PrecisionExhausted";
    case NestStop::BelowResolution: return "BelowResolution";
  }
  return "Unknown";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::NonRenormFiniteCascades: return "NonRenormFiniteCascades";
    case Verdict::NonRenormCascadeAt: return "NonRenormCascadeAt";
    case Verdict::LikelyRenormalizable: return "LikelyRenormalizable";
    case Verdict::MisiurewiczNoReturn: return "MisiurewiczNoReturn";
    case Verdict::Undetermined: return "Undetermined";
  }
  return "Unknown";
}

RealNest compute_real_nest(double c, const RealNestConfig& config) {
  if (!std::isfinite(c) || c < -2.0 || c >= -0.75)
    fail(ErrorCode::InvalidArgument, "real nest requires c in [-2, -3/4), got " + fmt(c));
  if (config.max_level < 0 || config.max_cascade < 1 || config.iterate_cap < 1)
    fail(ErrorCode::InvalidArgument, "nest limits must be positive");
  if (auto nest = near_center(c, config)) return *nest;
  if (config.precision == Precision::Quad) return Engine<__float128>(c, config).run();
  RealNest nest = Engine<double>(c, config).run();
  if (config.precision == Precision::Auto && config.model == OrbitModel::Exact && escalates(nest.stop)) return Engine<__float128>(c, config).run();
  return nest;
}

std::vector<RealNestLevel> real_nest(double c, int max_level, int max_cascade) {
  RealNestConfig config;
  config.max_level = max_level;
  config.max_cascade = max_cascade;
  RealNest nest = compute_real_nest(c, config);
  switch (nest.stop) {
    case NestStop::NoReturn: fail(ErrorCode::MisiurewiczNoReturn, nest.diagnostic);
    case NestStop::Graze:
    case NestStop::PrecisionExhausted: fail(ErrorCode::ToleranceFailure, nest.diagnostic);
    case NestStop::IterateCap: fail(ErrorCode::Undecidable, nest.diagnostic);
    default: return nest.levels;
  }
}

NestClassification classify_nest(const RealNest& nest, const RealNestConfig& config) {
  NestClassification out;
  out.levels_computed = static_cast<int>(nest.levels.size());
  for (const auto& level : nest.levels) {
    out.cascade_lengths.push_back(level.cascade_len);
    out.return_times.push_back(level.return_time);
    if (level.central) out.cascade_levels.push_back(level.level);
  }
  out.outside_wake = nest.c >= misiurewicz_d();
  switch (nest.stop) {
    case NestStop::LongCascade:
    case NestStop::NearCenter: out.verdict = Verdict::LikelyRenormalizable; break;
    case NestStop::NoReturn: out.verdict = Verdict::MisiurewiczNoReturn; break;
    case NestStop::Graze:
      out.boundary_graze = true;
      out.verdict = Verdict::Undetermined;
      break;
    case NestStop::IterateCap:
    case NestStop::PrecisionExhausted: out.verdict = Verdict::Undetermined; break;
    case NestStop::BelowResolution:
      out.censored = true;
      out.verdict = out.cascade_levels.empty() ? Verdict::NonRenormFiniteCascades : Verdict::NonRenormCascadeAt;
      break;
    case NestStop::MaxLevel:
      out.verdict = out.cascade_levels.empty() ? Verdict::NonRenormFiniteCascades : Verdict::NonRenormCascadeAt;
      if (out.levels_computed < config.max_level) out.verdict = Verdict::Undetermined;
      break;
  }
  return out;
}

NestClassification classify_parameter(double c, const RealNestConfig& config) {
  return classify_nest(compute_real_nest(c, config), config);
}

GeometricFit fit_geometric(const std::vector<int>& l, const std::vector<double>& y) {
  if (l.size() != y.size() || l.size() < 2) fail(ErrorCode::InsufficientData, "geometric fit needs two points");
  const double n = static_cast<double>(l.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (!(y[i] > 0.0)) fail(ErrorCode::InsufficientData, "geometric fit needs positive values");
    const double x = l[i];
    const double ly = std::log(y[i]);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) fail(ErrorCode::InsufficientData, "geometric fit needs distinct levels");
  const double slope = (n * sxy - sx * sy) / den;
  const double icept = (sy - slope * sx) / n;
  double ss_tot = 0, ss_res = 0;
  const double mean = sy / n;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double ly = std::log(y[i]);
    const double pred = icept + slope * l[i];
    ss_tot += (ly - mean) * (ly - mean);
    ss_res += (ly - pred) * (ly - pred);
  }
  const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return {std::exp(icept), std::exp(slope), r2};
}

ScalingReport scaling_factors(double c, int levels, const RealNestConfig& base) {
  if (levels < 1) fail(ErrorCode::InsufficientLevels, "at least one scaling level is required");
  RealNestConfig config = base;
  config.max_level = levels;
  const RealNest nest = compute_real_nest(c, config);
  if (nest.stop == NestStop::LongCascade || nest.stop == NestStop::NearCenter || nest.stop == NestStop::NoReturn)
    fail(ErrorCode::InsufficientLevels, "nest ends in " + std::string(to_string(nest.stop)));
  std::vector<double> widths;
  for (const auto& level : nest.levels) widths.push_back(level.half_width);
  if (!nest.levels.empty() && nest.last_half_width > 0.0) widths.push_back(nest.last_half_width);
  if (widths.size() < 4) fail(ErrorCode::InsufficientLevels, "fewer than three scaling factors computed");
  ScalingReport report;
  std::vector<int> idx;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    report.lambdas.push_back(widths[l + 1] / widths[l]);
    report.sqrt_sum += std::sqrt(report.lambdas.back());
    idx.push_back(static_cast<int>(l));
  }
  const GeometricFit fit = fit_geometric(idx, report.lambdas);
  report.fit_c = fit.c;
  report.fit_rho = fit.rho;
  report.fit_r2 = fit.r2;
  report.acim_criterion = fit.rho < 1.0 && fit.r2 > 0.9;
  return report;
}

void write_nest_csv(std::ostream& out, const RealNest& nest, bool header) {
  if (header) out << "c,level,a,b,return_time,central,cascade_len\n";
  for (const auto& level : nest.levels)
    out << fmt(nest.c) << ',' << level.level << ',' << fmt(level.a()) << ',' << fmt(level.b()) << ','
        << level.return_time << ',' << (level.central ? "true" : "false") << ',' << level.cascade_len << '\n';
}

}  // namespace parapuzzle
