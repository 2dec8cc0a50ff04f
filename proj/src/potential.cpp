#include "parapuzzle/potential.hpp"

#include <cmath>
#include <numbers>

#include "parapuzzle/dynamics.hpp"

namespace parapuzzle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// G = 2^-n (log|z_n| + log|1 + c/z_n^2| / 2), the first correction of the Boettcher series.
PotentialValue escape_potential(Complex c, Complex z, const PotentialConfig& config) {
  const double r2 = config.escape_radius * config.escape_radius;
  double scale = 1.0;
  for (int n = 0; n < config.max_iterations; ++n) {
    if (norm2(z) > r2) {
      const double g = scale * (std::log(std::abs(z)) + 0.5 * std::log(std::abs(1.0 + c / (z * z))));
      if (g < config.zero_threshold) return {0.0, 1.0, true};
      return {g, std::exp(g), true};
    }
    z = z * z + c;
    scale *= 0.5;
  }
  return {0.0, 1.0, false};
}

Complex product_bottcher(Complex c, Complex z) {
  Complex phi = z;
  double exponent = 0.5;
  for (int k = 0; k < 60; ++k) {
    const Complex ratio = c / (z * z);
    if (std::abs(ratio) > 0.5) fail(ErrorCode::BranchAmbiguity, "point too close to the filled Julia set");
    phi *= std::pow(1.0 + ratio, exponent);
    z = z * z + c;
    exponent *= 0.5;
    if (std::abs(ratio) * exponent < 1e-18) break;
  }
  return phi;
}

struct LevelEval {
  Complex value;
  Complex derivative;
};

// f^n(z) in the dynamical plane; f_c^n(c) with the c-derivative in the parameter plane.
LevelEval level_map(const Plane& plane, Complex z, int n) {
  if (plane.is_parameter()) {
    Complex w = z;
    Complex dw = 1.0;
    for (int k = 0; k < n; ++k) {
      dw = 2.0 * w * dw + 1.0;
      w = w * w + z;
    }
    return {w, dw};
  }
  Complex w = z;
  Complex dw = 1.0;
  for (int k = 0; k < n; ++k) {
    dw = 2.0 * w * dw;
    w = w * w + plane.c;
  }
  return {w, dw};
}

int level_depth(double g, double radius) {
  const double target = std::log(radius);
  int n = 0;
  while (std::ldexp(g, n) < target && n < 1000) ++n;
  return n;
}

struct SolveResult {
  Complex z;
  bool ok;
};

SolveResult solve_level(const Plane& plane, double g, double phase_turns, int n, Complex guess,
                        const RayConfig& config) {
  const Complex w = std::polar(std::exp(std::ldexp(g, n)), kTwoPi * phase_turns);
  Complex z = guess;
  for (int it = 0; it < config.newton_iterations; ++it) {
    const LevelEval e = level_map(plane, z, n);
    if (!std::isfinite(std::abs(e.value)) || e.derivative == Complex(0.0)) return {z, false};
    const Complex step = (e.value - w) / e.derivative;
    z -= step;
    if (!std::isfinite(std::abs(z))) return {z, false};
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) return {z, true};
  }
  const LevelEval e = level_map(plane, z, n);
  return {z, std::abs(e.value - w) < 1e-9 * std::abs(w)};
}

// Arguments of the high iterates must follow the doubled angle.
bool phases_consistent(const Plane& plane, Complex z, const Angle& angle, double g, int n) {
  Complex w = z;
  const Complex c = plane.is_parameter() ? z : plane.c;
  for (int k = 0; k <= n; ++k) {
    if (std::ldexp(g, k) > std::log(100.0)) {
      const double expected = kTwoPi * angle.doubled_turns(static_cast<unsigned>(k));
      const double diff = std::arg(w * std::polar(1.0, -expected));
      if (std::abs(diff) > 0.5) return false;
    }
    w = w * w + c;
  }
  return true;
}

}  // namespace

PotentialValue green_dynamical(Complex c, Complex z, const PotentialConfig& config) {
  return escape_potential(c, z, config);
}

PotentialValue green_parameter(Complex c, const PotentialConfig& config) { return escape_potential(c, c, config); }

Complex bottcher_dynamical(Complex c, Complex z) { return product_bottcher(c, z); }

Complex bottcher_parameter(Complex c) { return product_bottcher(c, c); }

double plane_green(const Plane& plane, Complex z, const PotentialConfig& config) {
  return plane.is_parameter() ? green_parameter(z, config).g : green_dynamical(plane.c, z, config).g;
}

Complex ray_point(const Plane& plane, const Angle& angle, double g, Complex guess, const RayConfig& config) {
  const int n = level_depth(g, config.target_radius);
  const auto r = solve_level(plane, g, angle.doubled_turns(static_cast<unsigned>(n)), n, guess, config);
  if (!r.ok) fail(ErrorCode::NewtonDivergence, "ray point did not converge");
  return r.z;
}

RayTrace trace_ray(const Plane& plane, const Angle& angle, double g_start, double g_end, const RayConfig& config) {
  if (!(g_start > g_end) || !(g_end >= 0.0))
    fail(ErrorCode::InvalidArgument, "ray potentials must satisfy g_start > g_end >= 0");
  if (g_start > std::log(config.target_radius) + 1e-12)
    fail(ErrorCode::InvalidArgument, "g_start must not exceed log of the escape radius");
  if (config.steps_per_halving < 1) fail(ErrorCode::InvalidArgument, "steps per halving must be positive");

  RayTrace trace;
  trace.plane = plane;
  trace.angle = angle;
  const double ratio = std::exp2(-1.0 / config.steps_per_halving);
  const PotentialConfig pc{config.target_radius, 100000, 0.0};

  // Descend from the escape radius, where the Boettcher map is nearly the
  // identity, to g_start without recording.
  double g = std::log(config.target_radius);
  Complex guess = std::polar(std::exp(g), kTwoPi * angle.turns());
  if (plane.is_parameter()) guess -= 0.5;
  while (g > g_start) {
    g = std::max(g * ratio, g_start);
    const int n = level_depth(g, config.target_radius);
    const auto r = solve_level(plane, g, angle.doubled_turns(static_cast<unsigned>(n)), n, guess, config);
    if (!r.ok) {
      trace.failure = ErrorCode::NewtonDivergence;
      trace.diagnostic = "Newton failed above the starting potential";
      return trace;
    }
    guess = r.z;
  }

  g = g_start;
  for (;;) {
    const bool last = g <= g_end;
    if (last) g = g_end;
    if (g <= 0.0) break;
    const int n = level_depth(g, config.target_radius);
    const auto r = solve_level(plane, g, angle.doubled_turns(static_cast<unsigned>(n)), n, guess, config);
    if (!r.ok) {
      trace.failure = ErrorCode::NewtonDivergence;
      trace.diagnostic = "Newton failed at potential " + fmt(g);
      break;
    }
    const double actual = plane_green(plane, r.z, pc);
    if (std::abs(actual - g) > config.max_potential_jump * g || !phases_consistent(plane, r.z, angle, g, n)) {
      // Below the landing threshold a stalled tail means double precision is
      // exhausted, not that the ray branched.
      const std::size_t m = trace.points.size();
      if (g < config.land_threshold && m >= 2 &&
          std::abs(trace.points[m - 1] - trace.points[m - 2]) < config.tail_tolerance) {
        trace.diagnostic = "precision floor at potential " + fmt(g);
        break;
      }
      trace.failure = ErrorCode::BranchAmbiguity;
      trace.diagnostic = "Newton step left the ray at potential " + fmt(g);
      break;
    }
    trace.points.push_back(r.z);
    trace.potentials.push_back(g);
    // Extrapolating the previous step keeps Newton on the same branch.
    const std::size_t m = trace.points.size();
    guess = m >= 2 ? r.z + (r.z - trace.points[m - 2]) * 0.5 : r.z;
    if (last) break;
    g *= ratio;
  }
  const std::size_t m = trace.points.size();
  if (!trace.failure && m >= 2 && trace.potentials.back() < config.land_threshold &&
      std::abs(trace.points[m - 1] - trace.points[m - 2]) < config.tail_tolerance) {
    trace.landed = true;
    trace.landing_point = trace.points.back();
  }
  return trace;
}

std::vector<Complex> trace_equipotential_arc(const Plane& plane, double g, const Angle& from, const Angle& to,
                                             int samples, Complex start_guess, const RayConfig& config) {
  if (samples < 1) fail(ErrorCode::InvalidArgument, "equipotential needs at least one sample");
  const int n = level_depth(g, config.target_radius);
  const double length = from == to ? 1.0 : arc_length(from, to);
  constexpr int kSub = 4;
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(samples) + 1);
  Complex z = start_guess;
  for (int k = 0; k <= samples * kSub; ++k) {
    const double t = from.turns() + length * k / (samples * kSub);
    double phase = std::ldexp(t, n);
    phase -= std::floor(phase);
    if (k == 0) phase = from.doubled_turns(static_cast<unsigned>(n));
    if (k == samples * kSub) phase = to.doubled_turns(static_cast<unsigned>(n));
    const auto r = solve_level(plane, g, phase, n, z, config);
    if (!r.ok) fail(ErrorCode::NewtonDivergence, "equipotential continuation failed");
    z = r.z;
    if (k % kSub == 0) out.push_back(z);
  }
  return out;
}

std::vector<Complex> trace_equipotential(const Plane& plane, double g, int samples, const RayConfig& config) {
  if (!(g > 0.0)) fail(ErrorCode::InvalidArgument, "equipotential potential must be positive");
  // Above this potential the inverse Boettcher map is w - c/2 + O(1/w) in
  // both planes and Newton starts from it directly.
  constexpr double kDirect = 5.0;
  Complex start = std::exp(g) - (plane.is_parameter() ? 0.5 : 0.5 * plane.c * std::exp(-2 * g));
  if (g < kDirect) {
    const auto ray = trace_ray(plane, Angle(0, 1), kDirect, g, config);
    if (ray.failure || ray.points.empty()) fail(ErrorCode::NewtonDivergence, "could not reach the equipotential");
    start = ray.points.back();
  }
  auto loop = trace_equipotential_arc(plane, g, Angle(0, 1), Angle(0, 1), samples, start, config);
  loop.back() = loop.front();
  return loop;
}

}  // namespace parapuzzle
