#include "parapuzzle/dynamics.hpp"

#include <cmath>
#include <numeric>

namespace parapuzzle {

void require_parameter(Complex c) {
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
    fail(ErrorCode::InvalidArgument, "parameter must be finite");
  if (std::abs(c) > 8.0) fail(ErrorCode::InvalidArgument, "parameter must satisfy |c| <= 8");
}

Complex iterate(Complex c, Complex z, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) z = quad(c, z);
  return z;
}

FixedPointPair fixed_points(Complex c) {
  require_parameter(c);
  const Complex disc = 1.0 - 4.0 * c;
  if (std::abs(disc) < 1e-14) fail(ErrorCode::DegenerateFixedPoint, "c = 1/4 has a double fixed point");
  const Complex s = std::sqrt(disc);
  const Complex alpha = 0.5 * (1.0 - s);
  return {alpha, 0.5 * (1.0 + s), 2.0 * alpha};
}

CofixedPoint cofixed_point(Complex c) {
  const auto fp = fixed_points(c);
  return {-fp.alpha, std::abs(fp.alpha) < 1e-14};
}

OrbitBuffer critical_orbit(Complex c, std::size_t n, double escape_radius) {
  require_parameter(c);
  if (n < 1) fail(ErrorCode::InvalidArgument, "orbit length must be at least 1");
  if (!(escape_radius >= 2.0)) fail(ErrorCode::InvalidArgument, "escape radius must be at least 2");
  OrbitBuffer orbit;
  orbit.escape_radius = escape_radius;
  orbit.points.reserve(n + 1);
  Complex z = 0.0;
  orbit.points.push_back(z);
  for (std::size_t k = 1; k <= n; ++k) {
    z = quad(c, z);
    orbit.points.push_back(z);
    if (std::abs(z) > escape_radius) {
      orbit.escaped_at = k;
      break;
    }
  }
  return orbit;
}

namespace {

struct Evaluation {
  Complex value;
  Complex derivative;
};

// F(c) = f_c^n(0) and dF/dc by forward accumulation.
Evaluation critical_value_map(Complex c, int n) {
  Complex z = 0.0;
  Complex dz = 0.0;
  for (int k = 0; k < n; ++k) {
    dz = 2.0 * z * dz + 1.0;
    z = z * z + c;
  }
  return {z, dz};
}

template <class Map>
Complex newton(Complex seed, const NewtonConfig& config, Map&& map) {
  Complex c = seed;
  for (int it = 0; it < config.max_iterations; ++it) {
    const Evaluation e = map(c);
    if (!std::isfinite(std::abs(e.value)) || e.derivative == Complex(0.0))
      fail(ErrorCode::NoConvergence, "Newton iteration hit a singular point");
    const Complex step = e.value / e.derivative;
    c -= step;
    if (!std::isfinite(std::abs(c)) || std::abs(c) > config.divergence_radius)
      fail(ErrorCode::NoConvergence, "Newton iteration diverged");
    if (std::abs(step) < config.step_tolerance) return c;
  }
  fail(ErrorCode::NoConvergence, "Newton iteration did not converge");
}

}  // namespace

Complex solve_center(int period, Complex seed, const NewtonConfig& config) {
  if (period < 1) fail(ErrorCode::InvalidArgument, "period must be at least 1");
  require_parameter(seed);
  const Complex c = newton(seed, config, [period](Complex x) { return critical_value_map(x, period); });
  if (std::abs(critical_value_map(c, period).value) >= config.residual_tolerance)
    fail(ErrorCode::NoConvergence, "center residual above tolerance");
  for (int d = 1; d < period; ++d) {
    if (period % d != 0) continue;
    if (std::abs(critical_value_map(c, d).value) < config.period_separation)
      fail(ErrorCode::WrongPeriod, "center has period " + std::to_string(d));
  }
  return c;
}

Complex solve_misiurewicz(int p, int q, int n, Complex seed, const NewtonConfig& config) {
  if (p < 2 || q < 1 || q >= p || std::gcd(p, q) != 1 || n < 1)
    fail(ErrorCode::InvalidArgument, "invalid rotation number or preperiod");
  require_parameter(seed);
  const int steps = p * n;
  // F(mu) = f^{pn}(0) + alpha(mu), alpha' = 1/sqrt(1 - 4 mu).
  auto map = [steps](Complex mu) {
    Evaluation e = critical_value_map(mu, steps);
    const Complex s = std::sqrt(1.0 - 4.0 * mu);
    e.value += 0.5 * (1.0 - s);
    e.derivative += 1.0 / s;
    return e;
  };
  const Complex mu = newton(seed, config, map);
  const auto fp = fixed_points(mu);
  Complex z = 0.0;
  for (int k = 1; k <= steps; ++k) {
    z = z * z + mu;
    if (std::abs(z - fp.alpha) < config.period_separation)
      fail(ErrorCode::LandedOnAlpha, "critical orbit reaches alpha after " + std::to_string(k) + " steps");
  }
  if (std::abs(z + fp.alpha) >= config.residual_tolerance)
    fail(ErrorCode::NoConvergence, "Misiurewicz residual above tolerance");
  return mu;
}

double misiurewicz_d() {
  static const double d = solve_misiurewicz(2, 1, 1, Complex(-1.5, 0.0)).real();
  return d;
}

}  // namespace parapuzzle
