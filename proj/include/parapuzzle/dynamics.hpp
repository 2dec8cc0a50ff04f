#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "parapuzzle/common.hpp"

namespace parapuzzle {

struct FixedPointPair {
  Complex alpha;
  Complex beta;
  Complex alpha_multiplier;
};

struct CofixedPoint {
  Complex point;
  bool coincides_with_alpha = false;
};

struct OrbitBuffer {
  std::vector<Complex> points;
  std::optional<std::size_t> escaped_at;
  double escape_radius = 1e6;
};

struct NewtonConfig {
  int max_iterations = 200;
  double step_tolerance = 1e-13;
  double divergence_radius = 8.0;
  double residual_tolerance = 1e-12;
  double period_separation = 1e-8;
};

inline constexpr double kDefaultEscapeRadius = 1e6;

/// Rejects non-finite parameters and |c| > 8.
void require_parameter(Complex c);

inline Complex quad(Complex c, Complex z) { return z * z + c; }
Complex iterate(Complex c, Complex z, std::size_t n);

/// alpha is the principal-branch root (1 - sqrt(1 - 4c)) / 2.
FixedPointPair fixed_points(Complex c);
CofixedPoint cofixed_point(Complex c);

OrbitBuffer critical_orbit(Complex c, std::size_t n, double escape_radius = kDefaultEscapeRadius);

/// Superattracting parameter of exact period with |f_c^period(0)| < 1e-12.
Complex solve_center(int period, Complex seed, const NewtonConfig& config = {});

/// Parameter with f^{pn}(0) equal to the co-fixed point -alpha.
Complex solve_misiurewicz(int p, int q, int n, Complex seed, const NewtonConfig& config = {});

/// The real tip of the 1/2 Misiurewicz wake, f_d^2(0) = -alpha_d.
double misiurewicz_d();

}  // namespace parapuzzle
