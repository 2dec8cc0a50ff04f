#pragma once

#include <optional>
#include <string>
#include <vector>

#include "parapuzzle/angle.hpp"
#include "parapuzzle/common.hpp"

namespace parapuzzle {

struct PotentialConfig {
  double escape_radius = 1e6;
  int max_iterations = 100000;
  double zero_threshold = 1e-12;
};

/// Green's function value; level is exp(g).
struct PotentialValue {
  double g = 0.0;
  double level = 1.0;
  bool escaped = false;
};

PotentialValue green_dynamical(Complex c, Complex z, const PotentialConfig& config = {});
/// G_M(c) = G_c(c).
PotentialValue green_parameter(Complex c, const PotentialConfig& config = {});

/// Boettcher coordinate by the product formula; valid where the orbit stays far
/// from the critical region (|c / z_k^2| < 1/2 along the orbit).
Complex bottcher_dynamical(Complex c, Complex z);
/// Phi_M(c) = Phi_c(c).
Complex bottcher_parameter(Complex c);

struct Plane {
  enum class Kind { Dynamical, Parameter };
  Kind kind = Kind::Dynamical;
  Complex c = 0.0;

  static Plane dynamical(Complex c) { return {Kind::Dynamical, c}; }
  static Plane parameter() { return {Kind::Parameter, 0.0}; }
  bool is_parameter() const { return kind == Kind::Parameter; }
  std::string name() const { return is_parameter() ? "param" : "dynamical"; }
};

/// Green's function of the plane at a point (parameter plane: G_M).
double plane_green(const Plane& plane, Complex z, const PotentialConfig& config = {});

struct RayConfig {
  int steps_per_halving = 8;
  double land_threshold = 1e-5;
  double tail_tolerance = 1e-7;
  double target_radius = 1e6;
  int newton_iterations = 64;
  double max_potential_jump = 0.5;
};

struct RayTrace {
  Plane plane;
  Angle angle;
  std::vector<Complex> points;
  std::vector<double> potentials;
  std::optional<Complex> landing_point;
  bool landed = false;
  std::optional<ErrorCode> failure;
  std::string diagnostic;
};

/// Traces from potential g_start down to g_end. Numerical failures are reported
/// in the returned trace (failure set, landed false) together with the partial polyline.
RayTrace trace_ray(const Plane& plane, const Angle& angle, double g_start, double g_end,
                   const RayConfig& config = {});

/// Point of the given ray at potential g, found by Newton from guess.
Complex ray_point(const Plane& plane, const Angle& angle, double g, Complex guess, const RayConfig& config = {});

/// Closed polyline (first point repeated at the end) of the equipotential at
/// potential g, sampled at angles k/samples, counterclockwise from angle 0.
std::vector<Complex> trace_equipotential(const Plane& plane, double g, int samples, const RayConfig& config = {});

/// Equipotential arc from angle `from` counterclockwise to `to`, inclusive.
std::vector<Complex> trace_equipotential_arc(const Plane& plane, double g, const Angle& from, const Angle& to,
                                             int samples, Complex start_guess, const RayConfig& config = {});

}  // namespace parapuzzle
