#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace parapuzzle {

using Complex = std::complex<double>;

enum class ErrorCode {
  InvalidArgument,
  DegenerateFixedPoint,
  NoConvergence,
  WrongPeriod,
  LandedOnAlpha,
  NewtonDivergence,
  BranchAmbiguity,
  NotFound,
  NotInWake,
  RayLandingFailure,
  Undecidable,
  OrbitEscaped,
  MisiurewiczNoReturn,
  ToleranceFailure,
  InsufficientLevels,
  SeparationFailure,
  UnderResolved,
  EmptyTile,
  WindowClipped,
  NoisyTile,
  CurvesIntersect,
  TooThin,
  DomainError,
  InsufficientData,
};

std::string_view to_string(ErrorCode code);

/// Domain error raised by every parapuzzle operation. The code identifies the
/// failure class so callers (CLI, measure lab) can map it to verdicts.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

/// Shortest round-trip-safe rendering with 15 significant digits.
std::string fmt(double value);

inline double norm2(Complex z) { return z.real() * z.real() + z.imag() * z.imag(); }

}  // namespace parapuzzle
