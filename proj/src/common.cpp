#include "parapuzzle/common.hpp"

#include <cstdio>

namespace parapuzzle {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateFixedPoint: return "DegenerateFixedPoint";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::WrongPeriod: return "WrongPeriod";
    case ErrorCode::LandedOnAlpha: return "LandedOnAlpha";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::NotInWake: return "NotInWake";
    case ErrorCode::RayLandingFailure: return "RayLandingFailure";
    case ErrorCode::Undecidable: return "Undecidable";
    case ErrorCode::OrbitEscaped: return "OrbitEscaped";
    case ErrorCode::MisiurewiczNoReturn: return "MisiurewiczNoReturn";
    case ErrorCode::ToleranceFailure: return "ToleranceFailure";
    case ErrorCode::InsufficientLevels: return "InsufficientLevels";
    case ErrorCode::SeparationFailure: return "SeparationFailure";
    case ErrorCode::UnderResolved: return "UnderResolved";
    case ErrorCode::EmptyTile: return "EmptyTile";
    case ErrorCode::WindowClipped: return "WindowClipped";
    case ErrorCode::NoisyTile: return "NoisyTile";
    case ErrorCode::CurvesIntersect: return "CurvesIntersect";
    case ErrorCode::TooThin: return "TooThin";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InsufficientData: return "InsufficientData";
  }
  return "Unknown";
}

std::string fmt(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

}  // namespace parapuzzle
