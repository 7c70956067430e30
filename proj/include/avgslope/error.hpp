#pragma once

#include <stdexcept>
#include <string>

namespace avgslope {

enum class ErrorCode {
  AsymmetricMatrix,
  NegativeDistance,
  TriangleViolation,
  DuplicatePoints,
  NonSquareMatrix,
  InvalidWeights,
  InvalidLabels,
  TooFewPoints,
  DegenerateSpace,
  InvalidRadius,
  EmptyCenters,
  EmptyAnchors,
  ZeroDistanceToNonAnchor,
  InvalidParameters,
  EpsilonOutOfRange,
  WeakMeanTooLarge,
  InfeasibleDemand,
  TooLarge,
  SchemaMismatch,
  Unbounded,
  Infeasible,
  SolverFailure,
  NonconvergenceAfterMaxIters,
  ParseError,
  IoError,
};

// Coarse grouping used for process exit codes.
enum class ErrorKind { Validation, Solver, Io };

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::AsymmetricMatrix: return "AsymmetricMatrix";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::TriangleViolation: return "TriangleViolation";
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::NonSquareMatrix: return "NonSquareMatrix";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidLabels: return "InvalidLabels";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateSpace: return "DegenerateSpace";
    case ErrorCode::InvalidRadius: return "InvalidRadius";
    case ErrorCode::EmptyCenters: return "EmptyCenters";
    case ErrorCode::EmptyAnchors: return "EmptyAnchors";
    case ErrorCode::ZeroDistanceToNonAnchor: return "ZeroDistanceToNonAnchor";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::WeakMeanTooLarge: return "WeakMeanTooLarge";
    case ErrorCode::InfeasibleDemand: return "InfeasibleDemand";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::NonconvergenceAfterMaxIters: return "NonconvergenceAfterMaxIters";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

inline ErrorKind error_kind(ErrorCode c) {
  switch (c) {
    case ErrorCode::Unbounded:
    case ErrorCode::Infeasible:
    case ErrorCode::SolverFailure:
    case ErrorCode::NonconvergenceAfterMaxIters:
      return ErrorKind::Solver;
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
    case ErrorCode::SchemaMismatch:
      return ErrorKind::Io;
    default:
      return ErrorKind::Validation;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return error_kind(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace avgslope
