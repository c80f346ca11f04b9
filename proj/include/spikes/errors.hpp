#pragma once
#include <stdexcept>
#include <string>

namespace spikes {

// Failure taxonomy. Validation errors map to CLI exit code 2 (bad input or
// precondition), numerical errors to exit code 3 (computation did not reach
// the required state). Everything carries a short machine-checkable tag.
enum class ErrorKind {
  // validation
  DimensionMismatch,
  NotASaddle,
  BadShape,
  NoOppositePair,
  EmptyFamily,
  UnderResolved,
  SpikeNearBoundary,
  TooClose,
  CacheMiss,
  BadConfig,
  DivergentIntegral,
  // numerical
  NoGroundState,
  ToleranceNotReached,
  NoPlateau,
  NondegeneracyFailed,
  NotConverged,
  LeftDomain,
  LinearSolveStagnation,
  NewtonDiverged,
  TrivialCollapse,
};

inline bool is_validation(ErrorKind k) {
  switch (k) {
    case ErrorKind::DimensionMismatch:
    case ErrorKind::NotASaddle:
    case ErrorKind::BadShape:
    case ErrorKind::NoOppositePair:
    case ErrorKind::EmptyFamily:
    case ErrorKind::UnderResolved:
    case ErrorKind::SpikeNearBoundary:
    case ErrorKind::TooClose:
    case ErrorKind::CacheMiss:
    case ErrorKind::BadConfig:
    case ErrorKind::DivergentIntegral:
      return true;
    default:
      return false;
  }
}

inline const char* tag(ErrorKind k) {
  switch (k) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotASaddle: return "NotASaddle";
    case ErrorKind::BadShape: return "BadShape";
    case ErrorKind::NoOppositePair: return "NoOppositePair";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::UnderResolved: return "UnderResolved";
    case ErrorKind::SpikeNearBoundary: return "SpikeNearBoundary";
    case ErrorKind::TooClose: return "TooClose";
    case ErrorKind::CacheMiss: return "CacheMiss";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::DivergentIntegral: return "DivergentIntegral";
    case ErrorKind::NoGroundState: return "NoGroundState";
    case ErrorKind::ToleranceNotReached: return "ToleranceNotReached";
    case ErrorKind::NondegeneracyFailed: return "NondegeneracyFailed";
    case ErrorKind::NoPlateau: return "NoPlateau";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::LeftDomain: return "LeftDomain";
    case ErrorKind::LinearSolveStagnation: return "LinearSolveStagnation";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::TrivialCollapse: return "TrivialCollapse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind k, const std::string& what)
      : std::runtime_error(std::string(tag(k)) + ": " + what), kind_(k) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& what) {
  throw Error(k, what);
}

inline void require(bool cond, ErrorKind k, const std::string& what) {
  if (!cond) fail(k, what);
}

}  // namespace spikes
