#pragma once

#include <stdexcept>
#include <string>

namespace invscat {

enum class ErrorKind {
  MalformedGrid,
  ZeroCrossing,
  NonIntegerWinding,
  TailNotResolved,
  NoDecay,
  NonSimpleZero,
  UnwrapAmbiguity,
  KappaCollision,
  IndexMismatch,
  BranchError,
  ZeroModulus,
  NonHerglotz,
  SingularOperator,
  ContractionFailed,
  DivergentTail,
  IterationDiverged,
  PositivityViolated,
  RecursionBreakdown,
  GammaCollision,
  Underflow,
  SingularSystem,
  ZeroResponse,
  ConfigError,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::MalformedGrid: return "MalformedGrid";
    case ErrorKind::ZeroCrossing: return "ZeroCrossing";
    case ErrorKind::NonIntegerWinding: return "NonIntegerWinding";
    case ErrorKind::TailNotResolved: return "TailNotResolved";
    case ErrorKind::NoDecay: return "NoDecay";
    case ErrorKind::NonSimpleZero: return "NonSimpleZero";
    case ErrorKind::UnwrapAmbiguity: return "UnwrapAmbiguity";
    case ErrorKind::KappaCollision: return "KappaCollision";
    case ErrorKind::IndexMismatch: return "IndexMismatch";
    case ErrorKind::BranchError: return "BranchError";
    case ErrorKind::ZeroModulus: return "ZeroModulus";
    case ErrorKind::NonHerglotz: return "NonHerglotz";
    case ErrorKind::SingularOperator: return "SingularOperator";
    case ErrorKind::ContractionFailed: return "ContractionFailed";
    case ErrorKind::DivergentTail: return "DivergentTail";
    case ErrorKind::IterationDiverged: return "IterationDiverged";
    case ErrorKind::PositivityViolated: return "PositivityViolated";
    case ErrorKind::RecursionBreakdown: return "RecursionBreakdown";
    case ErrorKind::GammaCollision: return "GammaCollision";
    case ErrorKind::Underflow: return "Underflow";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::ZeroResponse: return "ZeroResponse";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace invscat
