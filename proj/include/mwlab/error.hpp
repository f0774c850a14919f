#pragma once

#include <stdexcept>
#include <string>

namespace mwlab {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  DomainMismatch,
  DegenerateBody,
  DegenerateNorm,
  NotSPD,
  Singular,
  SolverFailure,
  ParseError,
  SchemaMismatch,
  CubeOutsideDomain,
  BoundViolation,
  NonMonotoneOperator,
  NotInAp,
  ExponentOutOfRange,
  CaseMismatch,
  ZeroNorm,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  // true for failures of a numerical method rather than of the input
  bool is_solver_failure() const {
    return kind_ == ErrorKind::SolverFailure || kind_ == ErrorKind::BoundViolation ||
           kind_ == ErrorKind::NonMonotoneOperator;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

}  // namespace mwlab
