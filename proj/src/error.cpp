#include "mwlab/error.hpp"

namespace mwlab {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::DegenerateBody: return "DegenerateBody";
    case ErrorKind::DegenerateNorm: return "DegenerateNorm";
    case ErrorKind::NotSPD: return "NotSPD";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::CubeOutsideDomain: return "CubeOutsideDomain";
    case ErrorKind::BoundViolation: return "BoundViolation";
    case ErrorKind::NonMonotoneOperator: return "NonMonotoneOperator";
    case ErrorKind::NotInAp: return "NotInAp";
    case ErrorKind::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorKind::CaseMismatch: return "CaseMismatch";
    case ErrorKind::ZeroNorm: return "ZeroNorm";
  }
  return "Error";
}

}  // namespace mwlab
