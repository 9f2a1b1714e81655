#include "hl/error.hpp"

namespace hl {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnsupportedAlphabet: return "unsupported-alphabet";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::UnknownNode: return "unknown-node";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::CapExceeded: return "cap-exceeded";
    case ErrorKind::OracleContradiction: return "oracle-contradiction";
    case ErrorKind::Incompatibility: return "incompatibility";
    case ErrorKind::PreconditionViolation: return "precondition-violation";
    case ErrorKind::InsufficientSpread: return "insufficient-spread";
    case ErrorKind::Internal: return "internal";
  }
  return "internal";
}

}  // namespace hl
