#include "gmoe/error.hpp"

namespace gmoe {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateState: return "DegenerateState";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::NotCompletelyPositive: return "NotCompletelyPositive";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::TruncationError: return "TruncationError";
    case ErrorKind::InconclusiveTruncation: return "InconclusiveTruncation";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::ProtocolInconsistent: return "ProtocolInconsistent";
  }
  return "Error";
}

}  // namespace gmoe
