#include "thermo/error.hpp"

namespace thermo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::EmptySuccessor: return "EmptySuccessor";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NotSurjective: return "NotSurjective";
    case ErrorKind::NotBijective: return "NotBijective";
    case ErrorKind::InvalidPath: return "InvalidPath";
    case ErrorKind::InvalidDecomposition: return "InvalidDecomposition";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NotStationary: return "NotStationary";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::ModeUnsupported: return "ModeUnsupported";
    case ErrorKind::NotAFunctionOnBlock: return "NotAFunctionOnBlock";
    case ErrorKind::NotInvariantOnBlock: return "NotInvariantOnBlock";
    case ErrorKind::NonUniqueDominantClass: return "NonUniqueDominantClass";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::ScalingDiverged: return "ScalingDiverged";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::MisalignedBreakpoints: return "MisalignedBreakpoints";
    case ErrorKind::DegenerateCell: return "DegenerateCell";
    case ErrorKind::NotMarkov: return "NotMarkov";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::vector<std::string> details)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      details_(std::move(details)) {}

}  // namespace thermo
