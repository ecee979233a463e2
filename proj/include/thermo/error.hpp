#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace thermo {

enum class ErrorKind {
  InvalidInput,
  EmptySuccessor,
  DuplicateEdge,
  IndexOutOfRange,
  NotSurjective,
  NotBijective,
  InvalidPath,
  InvalidDecomposition,
  ShapeMismatch,
  TooLarge,
  NotStationary,
  NotInvariant,
  ModeUnsupported,
  NotAFunctionOnBlock,
  NotInvariantOnBlock,
  NonUniqueDominantClass,
  ConvergenceFailure,
  ScalingDiverged,
  OutOfDomain,
  MisalignedBreakpoints,
  DegenerateCell,
  NotMarkov,
};

std::string_view to_string(ErrorKind kind);

/// Structured failure raised by every operation in the library.
///
/// `details` carries one entry per individual problem found (for example one
/// `EmptySuccessor(3)` per offending state) so callers can report all of
/// them at once instead of only the first.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::vector<std::string> details = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

  /// True for failures of an iterative solver, as opposed to bad input.
  bool is_convergence_failure() const noexcept {
    return kind_ == ErrorKind::ConvergenceFailure || kind_ == ErrorKind::ScalingDiverged;
  }

 private:
  ErrorKind kind_;
  std::vector<std::string> details_;
};

}  // namespace thermo
