#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "thermo/correspondence.hpp"
#include "thermo/kernel.hpp"
#include "thermo/rational.hpp"

namespace thermo {

enum class InvarianceMode { Lp, Subsets, Both };

/// Subsets mode enumerates 2^n subsets; refused above this size.
inline constexpr int kSubsetModeLimit = 16;
/// Vertex enumeration of the pair-measure polytope is refused above this edge count.
inline constexpr int kExtremeEdgeLimit = 24;

struct InvarianceReport {
  bool invariant = false;
  /// Feasible pair measure with both marginals mu (lp / both modes, when invariant).
  std::optional<PairMeasure> witness;
  /// A subset with mu(A) > mu(T^{-1} A) (subsets / both modes, when not invariant).
  std::optional<std::vector<int>> violating_subset;
};

/// T^{-1}(A) = { x : T(x) meets A }.
std::vector<int> preimage(const FiniteCorrespondence& T, const std::vector<int>& subset);

/// Decides mu in P_T(X). Both mode runs the LP and the subset test and throws
/// ConvergenceFailure if they disagree.
InvarianceReport is_invariant(const StateMeasure& mu, const FiniteCorrespondence& T,
                              InvarianceMode mode = InvarianceMode::Lp);

/// Kernel obtained from an invariance witness by row normalization.
TransitionKernel witness_kernel(const FiniteCorrespondence& T, const PairMeasure& witness);

using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

/// Extreme points of the invariant-measure polytope, exact and sorted lexicographically.
std::vector<RationalVector> invariant_polytope_extremes_exact(const FiniteCorrespondence& T);
std::vector<StateMeasure> invariant_polytope_extremes(const FiniteCorrespondence& T);

struct Atom {
  double weight = 0.0;
  StateMeasure measure;
};

/// Convex decomposition of mu over the extreme points using as few atoms as
/// possible; among minimal supports the lexicographically first index set wins.
std::vector<Atom> extremal_decomposition(const StateMeasure& mu, const FiniteCorrespondence& T);

enum class LiftVariant { Forward, Inverse };

struct HatLift {
  StateMeasure measure;
  TransitionKernel kernel;
};

/// Extends a measure on the block Y by zero and builds an invariant kernel.
/// Forward: T restricted to Y is the graph of a map f and mu is f-invariant.
/// Inverse: T restricted to Y is the inverse graph of a map g and mu is g-invariant.
/// `block_measure` is indexed by position in `block`.
HatLift hat_lift(const Eigen::VectorXd& block_measure, const std::vector<int>& block,
                 const FiniteCorrespondence& T, LiftVariant variant);

}  // namespace thermo
