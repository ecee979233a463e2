#pragma once

#include <vector>

#include <Eigen/Dense>

#include "thermo/correspondence.hpp"
#include "thermo/kernel.hpp"
#include "thermo/pressure.hpp"

namespace thermo {

enum class StepRule { Backtracking, Fixed };

struct SolverConfig {
  int max_iterations = 10000;
  double tolerance = 1e-8;
  StepRule step_rule = StepRule::Backtracking;
  double divergence_floor = -50.0;
  /// Shift every iterate by its pressure so that P(T, -phi) = 0 throughout.
  bool normalize = false;

  /// Throws InvalidInput unless tolerance > 0 and max_iterations > 0.
  void validate() const;
};

struct EquilibriumPair {
  TransitionKernel kernel;
  StateMeasure measure;
  PairMeasure pair_measure;
  double pressure = 0.0;
  double entropy = 0.0;
  double integral = 0.0;
};

/// Gibbs pair measure of one strongly connected component:
/// nu(i,j) = l_i exp(phi(i,j)) r_j / (rho <l, r>), zero off the component.
/// `spectrum` must come from spectral_pressure(T, phi, true).
PairMeasure gibbs_pair_measure(const FiniteCorrespondence& T, const Potential& phi,
                               const ComponentSpectrum& component);

/// The Gibbs Markov chain of the unique dominant class. Throws
/// NonUniqueDominantClass (details list the tied classes) otherwise.
EquilibriumPair gibbs_equilibrium(const FiniteCorrespondence& T, const Potential& phi);

struct ScalingResult {
  double value = 0.0;
  PairMeasure optimizer;
  int iterations = 0;
  double residual = 0.0;  // L1 marginal error
  bool converged = false;
};

/// P_mu(T, phi): max of h(nu) + <nu, phi> over edge pair measures with both
/// marginals mu, by matrix scaling of exp(phi) on the edges that some feasible
/// pair measure charges. Throws NotInvariant, ScalingDiverged.
ScalingResult measure_pressure(const FiniteCorrespondence& T, const Potential& phi,
                               const StateMeasure& mu);

/// Edges charged by at least one pair measure with both marginals mu.
std::vector<bool> feasible_face(const FiniteCorrespondence& T, const StateMeasure& mu);

struct AbstractEntropy {
  bool minus_infinity = false;
  double value = 0.0;  // meaningful unless minus_infinity
  Potential potential;  // last iterate
  int iterations = 0;
  double residual = 0.0;  // gradient norm at the last iterate
  bool converged = false;
  bool boundary = false;  // nu misses some edge, infimum possibly not attained
};

/// inf over potentials psi of P(T, psi) - <nu, psi>, minimized from psi = 0 with
/// limited-memory quasi-Newton steps and Armijo backtracking (or fixed gradient
/// steps). Returns minus_infinity once the objective drops below the divergence
/// floor. Throws ConvergenceFailure when neither stopping rule is met on an
/// interior instance.
AbstractEntropy abstract_kernel_entropy(const FiniteCorrespondence& T, const PairMeasure& nu,
                                        const SolverConfig& config = {});

struct AbstractPressure {
  double value = 0.0;
  PairMeasure optimizer;
  double temperature = 1.0;  // s of the winning candidate exp(s phi) scaling
  int evaluations = 0;
};

/// Heuristic sup over pair measures with marginals mu of abstract entropy plus
/// integral. Candidates are the scaling solutions for exp(s phi), s on a fixed
/// grid, refined by golden-section search around the best grid point.
AbstractPressure abstract_measure_pressure(const FiniteCorrespondence& T, const Potential& phi,
                                           const StateMeasure& mu, const SolverConfig& config = {});

struct TangentSet {
  std::vector<PairMeasure> extreme_tangents;
  std::vector<int> classes;  // component id of each tangent
  bool is_unique = false;
};

TangentSet tangent_functionals(const FiniteCorrespondence& T, const Potential& phi);

enum class Side { Plus, Minus, Both };

struct DirectionalDerivative {
  double plus = 0.0;   // max over tangents of <nu, psi>
  double minus = 0.0;  // min over tangents
  double difference_plus = 0.0;  // Richardson-extrapolated one-sided differences
  double difference_minus = 0.0;
  double cross_check_gap = 0.0;  // on the requested side(s)
  bool gateaux = false;
};

inline constexpr double kDerivativeAgreement = 1e-4;
inline constexpr double kGateauxTolerance = 1e-8;

DirectionalDerivative directional_derivative(const FiniteCorrespondence& T, const Potential& phi,
                                             const Potential& psi, Side side = Side::Both);

enum class EquilibriumKind { One, Two };

inline constexpr double kEquilibriumGap = 1e-6;
inline constexpr double kTangentHullTolerance = 1e-8;

struct EquilibriumVerdict {
  bool is_equilibrium = false;
  double gap = 0.0;  // +inf when the abstract entropy is -inf
  double hull_distance = 0.0;  // L1 distance of mu Q^[1] to the tangent hull
  bool in_tangent_hull = false;
};

EquilibriumVerdict equilibrium_check(const FiniteCorrespondence& T, const Potential& phi,
                                     const TransitionKernel& Q, const StateMeasure& mu,
                                     EquilibriumKind kind, const SolverConfig& config = {});

}  // namespace thermo
