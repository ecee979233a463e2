#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermo/correspondence.hpp"

namespace thermo {

/// Classes of near-equal log spectral radius are treated as tied within this
/// distance, both here and in the variational layer.
inline constexpr double kDominantTieTolerance = 1e-9;

/// Strongly connected components of a directed graph given by adjacency lists.
/// Component ids are assigned in increasing order of each component's
/// smallest state, so the numbering is independent of traversal order.
struct Components {
  std::vector<int> component_of;
  std::vector<std::vector<int>> members;  // each sorted increasingly

  int count() const { return static_cast<int>(members.size()); }
};

Components strongly_connected_components(const std::vector<std::vector<int>>& adjacency);
Components strongly_connected_components(const FiniteCorrespondence& T);

/// Edge of an irreducible component in local numbering, weight exp(log_weight).
struct WeightedEdge {
  int from = 0;
  int to = 0;
  double log_weight = 0.0;
};

/// gcd of cycle lengths of a strongly connected graph (given in local numbering).
int cyclic_period(int n, const std::vector<WeightedEdge>& edges);

/// Vectors are those of the gauged matrix D^-1 M D with D = diag(exp(gauge)):
/// the Perron vectors of M itself are right * exp(gauge) and left * exp(-gauge).
/// The gauge is zero unless the edge weights span a range wide enough to
/// underflow.
struct PerronVectors {
  double log_radius = 0.0;
  int period = 1;
  int iterations = 0;
  Eigen::VectorXd gauge;
  Eigen::VectorXd right;  // max-norm 1, positive
  Eigen::VectorXd left;   // max-norm 1, positive (empty if not requested)
};

/// Perron root and vectors of an irreducible nonnegative matrix given by its
/// edges, via power iteration in the max norm. Periodic components are handled
/// by averaging the log growth over one period and summing the cycle of iterates.
/// Throws ConvergenceFailure when the iteration cap is hit.
PerronVectors perron_vectors(int n, const std::vector<WeightedEdge>& edges, bool with_left,
                             int max_iterations = 100000);

/// Spectral data of one strongly connected component of the weighted relation.
struct ComponentSpectrum {
  int id = 0;
  std::vector<int> states;
  bool cyclic = false;  // false for a lone state without self-loop
  double log_radius = -std::numeric_limits<double>::infinity();
  int period = 0;
  Eigen::VectorXd gauge;  // local, same convention as PerronVectors
  Eigen::VectorXd right;  // local, only for cyclic components
  Eigen::VectorXd left;
};

struct SpectralPressure {
  double pressure = 0.0;
  std::vector<int> dominant_classes;
  std::vector<ComponentSpectrum> components;

  bool unique() const { return dominant_classes.size() == 1; }
};

/// log of the spectral radius of M_ij = exp(phi(i,j)) [(i,j) edge], taken as the
/// maximum over strongly connected components.
SpectralPressure spectral_pressure(const FiniteCorrespondence& T, const Potential& phi,
                                   bool with_vectors = false);

/// a_n = (1/n) log sum over orbits of length n+1 of exp(S_n phi), n = 1..n_max,
/// via a log-domain transfer recursion.
std::vector<double> path_pressure_sequence(const FiniteCorrespondence& T, const Potential& phi,
                                           int n_max);

// ---- decompositions -------------------------------------------------------

/// Outcome of checking that T is generated by the ordered blocks X_1 -> ... -> X_d.
struct DecompositionReport {
  bool ok = true;
  int violated_condition = 0;  // 1, 3 or 5 when not ok (2 and 4 hold automatically)
  std::string message;
  int witness_state = -1;
  std::optional<Edge> witness_edge;
};

DecompositionReport decomposition_validate(const FiniteCorrespondence& T,
                                           const std::vector<std::vector<int>>& blocks);

struct DecompositionPressure {
  double pressure = 0.0;
  std::vector<double> block_pressures;
};

/// max over blocks of the spectral pressure of the induced sub-relation with the
/// restricted potential. Throws InvalidDecomposition if validation fails.
DecompositionPressure decomposition_pressure(const FiniteCorrespondence& T, const Potential& phi,
                                             const std::vector<std::vector<int>>& blocks);

}  // namespace thermo
