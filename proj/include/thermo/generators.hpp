#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "thermo/correspondence.hpp"
#include "thermo/kernel.hpp"

namespace thermo {

using Rng = std::mt19937_64;

/// Every state gets at least one successor; other edges appear with `density`.
FiniteCorrespondence random_relation(Rng& rng, int n_states, double density);

/// Strongly connected and aperiodic: a random Hamiltonian cycle, one self-loop,
/// plus random extra edges.
FiniteCorrespondence random_primitive(Rng& rng, int n_states, double density);

Potential random_potential(Rng& rng, const FiniteCorrespondence& T, double lo = -1.0, double hi = 1.0);

Eigen::VectorXd random_state_function(Rng& rng, int n_states, double lo = -1.0, double hi = 1.0);

/// Uniform on the simplex.
StateMeasure random_measure(Rng& rng, int n_states);

/// A simple cycle found by a random walk from `start` (states in visiting order).
std::vector<int> random_cycle(Rng& rng, const FiniteCorrespondence& T, int start);

/// Random convex combination of uniform measures on random cycles.
StateMeasure random_invariant_measure(Rng& rng, const FiniteCorrespondence& T, int cycles = 3);

/// Row-stochastic kernel with random positive weights on every edge.
TransitionKernel random_kernel(Rng& rng, const FiniteCorrespondence& T);

std::vector<int> random_permutation(Rng& rng, int n);

struct BlockRelation {
  FiniteCorrespondence relation;
  std::vector<std::vector<int>> blocks;
};

/// Disjoint consecutive blocks, each with internal successors for every state,
/// and extra edges only from earlier blocks into later ones.
BlockRelation random_block_relation(Rng& rng, int n_blocks, int min_block, int max_block,
                                    double density);

/// Same block pattern, each block the graph of a random map or the inverse
/// graph of a random permutation; at most `max_cross` forward cross edges.
BlockRelation random_map_blocks(Rng& rng, int n_blocks, int min_block, int max_block, int max_cross);

}  // namespace thermo
