#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "thermo/correspondence.hpp"

namespace thermo {

inline constexpr double kProbabilityTolerance = 1e-12;
inline constexpr double kStationaryTolerance = 1e-10;

/// Probability vector over states.
struct StateMeasure {
  Eigen::VectorXd weights;

  /// Validates nonnegativity and total mass 1 +- 1e-12.
  static StateMeasure make(Eigen::VectorXd weights);
  static StateMeasure dirac(int n_states, int state);
  static StateMeasure uniform(int n_states);

  int size() const { return static_cast<int>(weights.size()); }
};

/// Probability measure on the edges of a correspondence (indexed by edge index).
struct PairMeasure {
  Eigen::VectorXd weights;

  static PairMeasure make(const FiniteCorrespondence& T, Eigen::VectorXd weights);

  Eigen::VectorXd first_marginal(const FiniteCorrespondence& T) const;
  Eigen::VectorXd second_marginal(const FiniteCorrespondence& T) const;
  /// || first marginal - second marginal ||_1
  double marginal_gap(const FiniteCorrespondence& T) const;
  double integrate(const Potential& phi) const { return weights.dot(phi.values); }
};

/// Row-stochastic kernel supported by a correspondence; one probability per edge.
class TransitionKernel {
 public:
  /// Validates rows (sum 1 +- 1e-12, nonnegative).
  static TransitionKernel make(const FiniteCorrespondence& T, Eigen::VectorXd edge_probabilities);
  /// Rows given as (successor, probability) lists; the successors must be edges.
  static TransitionKernel from_rows(const FiniteCorrespondence& T,
                                    const std::vector<std::vector<std::pair<int, double>>>& rows);
  static TransitionKernel uniform(const FiniteCorrespondence& T);
  /// Dirac at the lowest-index successor on every row.
  static TransitionKernel lowest_successor(const FiniteCorrespondence& T);
  /// Q(i,j) = nu(i,j) / mu(i) where mu = first marginal of nu is positive;
  /// lowest-successor Dirac rows elsewhere.
  static TransitionKernel from_pair_measure(const FiniteCorrespondence& T, const PairMeasure& nu);

  const FiniteCorrespondence& relation() const { return relation_; }
  const Eigen::VectorXd& probabilities() const { return probabilities_; }
  double operator()(int from, int to) const;
  Eigen::MatrixXd dense() const;

 private:
  TransitionKernel(FiniteCorrespondence T, Eigen::VectorXd p)
      : relation_(std::move(T)), probabilities_(std::move(p)) {}

  FiniteCorrespondence relation_;
  Eigen::VectorXd probabilities_;
};

/// (mu Q)(j) = sum_i mu(i) Q(i,j)
StateMeasure pushforward(const StateMeasure& mu, const TransitionKernel& Q);

/// (Q f)(i) = sum_j Q(i,j) f(j)
Eigen::VectorXd pullback(const TransitionKernel& Q, const Eigen::VectorXd& f);

/// mu Q^[1] as a measure on edges: nu(i,j) = mu(i) Q(i,j).
PairMeasure pair_measure(const StateMeasure& mu, const TransitionKernel& Q);

/// || mu Q - mu ||_1
double stationarity_gap(const StateMeasure& mu, const TransitionKernel& Q);

/// Distribution of orbits of a fixed length, stored densely (lexicographic order).
struct PathDistribution {
  int length = 1;  // number of coordinates, n + 1
  std::vector<std::vector<int>> paths;
  std::vector<double> weights;

  double total() const;
  /// Law of the first `coordinates` coordinates.
  PathDistribution marginal(int coordinates) const;
  /// Law of coordinates [offset, offset + coordinates).
  PathDistribution window(int offset, int coordinates) const;
};

/// Largest n_states^(n+1) the dense path distribution will enumerate.
inline constexpr double kDensePathLimit = 1e7;

/// mu Q^[n]: weight of (x_1..x_{n+1}) = mu(x_1) prod Q(x_k, x_{k+1}).
PathDistribution chain_distribution(const StateMeasure& start, const TransitionKernel& Q, int n);
PathDistribution chain_distribution(int start_state, const TransitionKernel& Q, int n);

/// One stationary measure per closed class of the kernel's support graph.
std::vector<StateMeasure> stationary_measures(const TransitionKernel& Q);

/// Finite partition of the state set.
struct Partition {
  std::vector<std::vector<int>> cells;

  static Partition make(int n_states, std::vector<std::vector<int>> cells);
  static Partition discrete(int n_states);
};

/// -sum p log p with 0 log 0 = 0.
double shannon_entropy(const Eigen::VectorXd& p);

/// H of the path law over the product partition A^length.
double partition_entropy(const PathDistribution& law, const Partition& partition, int n_states);

/// h_mu(Q) for the discrete partition: -sum mu(i) Q(i,j) log Q(i,j).
double entropy_rate(const StateMeasure& mu, const TransitionKernel& Q);

struct KernelEntropy {
  std::vector<double> sequence;  // (1/n) H_{mu Q^[n-1]}(A^n), n = 1..n_max
  double limit = 0.0;
  /// max |closed form - dense enumeration| over the first terms (discrete partition), or -1
  /// when enumeration was not feasible.
  double cross_check_gap = -1.0;
};

/// Entropy of a stationary (mu, Q). For the discrete partition the sequence is
/// the closed form (H(mu) + (n-1) h)/n and its first six terms are re-derived
/// by dense enumeration; other partitions are enumerated densely.
KernelEntropy kernel_entropy(const StateMeasure& mu, const TransitionKernel& Q, int n_max,
                             const Partition& partition);

/// Transport along the bijection theta: (mu o theta^{-1})(theta i) = mu(i).
StateMeasure relabel_measure(const StateMeasure& mu, const std::vector<int>& theta);

/// Q'(theta i, theta j) = Q(i, j) on the relabeled relation S.
TransitionKernel relabel_kernel(const TransitionKernel& Q, const FiniteCorrespondence& S,
                                const std::vector<int>& theta);

PairMeasure relabel_pair_measure(const FiniteCorrespondence& T, const PairMeasure& nu,
                                 const FiniteCorrespondence& S, const std::vector<int>& theta);

}  // namespace thermo
