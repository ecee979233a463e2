#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace thermo {

/// Ordered pair (from, to) of state indices, i.e. one point of the graph O_2(T).
struct Edge {
  int from = 0;
  int to = 0;
  auto operator<=>(const Edge&) const = default;
};

/// A closed relation on a finite state set: the finite model of a correspondence.
///
/// Edges are stored sorted lexicographically; the position of an edge in that
/// order is its *edge index*, and every edge-valued quantity in the library
/// (potentials, kernels, pair measures) is an Eigen vector over edge indices.
/// Because of the ordering the successor lists form a CSR layout:
/// edges `row_begin(i) .. row_end(i)-1` all leave state `i`.
class FiniteCorrespondence {
 public:
  FiniteCorrespondence() = default;

  /// Checks and builds. Throws Error listing every state without a successor
  /// and every duplicated edge (first kind found decides Error::kind()).
  static FiniteCorrespondence validate(int n_states, std::vector<Edge> edges,
                                       std::vector<std::string> labels = {});

  int size() const noexcept { return n_states_; }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  int row_begin(int state) const { return row_offsets_[static_cast<std::size_t>(state)]; }
  int row_end(int state) const { return row_offsets_[static_cast<std::size_t>(state) + 1]; }
  int out_degree(int state) const { return row_end(state) - row_begin(state); }

  /// Successor states of `state`, increasing.
  std::span<const int> successors(int state) const;
  /// Predecessor states of `state`, increasing.
  const std::vector<int>& predecessors(int state) const {
    return predecessors_[static_cast<std::size_t>(state)];
  }

  std::optional<int> edge_index(int from, int to) const;
  bool has_edge(int from, int to) const { return edge_index(from, to).has_value(); }

  /// Every state has at least one incoming edge (T(X) = X).
  bool is_surjective() const;

  /// Dense 0/1 adjacency matrix.
  Eigen::MatrixXd adjacency() const;

  bool operator==(const FiniteCorrespondence& other) const {
    return n_states_ == other.n_states_ && edges_ == other.edges_;
  }

 private:
  int n_states_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> targets_;
  std::vector<int> row_offsets_;
  std::vector<std::vector<int>> predecessors_;
  std::vector<std::string> labels_;
};

/// Real function on the edges of a correspondence (indexed by edge index).
struct Potential {
  Eigen::VectorXd values;

  static Potential zero(const FiniteCorrespondence& T) {
    return {Eigen::VectorXd::Zero(T.edge_count())};
  }
  static Potential constant(const FiniteCorrespondence& T, double c) {
    return {Eigen::VectorXd::Constant(T.edge_count(), c)};
  }

  double sup_norm() const { return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff(); }
  int size() const { return static_cast<int>(values.size()); }
};

/// Potential of the form psi(x1) - psi(x2) on every edge; adding it to a
/// potential leaves the pressure unchanged.
Potential coboundary(const FiniteCorrespondence& T, const Eigen::VectorXd& state_function);

/// Throws ShapeMismatch unless `phi` lives on the edges of `T`.
void check_potential(const FiniteCorrespondence& T, const Potential& phi);

/// A finite orbit (x_1, ..., x_{n+1}); consecutive pairs are edges.
class Path {
 public:
  static Path make(const FiniteCorrespondence& T, std::vector<int> states);

  const std::vector<int>& states() const noexcept { return states_; }
  int length() const noexcept { return static_cast<int>(states_.size()); }

 private:
  explicit Path(std::vector<int> states) : states_(std::move(states)) {}
  std::vector<int> states_;
};

enum class MapDirection { Forward, Inverse };

/// Graph relation {(x, f(x))} of a self-map, or its transpose for Inverse
/// (which requires f to be onto so that every state keeps a successor).
FiniteCorrespondence from_map(int n_states, const std::vector<int>& successor_of,
                              MapDirection direction);

/// Transpose relation; requires every state to have a predecessor.
FiniteCorrespondence inverse_correspondence(const FiniteCorrespondence& T);

/// phi composed with the pair reversal (x1, x2) -> (x2, x1), living on T^{-1}.
Potential reverse_potential(const FiniteCorrespondence& T, const Potential& phi,
                            const FiniteCorrespondence& T_inverse);

/// S_n phi along the path: sum of phi over consecutive pairs.
double birkhoff_sum(const FiniteCorrespondence& T, const Potential& phi, const Path& path);

struct Relabeled {
  FiniteCorrespondence relation;
  Potential potential;
};

/// Conjugate by the bijection theta: S = {(theta i, theta j)}, psi(theta i, theta j) = phi(i, j).
Relabeled relabel(const FiniteCorrespondence& T, const Potential& phi,
                  const std::vector<int>& theta);

/// Edge e of T is sent to edge `result[e]` of the relabeled relation.
std::vector<int> relabel_edge_map(const FiniteCorrespondence& T, const FiniteCorrespondence& S,
                                  const std::vector<int>& theta);

/// Sub-relation induced on `block` (local indices follow the order of `block`),
/// plus the global edge index of each local edge. Fails with EmptySuccessor
/// if some block state has no successor inside the block.
struct InducedRelation {
  FiniteCorrespondence relation;
  std::vector<int> global_edge;
};
InducedRelation induced_relation(const FiniteCorrespondence& T, const std::vector<int>& block);

}  // namespace thermo
