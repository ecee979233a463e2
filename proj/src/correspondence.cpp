#include "thermo/correspondence.hpp"

#include <algorithm>
#include <sstream>

#include "thermo/error.hpp"

namespace thermo {

namespace {

std::string edge_text(const Edge& e) {
  std::ostringstream os;
  os << "(" << e.from << "," << e.to << ")";
  return os.str();
}

}  // namespace

FiniteCorrespondence FiniteCorrespondence::validate(int n_states, std::vector<Edge> edges,
                                                    std::vector<std::string> labels) {
  if (n_states < 1) {
    throw Error(ErrorKind::InvalidInput, "n_states must be at least 1");
  }
  for (const Edge& e : edges) {
    if (e.from < 0 || e.from >= n_states || e.to < 0 || e.to >= n_states) {
      throw Error(ErrorKind::IndexOutOfRange, "edge " + edge_text(e) + " outside [0, " +
                                                  std::to_string(n_states) + ")");
    }
  }
  if (!labels.empty() && static_cast<int>(labels.size()) != n_states) {
    throw Error(ErrorKind::ShapeMismatch, "labels must have one entry per state");
  }

  std::sort(edges.begin(), edges.end());
  std::vector<std::string> problems;
  std::optional<ErrorKind> first;
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k] == edges[k - 1] && (k < 2 || edges[k - 2] != edges[k])) {
      problems.push_back("DuplicateEdge" + edge_text(edges[k]));
      first = first.value_or(ErrorKind::DuplicateEdge);
    }
  }
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  FiniteCorrespondence T;
  T.n_states_ = n_states;
  T.row_offsets_.assign(static_cast<std::size_t>(n_states) + 1, 0);
  for (const Edge& e : edges) ++T.row_offsets_[static_cast<std::size_t>(e.from) + 1];
  for (int i = 0; i < n_states; ++i) {
    T.row_offsets_[i + 1] += T.row_offsets_[i];
  }
  for (int i = 0; i < n_states; ++i) {
    if (T.row_offsets_[i + 1] == T.row_offsets_[i]) {
      problems.push_back("EmptySuccessor(" + std::to_string(i) + ")");
      first = first.value_or(ErrorKind::EmptySuccessor);
    }
  }
  if (first) {
    std::string message = "invalid correspondence:";
    for (const auto& p : problems) message += " " + p;
    throw Error(*first, message, problems);
  }

  T.predecessors_.assign(static_cast<std::size_t>(n_states), {});
  T.targets_.reserve(edges.size());
  for (const Edge& e : edges) {
    T.targets_.push_back(e.to);
    T.predecessors_[static_cast<std::size_t>(e.to)].push_back(e.from);
  }
  T.edges_ = std::move(edges);
  T.labels_ = std::move(labels);
  return T;
}

std::span<const int> FiniteCorrespondence::successors(int state) const {
  const auto begin = static_cast<std::size_t>(row_begin(state));
  return {targets_.data() + begin, static_cast<std::size_t>(out_degree(state))};
}

std::optional<int> FiniteCorrespondence::edge_index(int from, int to) const {
  if (from < 0 || from >= n_states_) return std::nullopt;
  const auto succ = successors(from);
  const auto it = std::lower_bound(succ.begin(), succ.end(), to);
  if (it == succ.end() || *it != to) return std::nullopt;
  return row_begin(from) + static_cast<int>(it - succ.begin());
}

bool FiniteCorrespondence::is_surjective() const {
  return std::all_of(predecessors_.begin(), predecessors_.end(),
                     [](const auto& p) { return !p.empty(); });
}

Eigen::MatrixXd FiniteCorrespondence::adjacency() const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_states_, n_states_);
  for (const Edge& e : edges_) A(e.from, e.to) = 1.0;
  return A;
}

Potential coboundary(const FiniteCorrespondence& T, const Eigen::VectorXd& state_function) {
  if (state_function.size() != T.size()) {
    throw Error(ErrorKind::ShapeMismatch, "state function size differs from state count");
  }
  Potential out = Potential::zero(T);
  for (int e = 0; e < T.edge_count(); ++e) {
    out.values[e] = state_function[T.edge(e).from] - state_function[T.edge(e).to];
  }
  return out;
}

void check_potential(const FiniteCorrespondence& T, const Potential& phi) {
  if (phi.size() != T.edge_count()) {
    throw Error(ErrorKind::ShapeMismatch, "potential has " + std::to_string(phi.size()) +
                                              " values for " + std::to_string(T.edge_count()) +
                                              " edges");
  }
}

Path Path::make(const FiniteCorrespondence& T, std::vector<int> states) {
  if (states.empty()) throw Error(ErrorKind::InvalidPath, "empty path");
  for (int s : states) {
    if (s < 0 || s >= T.size()) throw Error(ErrorKind::InvalidPath, "state out of range");
  }
  for (std::size_t k = 1; k < states.size(); ++k) {
    if (!T.has_edge(states[k - 1], states[k])) {
      throw Error(ErrorKind::InvalidPath, "(" + std::to_string(states[k - 1]) + "," +
                                              std::to_string(states[k]) + ") is not an edge");
    }
  }
  return Path(std::move(states));
}

FiniteCorrespondence from_map(int n_states, const std::vector<int>& successor_of,
                              MapDirection direction) {
  if (static_cast<int>(successor_of.size()) != n_states) {
    throw Error(ErrorKind::ShapeMismatch, "map must give exactly one image per state");
  }
  std::vector<Edge> edges;
  std::vector<bool> hit(static_cast<std::size_t>(std::max(n_states, 0)), false);
  for (int x = 0; x < n_states; ++x) {
    const int fx = successor_of[static_cast<std::size_t>(x)];
    if (fx < 0 || fx >= n_states) throw Error(ErrorKind::IndexOutOfRange, "map image out of range");
    hit[static_cast<std::size_t>(fx)] = true;
    edges.push_back(direction == MapDirection::Forward ? Edge{x, fx} : Edge{fx, x});
  }
  if (direction == MapDirection::Inverse &&
      !std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) {
    throw Error(ErrorKind::NotSurjective, "inverse graph needs an onto map");
  }
  return FiniteCorrespondence::validate(n_states, std::move(edges));
}

FiniteCorrespondence inverse_correspondence(const FiniteCorrespondence& T) {
  if (!T.is_surjective()) {
    throw Error(ErrorKind::NotSurjective, "some state has no predecessor");
  }
  std::vector<Edge> edges;
  edges.reserve(T.edges().size());
  for (const Edge& e : T.edges()) edges.push_back({e.to, e.from});
  return FiniteCorrespondence::validate(T.size(), std::move(edges), T.labels());
}

Potential reverse_potential(const FiniteCorrespondence& T, const Potential& phi,
                            const FiniteCorrespondence& T_inverse) {
  check_potential(T, phi);
  Potential out = Potential::zero(T_inverse);
  for (int e = 0; e < T_inverse.edge_count(); ++e) {
    const Edge& r = T_inverse.edge(e);
    const auto original = T.edge_index(r.to, r.from);
    if (!original) throw Error(ErrorKind::ShapeMismatch, "relations are not transposes");
    out.values[e] = phi.values[*original];
  }
  return out;
}

double birkhoff_sum(const FiniteCorrespondence& T, const Potential& phi, const Path& path) {
  check_potential(T, phi);
  const auto& s = path.states();
  if (s.size() < 2) throw Error(ErrorKind::InvalidPath, "Birkhoff sum needs at least one step");
  double sum = 0.0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const auto e = T.edge_index(s[k - 1], s[k]);
    if (!e) throw Error(ErrorKind::InvalidPath, "path leaves the relation");
    sum += phi.values[*e];
  }
  return sum;
}

namespace {

void check_bijection(int n, const std::vector<int>& theta) {
  if (static_cast<int>(theta.size()) != n) {
    throw Error(ErrorKind::NotBijective, "permutation has wrong length");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int v : theta) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) {
      throw Error(ErrorKind::NotBijective, "theta is not a permutation of the states");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
}

}  // namespace

std::vector<int> relabel_edge_map(const FiniteCorrespondence& T, const FiniteCorrespondence& S,
                                  const std::vector<int>& theta) {
  check_bijection(T.size(), theta);
  std::vector<int> map(static_cast<std::size_t>(T.edge_count()));
  for (int e = 0; e < T.edge_count(); ++e) {
    const Edge& x = T.edge(e);
    const auto image = S.edge_index(theta[static_cast<std::size_t>(x.from)],
                                    theta[static_cast<std::size_t>(x.to)]);
    if (!image) throw Error(ErrorKind::ShapeMismatch, "relations are not conjugate by theta");
    map[static_cast<std::size_t>(e)] = *image;
  }
  return map;
}

Relabeled relabel(const FiniteCorrespondence& T, const Potential& phi,
                  const std::vector<int>& theta) {
  check_potential(T, phi);
  check_bijection(T.size(), theta);
  std::vector<Edge> edges;
  edges.reserve(T.edges().size());
  for (const Edge& e : T.edges()) {
    edges.push_back({theta[static_cast<std::size_t>(e.from)], theta[static_cast<std::size_t>(e.to)]});
  }
  std::vector<std::string> labels;
  if (!T.labels().empty()) {
    labels.resize(T.labels().size());
    for (int i = 0; i < T.size(); ++i) {
      labels[static_cast<std::size_t>(theta[static_cast<std::size_t>(i)])] =
          T.labels()[static_cast<std::size_t>(i)];
    }
  }
  Relabeled out{FiniteCorrespondence::validate(T.size(), std::move(edges), std::move(labels)), {}};
  out.potential = Potential::zero(out.relation);
  const auto map = relabel_edge_map(T, out.relation, theta);
  for (int e = 0; e < T.edge_count(); ++e) out.potential.values[map[static_cast<std::size_t>(e)]] = phi.values[e];
  return out;
}

InducedRelation induced_relation(const FiniteCorrespondence& T, const std::vector<int>& block) {
  std::vector<int> local(static_cast<std::size_t>(T.size()), -1);
  for (std::size_t k = 0; k < block.size(); ++k) {
    const int s = block[k];
    if (s < 0 || s >= T.size()) throw Error(ErrorKind::IndexOutOfRange, "block state out of range");
    local[static_cast<std::size_t>(s)] = static_cast<int>(k);
  }
  std::vector<Edge> edges;
  std::vector<std::pair<Edge, int>> tagged;
  for (int e = 0; e < T.edge_count(); ++e) {
    const Edge& x = T.edge(e);
    const int a = local[static_cast<std::size_t>(x.from)];
    const int b = local[static_cast<std::size_t>(x.to)];
    if (a >= 0 && b >= 0) tagged.push_back({{a, b}, e});
  }
  std::sort(tagged.begin(), tagged.end());
  InducedRelation out;
  for (const auto& [edge, global] : tagged) {
    edges.push_back(edge);
    out.global_edge.push_back(global);
  }
  out.relation = FiniteCorrespondence::validate(static_cast<int>(block.size()), std::move(edges));
  return out;
}

}  // namespace thermo
