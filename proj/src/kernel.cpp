#include "thermo/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "thermo/error.hpp"
#include "thermo/pressure.hpp"

namespace thermo {

namespace {

void check_probability_vector(const Eigen::VectorXd& w, const char* what) {
  if (w.size() == 0) throw Error(ErrorKind::ShapeMismatch, std::string(what) + " is empty");
  if ((w.array() < 0.0).any() || !w.allFinite()) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + " has negative or non-finite weights");
  }
  if (std::abs(w.sum() - 1.0) > kProbabilityTolerance) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + " does not sum to 1");
  }
}

}  // namespace

StateMeasure StateMeasure::make(Eigen::VectorXd weights) {
  check_probability_vector(weights, "state measure");
  return {std::move(weights)};
}

StateMeasure StateMeasure::dirac(int n_states, int state) {
  if (state < 0 || state >= n_states) throw Error(ErrorKind::IndexOutOfRange, "Dirac state out of range");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n_states);
  w[state] = 1.0;
  return {std::move(w)};
}

StateMeasure StateMeasure::uniform(int n_states) {
  return {Eigen::VectorXd::Constant(n_states, 1.0 / n_states)};
}

PairMeasure PairMeasure::make(const FiniteCorrespondence& T, Eigen::VectorXd weights) {
  if (weights.size() != T.edge_count()) {
    throw Error(ErrorKind::ShapeMismatch, "pair measure needs one weight per edge");
  }
  check_probability_vector(weights, "pair measure");
  return {std::move(weights)};
}

Eigen::VectorXd PairMeasure::first_marginal(const FiniteCorrespondence& T) const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(T.size());
  for (int e = 0; e < T.edge_count(); ++e) m[T.edge(e).from] += weights[e];
  return m;
}

Eigen::VectorXd PairMeasure::second_marginal(const FiniteCorrespondence& T) const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(T.size());
  for (int e = 0; e < T.edge_count(); ++e) m[T.edge(e).to] += weights[e];
  return m;
}

double PairMeasure::marginal_gap(const FiniteCorrespondence& T) const {
  return (first_marginal(T) - second_marginal(T)).lpNorm<1>();
}

TransitionKernel TransitionKernel::make(const FiniteCorrespondence& T,
                                        Eigen::VectorXd edge_probabilities) {
  if (edge_probabilities.size() != T.edge_count()) {
    throw Error(ErrorKind::ShapeMismatch, "kernel needs one probability per edge");
  }
  if ((edge_probabilities.array() < 0.0).any() || !edge_probabilities.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "kernel has negative or non-finite entries");
  }
  for (int i = 0; i < T.size(); ++i) {
    const double row = edge_probabilities.segment(T.row_begin(i), T.out_degree(i)).sum();
    if (std::abs(row - 1.0) > kProbabilityTolerance) {
      throw Error(ErrorKind::InvalidInput, "kernel row " + std::to_string(i) + " sums to " +
                                               std::to_string(row));
    }
  }
  return TransitionKernel(T, std::move(edge_probabilities));
}

TransitionKernel TransitionKernel::from_rows(
    const FiniteCorrespondence& T, const std::vector<std::vector<std::pair<int, double>>>& rows) {
  if (static_cast<int>(rows.size()) != T.size()) {
    throw Error(ErrorKind::ShapeMismatch, "kernel needs one row per state");
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(T.edge_count());
  for (int i = 0; i < T.size(); ++i) {
    for (const auto& [j, prob] : rows[static_cast<std::size_t>(i)]) {
      const auto e = T.edge_index(i, j);
      if (!e) {
        throw Error(ErrorKind::InvalidInput, "kernel puts mass on non-edge (" + std::to_string(i) +
                                                 "," + std::to_string(j) + ")");
      }
      p[*e] += prob;
    }
  }
  return make(T, std::move(p));
}

TransitionKernel TransitionKernel::uniform(const FiniteCorrespondence& T) {
  Eigen::VectorXd p(T.edge_count());
  for (int i = 0; i < T.size(); ++i) {
    p.segment(T.row_begin(i), T.out_degree(i)).setConstant(1.0 / T.out_degree(i));
  }
  return TransitionKernel(T, std::move(p));
}

TransitionKernel TransitionKernel::lowest_successor(const FiniteCorrespondence& T) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(T.edge_count());
  for (int i = 0; i < T.size(); ++i) p[T.row_begin(i)] = 1.0;
  return TransitionKernel(T, std::move(p));
}

TransitionKernel TransitionKernel::from_pair_measure(const FiniteCorrespondence& T,
                                                     const PairMeasure& nu) {
  if (nu.weights.size() != T.edge_count()) {
    throw Error(ErrorKind::ShapeMismatch, "pair measure does not match relation");
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(T.edge_count());
  for (int i = 0; i < T.size(); ++i) {
    const auto row = nu.weights.segment(T.row_begin(i), T.out_degree(i));
    const double mass = row.sum();
    if (mass > 0.0) {
      p.segment(T.row_begin(i), T.out_degree(i)) = row / mass;
    } else {
      p[T.row_begin(i)] = 1.0;
    }
  }
  return TransitionKernel(T, std::move(p));
}

double TransitionKernel::operator()(int from, int to) const {
  const auto e = relation_.edge_index(from, to);
  return e ? probabilities_[*e] : 0.0;
}

Eigen::MatrixXd TransitionKernel::dense() const {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(relation_.size(), relation_.size());
  for (int e = 0; e < relation_.edge_count(); ++e) {
    Q(relation_.edge(e).from, relation_.edge(e).to) = probabilities_[e];
  }
  return Q;
}

StateMeasure pushforward(const StateMeasure& mu, const TransitionKernel& Q) {
  const auto& T = Q.relation();
  if (mu.size() != T.size()) throw Error(ErrorKind::ShapeMismatch, "measure and kernel sizes differ");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(T.size());
  for (int e = 0; e < T.edge_count(); ++e) {
    out[T.edge(e).to] += mu.weights[T.edge(e).from] * Q.probabilities()[e];
  }
  return {std::move(out)};
}

Eigen::VectorXd pullback(const TransitionKernel& Q, const Eigen::VectorXd& f) {
  const auto& T = Q.relation();
  if (f.size() != T.size()) throw Error(ErrorKind::ShapeMismatch, "function and kernel sizes differ");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(T.size());
  for (int e = 0; e < T.edge_count(); ++e) {
    out[T.edge(e).from] += Q.probabilities()[e] * f[T.edge(e).to];
  }
  return out;
}

PairMeasure pair_measure(const StateMeasure& mu, const TransitionKernel& Q) {
  const auto& T = Q.relation();
  if (mu.size() != T.size()) throw Error(ErrorKind::ShapeMismatch, "measure and kernel sizes differ");
  Eigen::VectorXd w(T.edge_count());
  for (int e = 0; e < T.edge_count(); ++e) w[e] = mu.weights[T.edge(e).from] * Q.probabilities()[e];
  return {std::move(w)};
}

double stationarity_gap(const StateMeasure& mu, const TransitionKernel& Q) {
  return (pushforward(mu, Q).weights - mu.weights).lpNorm<1>();
}

double PathDistribution::total() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

PathDistribution PathDistribution::window(int offset, int coordinates) const {
  if (offset < 0 || coordinates < 1 || offset + coordinates > length) {
    throw Error(ErrorKind::ShapeMismatch, "window outside the path length");
  }
  std::map<std::vector<int>, double> merged;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    std::vector<int> head(paths[k].begin() + offset, paths[k].begin() + offset + coordinates);
    merged[std::move(head)] += weights[k];
  }
  PathDistribution out;
  out.length = coordinates;
  for (auto& [path, w] : merged) {
    out.paths.push_back(path);
    out.weights.push_back(w);
  }
  return out;
}

PathDistribution PathDistribution::marginal(int coordinates) const { return window(0, coordinates); }

PathDistribution chain_distribution(const StateMeasure& start, const TransitionKernel& Q, int n) {
  const auto& T = Q.relation();
  if (start.size() != T.size()) throw Error(ErrorKind::ShapeMismatch, "start law and kernel sizes differ");
  if (n < 0) throw Error(ErrorKind::InvalidInput, "n must be nonnegative");
  if (std::pow(static_cast<double>(T.size()), n + 1) > kDensePathLimit) {
    throw Error(ErrorKind::TooLarge, "dense path distribution would exceed 1e7 entries");
  }
  PathDistribution law;
  law.length = 1;
  for (int x = 0; x < T.size(); ++x) {
    law.paths.push_back({x});
    law.weights.push_back(start.weights[x]);
  }
  for (int step = 0; step < n; ++step) {
    PathDistribution next;
    next.length = law.length + 1;
    for (std::size_t k = 0; k < law.paths.size(); ++k) {
      const int last = law.paths[k].back();
      for (int e = T.row_begin(last); e < T.row_end(last); ++e) {
        auto path = law.paths[k];
        path.push_back(T.edge(e).to);
        next.paths.push_back(std::move(path));
        next.weights.push_back(law.weights[k] * Q.probabilities()[e]);
      }
    }
    law = std::move(next);
  }
  return law;
}

PathDistribution chain_distribution(int start_state, const TransitionKernel& Q, int n) {
  return chain_distribution(StateMeasure::dirac(Q.relation().size(), start_state), Q, n);
}

std::vector<StateMeasure> stationary_measures(const TransitionKernel& Q) {
  const auto& T = Q.relation();
  const auto& p = Q.probabilities();
  std::vector<std::vector<int>> support(static_cast<std::size_t>(T.size()));
  for (int e = 0; e < T.edge_count(); ++e) {
    if (p[e] > 0.0) support[T.edge(e).from].push_back(T.edge(e).to);
  }
  const Components scc = strongly_connected_components(support);
  std::vector<StateMeasure> out;
  for (int c = 0; c < scc.count(); ++c) {
    const auto& members = scc.members[c];
    bool closed = true;
    std::vector<int> local(static_cast<std::size_t>(T.size()), -1);
    for (std::size_t k = 0; k < members.size(); ++k) local[members[k]] = static_cast<int>(k);
    std::vector<WeightedEdge> edges;
    for (int s : members) {
      for (int e = T.row_begin(s); e < T.row_end(s); ++e) {
        if (!(p[e] > 0.0)) continue;
        const int t = T.edge(e).to;
        if (local[t] < 0) {
          closed = false;
        } else {
          edges.push_back({local[s], local[t], std::log(p[e])});
        }
      }
    }
    if (!closed) continue;
    const PerronVectors pv = perron_vectors(static_cast<int>(members.size()), edges, true);
    const Eigen::VectorXd left = pv.left.cwiseProduct((-pv.gauge).array().exp().matrix());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(T.size());
    const double mass = left.sum();
    for (std::size_t k = 0; k < members.size(); ++k) w[members[k]] = left[static_cast<Eigen::Index>(k)] / mass;
    StateMeasure mu{std::move(w)};
    if (stationarity_gap(mu, Q) > kStationaryTolerance) {
      throw Error(ErrorKind::ConvergenceFailure, "stationary vector misses tolerance");
    }
    out.push_back(std::move(mu));
  }
  return out;
}

Partition Partition::make(int n_states, std::vector<std::vector<int>> cells) {
  std::vector<int> count(static_cast<std::size_t>(n_states), 0);
  for (const auto& cell : cells) {
    if (cell.empty()) throw Error(ErrorKind::InvalidInput, "partition has an empty cell");
    for (int s : cell) {
      if (s < 0 || s >= n_states) throw Error(ErrorKind::IndexOutOfRange, "partition state out of range");
      ++count[static_cast<std::size_t>(s)];
    }
  }
  for (int c : count) {
    if (c != 1) throw Error(ErrorKind::InvalidInput, "partition cells must be disjoint and cover every state");
  }
  return {std::move(cells)};
}

Partition Partition::discrete(int n_states) {
  Partition out;
  for (int s = 0; s < n_states; ++s) out.cells.push_back({s});
  return out;
}

double shannon_entropy(const Eigen::VectorXd& p) {
  double h = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) h -= p[k] * std::log(p[k]);
  }
  return h;
}

double partition_entropy(const PathDistribution& law, const Partition& partition, int n_states) {
  std::vector<int> cell_of(static_cast<std::size_t>(n_states), -1);
  for (std::size_t c = 0; c < partition.cells.size(); ++c) {
    for (int s : partition.cells[c]) {
      if (s < 0 || s >= n_states) throw Error(ErrorKind::ShapeMismatch, "partition does not fit the state set");
      cell_of[static_cast<std::size_t>(s)] = static_cast<int>(c);
    }
  }
  std::map<std::vector<int>, double> coarse;
  for (std::size_t k = 0; k < law.paths.size(); ++k) {
    std::vector<int> word;
    word.reserve(law.paths[k].size());
    for (int s : law.paths[k]) {
      if (s < 0 || s >= n_states || cell_of[static_cast<std::size_t>(s)] < 0) {
        throw Error(ErrorKind::ShapeMismatch, "path state not covered by the partition");
      }
      word.push_back(cell_of[static_cast<std::size_t>(s)]);
    }
    coarse[std::move(word)] += law.weights[k];
  }
  double h = 0.0;
  for (const auto& [word, w] : coarse) {
    if (w > 0.0) h -= w * std::log(w);
  }
  return h;
}

double entropy_rate(const StateMeasure& mu, const TransitionKernel& Q) {
  const auto& T = Q.relation();
  if (mu.size() != T.size()) throw Error(ErrorKind::ShapeMismatch, "measure and kernel sizes differ");
  double h = 0.0;
  for (int e = 0; e < T.edge_count(); ++e) {
    const double q = Q.probabilities()[e];
    if (q > 0.0) h -= mu.weights[T.edge(e).from] * q * std::log(q);
  }
  return h;
}

KernelEntropy kernel_entropy(const StateMeasure& mu, const TransitionKernel& Q, int n_max,
                             const Partition& partition) {
  const auto& T = Q.relation();
  if (mu.size() != T.size()) throw Error(ErrorKind::ShapeMismatch, "measure and kernel sizes differ");
  if (n_max < 1) throw Error(ErrorKind::InvalidInput, "n_max must be at least 1");
  if (stationarity_gap(mu, Q) > kStationaryTolerance) {
    throw Error(ErrorKind::NotStationary, "mu Q differs from mu");
  }
  const auto dense_feasible = [&](int coordinates) {
    return std::pow(static_cast<double>(T.size()), coordinates) <= kDensePathLimit;
  };
  const bool discrete = partition.cells.size() == static_cast<std::size_t>(T.size());

  KernelEntropy out;
  if (discrete) {
    Partition::make(T.size(), partition.cells);
    const double h0 = shannon_entropy(mu.weights);
    const double h = entropy_rate(mu, Q);
    for (int n = 1; n <= n_max; ++n) out.sequence.push_back((h0 + (n - 1) * h) / n);
    out.limit = h;
    const int checked = std::min(n_max, 6);
    if (dense_feasible(checked)) {
      out.cross_check_gap = 0.0;
      const PathDistribution law = chain_distribution(mu, Q, checked - 1);
      for (int n = 1; n <= checked; ++n) {
        const double dense = partition_entropy(law.marginal(n), partition, T.size()) / n;
        out.cross_check_gap = std::max(out.cross_check_gap, std::abs(dense - out.sequence[n - 1]));
      }
    }
    return out;
  }

  Partition::make(T.size(), partition.cells);
  int reachable = 1;
  while (reachable < n_max && dense_feasible(reachable + 1)) ++reachable;
  const PathDistribution law = chain_distribution(mu, Q, reachable - 1);
  double previous = 0.0;
  for (int n = 1; n <= reachable; ++n) {
    const double H = partition_entropy(law.marginal(n), partition, T.size());
    out.sequence.push_back(H / n);
    out.limit = H - previous;  // conditional entropy, decreasing to the rate
    previous = H;
  }
  return out;
}

StateMeasure relabel_measure(const StateMeasure& mu, const std::vector<int>& theta) {
  if (static_cast<int>(theta.size()) != mu.size()) throw Error(ErrorKind::ShapeMismatch, "permutation size differs");
  Eigen::VectorXd w(mu.size());
  for (int i = 0; i < mu.size(); ++i) w[theta[static_cast<std::size_t>(i)]] = mu.weights[i];
  return {std::move(w)};
}

TransitionKernel relabel_kernel(const TransitionKernel& Q, const FiniteCorrespondence& S,
                                const std::vector<int>& theta) {
  const std::vector<int> map = relabel_edge_map(Q.relation(), S, theta);
  Eigen::VectorXd p(S.edge_count());
  for (std::size_t e = 0; e < map.size(); ++e) p[map[e]] = Q.probabilities()[static_cast<Eigen::Index>(e)];
  return TransitionKernel::make(S, std::move(p));
}

PairMeasure relabel_pair_measure(const FiniteCorrespondence& T, const PairMeasure& nu,
                                 const FiniteCorrespondence& S, const std::vector<int>& theta) {
  const std::vector<int> map = relabel_edge_map(T, S, theta);
  Eigen::VectorXd w(S.edge_count());
  for (std::size_t e = 0; e < map.size(); ++e) w[map[e]] = nu.weights[static_cast<Eigen::Index>(e)];
  return {std::move(w)};
}

}  // namespace thermo
