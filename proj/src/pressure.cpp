#include "thermo/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "thermo/error.hpp"

namespace thermo {

Components strongly_connected_components(const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  std::vector<int> low(static_cast<std::size_t>(n), 0);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  std::vector<int> raw_component(static_cast<std::size_t>(n), -1);
  int next_index = 0;
  int n_components = 0;

  // Iterative Tarjan: frame = (vertex, position in its adjacency list).
  std::vector<std::pair<int, std::size_t>> frames;
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] >= 0) continue;
    frames.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      const auto& out = adjacency[static_cast<std::size_t>(v)];
      if (pos < out.size()) {
        const int w = out[pos++];
        if (index[w] < 0) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w = -1;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          raw_component[w] = n_components;
        } while (w != v);
        ++n_components;
      }
      const int finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        const int parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }

  // Renumber by smallest member.
  std::vector<int> first_seen(static_cast<std::size_t>(n_components), -1);
  std::vector<int> order;
  for (int s = 0; s < n; ++s) {
    const int c = raw_component[s];
    if (first_seen[c] < 0) {
      first_seen[c] = static_cast<int>(order.size());
      order.push_back(c);
    }
  }
  Components out;
  out.component_of.resize(static_cast<std::size_t>(n));
  out.members.resize(static_cast<std::size_t>(n_components));
  for (int s = 0; s < n; ++s) {
    const int c = first_seen[raw_component[s]];
    out.component_of[s] = c;
    out.members[c].push_back(s);
  }
  return out;
}

Components strongly_connected_components(const FiniteCorrespondence& T) {
  std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(T.size()));
  for (int i = 0; i < T.size(); ++i) {
    const auto succ = T.successors(i);
    adjacency[i].assign(succ.begin(), succ.end());
  }
  return strongly_connected_components(adjacency);
}

int cyclic_period(int n, const std::vector<WeightedEdge>& edges) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  for (const auto& e : edges) out[e.from].push_back(e.to);
  std::vector<long> level(static_cast<std::size_t>(n), -1);
  std::vector<int> queue{0};
  level[0] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    for (int w : out[v]) {
      if (level[w] < 0) {
        level[w] = level[v] + 1;
        queue.push_back(w);
      }
    }
  }
  long g = 0;
  for (const auto& e : edges) {
    if (level[e.from] < 0 || level[e.to] < 0) continue;
    g = std::gcd(g, std::labs(level[e.from] + 1 - level[e.to]));
  }
  return g == 0 ? 1 : static_cast<int>(g);
}

namespace {

struct PowerRun {
  Eigen::VectorXd vector;
  double log_radius = 0.0;
  int iterations = 0;
};

// One power iteration on M (or M^T when `transpose`), weights already shifted.
PowerRun power_iterate(int n, const std::vector<WeightedEdge>& edges,
                       const std::vector<double>& weights, int period, bool transpose,
                       int max_iterations) {
  auto apply = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto& e = edges[k];
      if (transpose) {
        y[e.to] += weights[k] * x[e.from];
      } else {
        y[e.from] += weights[k] * x[e.to];
      }
    }
    return y;
  };

  const auto p = static_cast<std::size_t>(period);
  std::vector<Eigen::VectorXd> ring(p, Eigen::VectorXd::Ones(n));
  std::vector<double> log_growth(p, 0.0);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double previous_estimate = std::numeric_limits<double>::quiet_NaN();

  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::VectorXd y = apply(x);
    const double growth = y.maxCoeff();
    if (!(growth > 0.0) || !std::isfinite(growth)) {
      throw Error(ErrorKind::ConvergenceFailure, "power iteration lost positivity");
    }
    y /= growth;
    const std::size_t slot = static_cast<std::size_t>(it) % p;
    log_growth[slot] = std::log(growth);
    const double drift = (y - ring[slot]).lpNorm<Eigen::Infinity>();
    ring[slot] = y;
    x = std::move(y);
    if (it < 2 * period) continue;
    const double estimate =
        std::accumulate(log_growth.begin(), log_growth.end(), 0.0) / static_cast<double>(period);
    const bool settled = std::abs(estimate - previous_estimate) < 1e-13 && drift < 1e-12;
    previous_estimate = estimate;
    if (!settled) continue;

    PowerRun run;
    run.log_radius = estimate;
    run.iterations = it;
    // Sum one period of iterates scaled by rho^{-k}: an exact eigenvector once
    // the iterate cycle has converged.
    const double rho = std::exp(estimate);
    Eigen::VectorXd term = x;
    Eigen::VectorXd sum = x;
    for (int k = 1; k < period; ++k) {
      term = apply(term) / rho;
      sum += term;
    }
    run.vector = sum / sum.maxCoeff();
    return run;
  }
  throw Error(ErrorKind::ConvergenceFailure,
              "power iteration did not settle within " + std::to_string(max_iterations) +
                  " iterations");
}


// Noda's shifted inverse iteration; converges where a tiny spectral gap stalls
// the power method. Collatz-Wielandt bounds bracket the radius at every step.
PowerRun noda_iterate(int n, const std::vector<WeightedEdge>& edges,
                      const std::vector<double>& weights, bool transpose) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    if (transpose) {
      M(e.to, e.from) += weights[k];
    } else {
      M(e.from, e.to) += weights[k];
    }
  }
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double previous_upper = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= 500; ++it) {
    const Eigen::VectorXd y = M * x;
    double upper = 0.0;
    double lower = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double r = y[i] / x[i];
      upper = std::max(upper, r);
      lower = std::min(lower, r);
    }
    if (!(upper > 0.0) || !std::isfinite(upper)) break;
    PowerRun run;
    run.iterations = it;
    run.vector = x / x.maxCoeff();
    if (std::log(upper) - std::log(lower) < 1e-14) {
      run.log_radius = 0.5 * (std::log(upper) + std::log(lower));
      return run;
    }
    // The upper bound decreases monotonically to the radius; once it stalls the
    // lower bound is held down only by coordinates that have underflowed.
    if (previous_upper - upper <= 1e-15 * upper) {
      run.log_radius = std::log(upper);
      return run;
    }
    previous_upper = upper;
    Eigen::MatrixXd shifted = -M;
    shifted.diagonal().array() += upper * (1.0 + 1e-15);
    Eigen::VectorXd z = shifted.partialPivLu().solve(x).cwiseAbs();
    if (!z.allFinite() || !(z.maxCoeff() > 0.0)) break;
    z /= z.maxCoeff();
    // Keep every coordinate positive so the ratio bounds stay defined.
    x = z.cwiseMax(std::numeric_limits<double>::min());
  }
  throw Error(ErrorKind::ConvergenceFailure, "shifted inverse iteration did not settle");
}

// Power iteration first; Noda's method when it stalls on a small component.
PowerRun settle(int n, const std::vector<WeightedEdge>& edges, const std::vector<double>& weights,
                int period, bool transpose, int max_iterations) {
  constexpr int kPowerBudget = 5000;
  constexpr int kDenseLimit = 2000;
  if (n > kDenseLimit) return power_iterate(n, edges, weights, period, transpose, max_iterations);
  try {
    return power_iterate(n, edges, weights, period, transpose, std::min(max_iterations, kPowerBudget));
  } catch (const Error& e) {
    if (!e.is_convergence_failure()) throw;
  }
  return noda_iterate(n, edges, weights, transpose);
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

// Maximum cycle mean of the log weights (Karp), the max-plus eigenvalue.
double max_cycle_mean(int n, const std::vector<WeightedEdge>& edges) {
  const double none = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> walk(static_cast<std::size_t>(n) + 1,
                                        std::vector<double>(static_cast<std::size_t>(n), none));
  walk[0][0] = 0.0;
  for (int k = 1; k <= n; ++k) {
    for (const auto& e : edges) {
      const double from = walk[k - 1][e.from];
      if (from != none) walk[k][e.to] = std::max(walk[k][e.to], from + e.log_weight);
    }
  }
  double best = none;
  for (int v = 0; v < n; ++v) {
    if (walk[n][v] == none) continue;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      if (walk[k][v] != none) worst = std::min(worst, (walk[n][v] - walk[k][v]) / (n - k));
    }
    best = std::max(best, worst);
  }
  return best;
}

// Log of a rough Perron vector of M / exp(lambda) + I: primitive, same
// eigenvectors as M, radius between 1 and n + 1.
Eigen::VectorXd log_lazy_vector(int n, const std::vector<WeightedEdge>& edges, double lambda,
                                bool transpose) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd y = v;
    for (const auto& e : edges) {
      if (transpose) {
        y[e.to] = log_add(y[e.to], e.log_weight - lambda + v[e.from]);
      } else {
        y[e.from] = log_add(y[e.from], e.log_weight - lambda + v[e.to]);
      }
    }
    y.array() -= y.maxCoeff();
    const double drift = (y - v).lpNorm<Eigen::Infinity>();
    v = std::move(y);
    if (drift < 1e-6) break;
  }
  return v;
}

// Symmetric gauge (log r - log l) / 2: both gauged vectors become sqrt(l r).
Eigen::VectorXd balancing_gauge(int n, const std::vector<WeightedEdge>& edges) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& e : edges) {
    lo = std::min(lo, e.log_weight);
    hi = std::max(hi, e.log_weight);
  }
  if (hi - lo < 30.0) return Eigen::VectorXd::Zero(n);
  // Karp keeps an (n + 1) x n table; large components fall back to the top weight.
  const double lambda = n <= 2000 ? max_cycle_mean(n, edges) : hi;
  return 0.5 * (log_lazy_vector(n, edges, lambda, false) - log_lazy_vector(n, edges, lambda, true));
}

}  // namespace

PerronVectors perron_vectors(int n, const std::vector<WeightedEdge>& edges, bool with_left,
                             int max_iterations) {
  if (n < 1 || edges.empty()) {
    throw Error(ErrorKind::InvalidInput, "Perron vectors need a component with a cycle");
  }
  PerronVectors out;
  out.gauge = balancing_gauge(n, edges);
  std::vector<double> gauged;
  gauged.reserve(edges.size());
  for (const auto& e : edges) gauged.push_back(e.log_weight - out.gauge[e.from] + out.gauge[e.to]);
  const double shift = *std::max_element(gauged.begin(), gauged.end());
  std::vector<double> weights;
  weights.reserve(edges.size());
  for (double w : gauged) weights.push_back(std::exp(w - shift));

  out.period = cyclic_period(n, edges);
  const PowerRun right = settle(n, edges, weights, out.period, false, max_iterations);
  out.right = right.vector;
  out.log_radius = right.log_radius + shift;
  out.iterations = right.iterations;
  if (with_left) {
    const PowerRun left = settle(n, edges, weights, out.period, true, max_iterations);
    out.left = left.vector;
    out.iterations += left.iterations;
  }
  return out;
}

SpectralPressure spectral_pressure(const FiniteCorrespondence& T, const Potential& phi,
                                   bool with_vectors) {
  check_potential(T, phi);
  const Components scc = strongly_connected_components(T);
  std::vector<int> local(static_cast<std::size_t>(T.size()), -1);
  for (const auto& members : scc.members) {
    for (std::size_t k = 0; k < members.size(); ++k) local[members[k]] = static_cast<int>(k);
  }
  std::vector<std::vector<WeightedEdge>> component_edges(static_cast<std::size_t>(scc.count()));
  for (int e = 0; e < T.edge_count(); ++e) {
    const Edge& x = T.edge(e);
    const int c = scc.component_of[x.from];
    if (c == scc.component_of[x.to]) {
      component_edges[c].push_back({local[x.from], local[x.to], phi.values[e]});
    }
  }

  SpectralPressure out;
  out.pressure = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < scc.count(); ++c) {
    ComponentSpectrum comp;
    comp.id = c;
    comp.states = scc.members[c];
    comp.cyclic = !component_edges[c].empty();
    if (comp.cyclic) {
      PerronVectors pv = perron_vectors(static_cast<int>(comp.states.size()), component_edges[c],
                                        with_vectors);
      comp.log_radius = pv.log_radius;
      comp.period = pv.period;
      if (with_vectors) {
        comp.gauge = std::move(pv.gauge);
        comp.right = std::move(pv.right);
        comp.left = std::move(pv.left);
      }
      out.pressure = std::max(out.pressure, comp.log_radius);
    }
    out.components.push_back(std::move(comp));
  }
  for (const auto& comp : out.components) {
    if (comp.cyclic && comp.log_radius >= out.pressure - kDominantTieTolerance) {
      out.dominant_classes.push_back(comp.id);
    }
  }
  return out;
}

std::vector<double> path_pressure_sequence(const FiniteCorrespondence& T, const Potential& phi,
                                           int n_max) {
  check_potential(T, phi);
  if (n_max < 1) throw Error(ErrorKind::InvalidInput, "n_max must be at least 1");
  const int n = T.size();
  constexpr double kMinusInf = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);  // log of weighted path counts ending at j
  Eigen::VectorXd peak(n);
  Eigen::VectorXd next(n);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_max));
  for (int step = 1; step <= n_max; ++step) {
    peak.setConstant(kMinusInf);
    for (int e = 0; e < T.edge_count(); ++e) {
      const Edge& x = T.edge(e);
      peak[x.to] = std::max(peak[x.to], v[x.from] + phi.values[e]);
    }
    next.setZero();
    for (int e = 0; e < T.edge_count(); ++e) {
      const Edge& x = T.edge(e);
      next[x.to] += std::exp(v[x.from] + phi.values[e] - peak[x.to]);
    }
    for (int j = 0; j < n; ++j) {
      v[j] = std::isinf(peak[j]) ? kMinusInf : peak[j] + std::log(next[j]);
    }
    const double top = v.maxCoeff();
    const double total = top + std::log((v.array() - top).exp().sum());
    out.push_back(total / step);
  }
  return out;
}

DecompositionReport decomposition_validate(const FiniteCorrespondence& T,
                                           const std::vector<std::vector<int>>& blocks) {
  DecompositionReport report;
  auto fail = [&report](int condition, std::string message) {
    report.ok = false;
    report.violated_condition = condition;
    report.message = std::move(message);
    return report;
  };
  if (blocks.empty()) return fail(1, "no blocks given");

  const auto n = static_cast<std::size_t>(T.size());
  std::vector<std::vector<bool>> in_block(blocks.size(), std::vector<bool>(n, false));
  std::vector<bool> covered(n, false);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) return fail(1, "block " + std::to_string(b + 1) + " is empty");
    for (int s : blocks[b]) {
      if (s < 0 || s >= T.size()) {
        return fail(1, "block " + std::to_string(b + 1) + " names state outside the relation");
      }
      in_block[b][static_cast<std::size_t>(s)] = true;
      covered[static_cast<std::size_t>(s)] = true;
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (!covered[s]) {
      report.witness_state = static_cast<int>(s);
      return fail(1, "state " + std::to_string(s) + " lies in no block");
    }
  }
  // (iii): each induced sub-relation is itself a correspondence.
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int s : blocks[b]) {
      const auto succ = T.successors(s);
      const bool stays = std::any_of(succ.begin(), succ.end(),
                                     [&](int t) { return in_block[b][static_cast<std::size_t>(t)]; });
      if (!stays) {
        report.witness_state = s;
        return fail(3, "state " + std::to_string(s) + " has no successor inside block " +
                           std::to_string(b + 1));
      }
    }
  }
  // (v): nothing from X_i lands in (X_1 u ... u X_{i-1}) \ X_i.
  for (std::size_t b = 1; b < blocks.size(); ++b) {
    for (int s : blocks[b]) {
      for (int t : T.successors(s)) {
        const auto tt = static_cast<std::size_t>(t);
        if (in_block[b][tt]) continue;
        for (std::size_t earlier = 0; earlier < b; ++earlier) {
          if (in_block[earlier][tt]) {
            report.witness_edge = Edge{s, t};
            return fail(5, "edge (" + std::to_string(s) + "," + std::to_string(t) +
                               ") leaves block " + std::to_string(b + 1) + " into block " +
                               std::to_string(earlier + 1));
          }
        }
      }
    }
  }
  return report;
}

DecompositionPressure decomposition_pressure(const FiniteCorrespondence& T, const Potential& phi,
                                             const std::vector<std::vector<int>>& blocks) {
  check_potential(T, phi);
  const DecompositionReport report = decomposition_validate(T, blocks);
  if (!report.ok) throw Error(ErrorKind::InvalidDecomposition, report.message);
  DecompositionPressure out;
  out.pressure = -std::numeric_limits<double>::infinity();
  for (const auto& block : blocks) {
    const InducedRelation sub = induced_relation(T, block);
    Potential restricted = Potential::zero(sub.relation);
    for (int e = 0; e < sub.relation.edge_count(); ++e) {
      restricted.values[e] = phi.values[sub.global_edge[static_cast<std::size_t>(e)]];
    }
    const double p = spectral_pressure(sub.relation, restricted).pressure;
    out.block_pressures.push_back(p);
    out.pressure = std::max(out.pressure, p);
  }
  return out;
}

}  // namespace thermo
