#include "thermo/generators.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace thermo {

namespace {

int pick(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

bool coin(Rng& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

}  // namespace

FiniteCorrespondence random_relation(Rng& rng, int n_states, double density) {
  std::set<Edge> edges;
  for (int i = 0; i < n_states; ++i) {
    edges.insert({i, pick(rng, n_states)});
    for (int j = 0; j < n_states; ++j) {
      if (coin(rng, density)) edges.insert({i, j});
    }
  }
  return FiniteCorrespondence::validate(n_states, {edges.begin(), edges.end()});
}

FiniteCorrespondence random_primitive(Rng& rng, int n_states, double density) {
  const std::vector<int> order = random_permutation(rng, n_states);
  std::set<Edge> edges;
  for (int k = 0; k < n_states; ++k) edges.insert({order[k], order[(k + 1) % n_states]});
  const int looped = pick(rng, n_states);
  edges.insert({looped, looped});
  for (int i = 0; i < n_states; ++i) {
    for (int j = 0; j < n_states; ++j) {
      if (coin(rng, density)) edges.insert({i, j});
    }
  }
  return FiniteCorrespondence::validate(n_states, {edges.begin(), edges.end()});
}

Potential random_potential(Rng& rng, const FiniteCorrespondence& T, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(T.edge_count());
  for (int e = 0; e < T.edge_count(); ++e) v[e] = u(rng);
  return {std::move(v)};
}

Eigen::VectorXd random_state_function(Rng& rng, int n_states, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n_states);
  for (int i = 0; i < n_states; ++i) v[i] = u(rng);
  return v;
}

StateMeasure random_measure(Rng& rng, int n_states) {
  std::exponential_distribution<double> ex(1.0);
  Eigen::VectorXd w(n_states);
  for (int i = 0; i < n_states; ++i) w[i] = ex(rng);
  return {w / w.sum()};
}

std::vector<int> random_cycle(Rng& rng, const FiniteCorrespondence& T, int start) {
  std::vector<int> walk{start};
  std::vector<int> seen_at(static_cast<std::size_t>(T.size()), -1);
  seen_at[static_cast<std::size_t>(start)] = 0;
  for (;;) {
    const auto succ = T.successors(walk.back());
    const int next = succ[static_cast<std::size_t>(pick(rng, static_cast<int>(succ.size())))];
    if (seen_at[static_cast<std::size_t>(next)] >= 0) {
      return {walk.begin() + seen_at[static_cast<std::size_t>(next)], walk.end()};
    }
    seen_at[static_cast<std::size_t>(next)] = static_cast<int>(walk.size());
    walk.push_back(next);
  }
}

StateMeasure random_invariant_measure(Rng& rng, const FiniteCorrespondence& T, int cycles) {
  std::exponential_distribution<double> ex(1.0);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(T.size());
  double total = 0.0;
  for (int c = 0; c < cycles; ++c) {
    const std::vector<int> cycle = random_cycle(rng, T, pick(rng, T.size()));
    const double lambda = ex(rng);
    total += lambda;
    for (int s : cycle) w[s] += lambda / static_cast<double>(cycle.size());
  }
  return {w / total};
}

TransitionKernel random_kernel(Rng& rng, const FiniteCorrespondence& T) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Eigen::VectorXd p(T.edge_count());
  for (int i = 0; i < T.size(); ++i) {
    double row = 0.0;
    for (int e = T.row_begin(i); e < T.row_end(i); ++e) row += (p[e] = u(rng));
    for (int e = T.row_begin(i); e < T.row_end(i); ++e) p[e] /= row;
  }
  return TransitionKernel::make(T, std::move(p));
}

std::vector<int> random_permutation(Rng& rng, int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

BlockRelation random_block_relation(Rng& rng, int n_blocks, int min_block, int max_block,
                                    double density) {
  BlockRelation out;
  int n = 0;
  for (int b = 0; b < n_blocks; ++b) {
    const int size = min_block + pick(rng, max_block - min_block + 1);
    std::vector<int> block(static_cast<std::size_t>(size));
    std::iota(block.begin(), block.end(), n);
    n += size;
    out.blocks.push_back(std::move(block));
  }
  std::set<Edge> edges;
  for (std::size_t b = 0; b < out.blocks.size(); ++b) {
    const auto& block = out.blocks[b];
    const int size = static_cast<int>(block.size());
    for (int x : block) {
      edges.insert({x, block[static_cast<std::size_t>(pick(rng, size))]});
      for (int y : block) {
        if (coin(rng, density)) edges.insert({x, y});
      }
      for (std::size_t later = b + 1; later < out.blocks.size(); ++later) {
        for (int y : out.blocks[later]) {
          if (coin(rng, density / 2)) edges.insert({x, y});
        }
      }
    }
  }
  out.relation = FiniteCorrespondence::validate(n, {edges.begin(), edges.end()});
  return out;
}

BlockRelation random_map_blocks(Rng& rng, int n_blocks, int min_block, int max_block, int max_cross) {
  BlockRelation out;
  std::set<Edge> edges;
  int n = 0;
  for (int b = 0; b < n_blocks; ++b) {
    const int size = min_block + pick(rng, max_block - min_block + 1);
    std::vector<int> block(static_cast<std::size_t>(size));
    std::iota(block.begin(), block.end(), n);
    if (coin(rng, 0.5)) {
      for (int k = 0; k < size; ++k) edges.insert({n + k, n + pick(rng, size)});
    } else {
      const std::vector<int> perm = random_permutation(rng, size);
      // Inverse graph of the permutation: y -> x whenever perm(x) = y.
      for (int k = 0; k < size; ++k) edges.insert({n + perm[static_cast<std::size_t>(k)], n + k});
    }
    n += size;
    out.blocks.push_back(std::move(block));
  }
  const int cross = n_blocks > 1 ? pick(rng, max_cross + 1) : 0;
  for (int c = 0; c < cross; ++c) {
    const int from_block = pick(rng, n_blocks - 1);
    const int to_block = from_block + 1 + pick(rng, n_blocks - from_block - 1);
    const auto& a = out.blocks[static_cast<std::size_t>(from_block)];
    const auto& b = out.blocks[static_cast<std::size_t>(to_block)];
    edges.insert({a[static_cast<std::size_t>(pick(rng, static_cast<int>(a.size())))],
                  b[static_cast<std::size_t>(pick(rng, static_cast<int>(b.size())))]});
  }
  out.relation = FiniteCorrespondence::validate(n, {edges.begin(), edges.end()});
  return out;
}

}  // namespace thermo
