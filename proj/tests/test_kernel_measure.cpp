#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <set>
#include <string>

#include "oracles.hpp"
#include "thermo/error.hpp"
#include "thermo/generators.hpp"
#include "thermo/invariant.hpp"
#include "thermo/kernel.hpp"
#include "thermo/pressure.hpp"

using namespace thermo;

namespace {

FiniteCorrespondence full_shift() { return FiniteCorrespondence::validate(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}); }
FiniteCorrespondence golden_mean() { return FiniteCorrespondence::validate(2, {{0, 0}, {0, 1}, {1, 0}}); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no Error thrown");
  return ErrorKind::InvalidInput;
}

// A random pair (T, Q) where Q has a unique stationary law: T primitive, full support.
struct Chain {
  FiniteCorrespondence T;
  TransitionKernel Q;
  StateMeasure mu;
};

Chain random_chain(Rng& rng, int n) {
  auto T = random_primitive(rng, n, 0.3);
  auto Q = random_kernel(rng, T);
  auto mu = stationary_measures(Q).front();
  return {std::move(T), std::move(Q), std::move(mu)};
}

}  // namespace

TEST_CASE("measures and kernels are validated") {
  CHECK(kind_of([] { StateMeasure::make(Eigen::Vector2d(0.7, 0.7)); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { StateMeasure::make(Eigen::Vector2d(1.5, -0.5)); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { StateMeasure::dirac(2, 2); }) == ErrorKind::IndexOutOfRange);
  const auto T = golden_mean();
  CHECK(kind_of([&] { TransitionKernel::make(T, Eigen::Vector3d(0.5, 0.4, 1.0)); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { TransitionKernel::from_rows(T, {{{0, 0.5}, {1, 0.5}}, {{1, 1.0}}}); }) ==
        ErrorKind::InvalidInput);
  CHECK(kind_of([&] { PairMeasure::make(T, Eigen::Vector2d(0.5, 0.5)); }) == ErrorKind::ShapeMismatch);
  const auto Q = TransitionKernel::from_rows(T, {{{0, 0.25}, {1, 0.75}}, {{0, 1.0}}});
  CHECK(Q(0, 1) == 0.75);
  CHECK(Q(1, 1) == 0.0);
  CHECK(TransitionKernel::uniform(T)(0, 0) == 0.5);
  CHECK(TransitionKernel::lowest_successor(full_shift())(1, 0) == 1.0);
}

TEST_CASE("pushforward and pullback are dual") {
  Rng rng(21);
  for (int k = 0; k < 100; ++k) {
    const auto T = random_relation(rng, 1 + k % 8, 0.3);
    const auto Q = random_kernel(rng, T);
    const auto mu = random_measure(rng, T.size());
    const Eigen::VectorXd f = random_state_function(rng, T.size());
    CHECK(std::abs(pushforward(mu, Q).weights.dot(f) - mu.weights.dot(pullback(Q, f))) < 1e-12);
    const auto nu = pair_measure(mu, Q);
    CHECK((nu.first_marginal(T) - mu.weights).lpNorm<1>() < 1e-12);
    CHECK((nu.second_marginal(T) - pushforward(mu, Q).weights).lpNorm<1>() < 1e-12);
    const auto back = TransitionKernel::from_pair_measure(T, nu);
    for (int i = 0; i < T.size(); ++i) {
      for (int j : T.successors(i)) CHECK(std::abs(back(i, j) - Q(i, j)) < 1e-12);
    }
  }
}

TEST_CASE("chain distribution matches the literal recursion") {
  Rng rng(22);
  for (int k = 0; k < 40; ++k) {
    const auto T = random_relation(rng, 1 + k % 4, 0.4);
    const auto Q = random_kernel(rng, T);
    const auto mu = random_measure(rng, T.size());
    const int n = 1 + k % 5;
    const auto law = chain_distribution(mu, Q, n);
    const auto expected = oracle::chain_law(mu, Q, n);
    CHECK(law.length == n + 1);
    CHECK(std::abs(law.total() - 1.0) < 1e-12);
    double mismatch = 0.0;
    for (std::size_t p = 0; p < law.paths.size(); ++p) {
      const auto it = expected.find(law.paths[p]);
      mismatch += std::abs(law.weights[p] - (it == expected.end() ? 0.0 : it->second));
    }
    CHECK(mismatch < 1e-12);
  }
  const auto T = full_shift();
  CHECK(kind_of([&] { chain_distribution(StateMeasure::uniform(2), TransitionKernel::uniform(T), 30); }) ==
        ErrorKind::TooLarge);
}

TEST_CASE("stationary chains have shift-invariant windows") {
  Rng rng(23);
  for (int k = 0; k < 30; ++k) {
    const auto c = random_chain(rng, 1 + k % 4);
    const auto law = chain_distribution(c.mu, c.Q, 4);
    const auto first = law.window(0, 2);
    const auto later = law.window(2, 2);
    REQUIRE(first.paths == later.paths);
    for (std::size_t p = 0; p < first.paths.size(); ++p) CHECK(std::abs(first.weights[p] - later.weights[p]) < 1e-12);
  }
}

TEST_CASE("one stationary measure per closed class") {
  Rng rng(24);
  for (int k = 0; k < 100; ++k) {
    const auto T = random_relation(rng, 1 + k % 9, 0.2);
    const auto Q = random_kernel(rng, T);
    const auto stationary = stationary_measures(Q);
    const auto scc = strongly_connected_components(T);
    const auto reach = oracle::reachability(T);
    int closed = 0;
    for (const auto& members : scc.members) {
      bool leaves = false;
      for (int t = 0; t < T.size(); ++t) leaves = leaves || (reach[members[0]][t] && !reach[t][members[0]]);
      closed += leaves ? 0 : 1;
    }
    CHECK(static_cast<int>(stationary.size()) == closed);
    for (const auto& mu : stationary) CHECK(stationarity_gap(mu, Q) < 1e-10);
  }
}

TEST_CASE("kernel entropy: closed form against enumeration") {
  Rng rng(25);
  for (int k = 0; k < 40; ++k) {
    const auto c = random_chain(rng, 1 + k % 4);
    const auto ke = kernel_entropy(c.mu, c.Q, 8, Partition::discrete(c.T.size()));
    CHECK(ke.cross_check_gap >= 0.0);
    CHECK(ke.cross_check_gap < 1e-12);
    for (int n = 1; n <= 5; ++n) {
      CHECK(std::abs(ke.sequence[n - 1] - oracle::entropy_of(oracle::chain_law(c.mu, c.Q, n - 1)) / n) < 1e-12);
    }
    CHECK(std::abs(ke.limit - entropy_rate(c.mu, c.Q)) < 1e-15);
  }
}

TEST_CASE("kernel entropy of a coarse partition against lumped enumeration") {
  Rng rng(26);
  for (int k = 0; k < 20; ++k) {
    const auto c = random_chain(rng, 3 + k % 2);
    const int n = c.T.size();
    Partition coarse = Partition::make(n, {{0, 1}, [&] {
                                             std::vector<int> rest;
                                             for (int s = 2; s < n; ++s) rest.push_back(s);
                                             return rest;
                                           }()});
    const auto ke = kernel_entropy(c.mu, c.Q, 5, coarse);
    for (int m = 1; m <= 5; ++m) {
      std::map<std::vector<int>, double> lumped;
      for (const auto& [path, w] : oracle::chain_law(c.mu, c.Q, m - 1)) {
        std::vector<int> cells;
        for (int s : path) cells.push_back(s < 2 ? 0 : 1);
        lumped[cells] += w;
      }
      CHECK(std::abs(ke.sequence[m - 1] - oracle::entropy_of(lumped) / m) < 1e-12);
    }
    // Coarse-grained entropy never exceeds the full rate in the limit estimate.
    CHECK(ke.limit <= entropy_rate(c.mu, c.Q) + 1e-9);
  }
}

TEST_CASE("Parry chain of the golden mean shift") {
  const auto T = golden_mean();
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  const auto Q = TransitionKernel::from_rows(T, {{{0, 1.0 / g}, {1, 1.0 / (g * g)}}, {{0, 1.0}}});
  const auto mu = stationary_measures(Q).front();
  CHECK(std::abs(mu.weights[0] - g * g / (1.0 + g * g)) < 1e-12);
  const auto ke = kernel_entropy(mu, Q, 10, Partition::discrete(2));
  CHECK(std::abs(ke.limit - std::log(g)) < 1e-12);
  CHECK(kind_of([&] { kernel_entropy(StateMeasure::dirac(2, 1), Q, 3, Partition::discrete(2)); }) ==
        ErrorKind::NotStationary);
}

TEST_CASE("invariance: lp and subset modes agree, witnesses and violators are genuine") {
  Rng rng(27);
  int positives = 0;
  for (int k = 0; k < 200; ++k) {
    const auto T = random_relation(rng, 1 + k % 10, 0.2);
    const auto mu = k % 2 ? random_invariant_measure(rng, T) : random_measure(rng, T.size());
    const auto lp = is_invariant(mu, T, InvarianceMode::Lp);
    const auto subsets = is_invariant(mu, T, InvarianceMode::Subsets);
    CHECK(lp.invariant == subsets.invariant);
    if (lp.invariant) {
      ++positives;
      REQUIRE(lp.witness);
      CHECK((lp.witness->first_marginal(T) - mu.weights).lpNorm<1>() < 1e-10);
      CHECK((lp.witness->second_marginal(T) - mu.weights).lpNorm<1>() < 1e-10);
      CHECK(stationarity_gap(mu, witness_kernel(T, *lp.witness)) < 1e-10);
    } else {
      REQUIRE(subsets.violating_subset);
      double inside = 0.0;
      double pre = 0.0;
      for (int s : *subsets.violating_subset) inside += mu.weights[s];
      for (int s : preimage(T, *subsets.violating_subset)) pre += mu.weights[s];
      CHECK(inside > pre + 1e-10);
    }
  }
  CHECK(positives >= 100);
  const auto big = random_relation(rng, 17, 0.2);
  CHECK(kind_of([&] { is_invariant(StateMeasure::uniform(17), big, InvarianceMode::Subsets); }) ==
        ErrorKind::ModeUnsupported);
}

TEST_CASE("extreme invariant measures are the non-decomposable simple-cycle measures") {
  Rng rng(28);
  int checked = 0;
  while (checked < 40) {
    const auto T = random_relation(rng, 1 + checked % 6, 0.3);
    if (T.edge_count() > kExtremeEdgeLimit) continue;
    ++checked;
    std::vector<Eigen::VectorXd> cycles;
    for (const auto& cycle : oracle::simple_cycles(T)) {
      const Eigen::VectorXd w = oracle::cycle_measure(T.size(), cycle);
      bool seen = false;
      for (const auto& c : cycles) seen = seen || (c - w).lpNorm<1>() < 1e-14;
      if (!seen) cycles.push_back(w);
    }
    // A cycle measure is extreme iff it is not a convex combination of the others.
    std::vector<Eigen::VectorXd> expected;
    for (std::size_t k = 0; k < cycles.size(); ++k) {
      std::vector<Eigen::VectorXd> others = cycles;
      others.erase(others.begin() + static_cast<std::ptrdiff_t>(k));
      if (oracle::hull_distance(others, cycles[k]) > 1e-9) expected.push_back(cycles[k]);
    }
    const auto extremes = invariant_polytope_extremes(T);
    CHECK(extremes.size() == expected.size());
    for (const auto& e : extremes) {
      bool found = false;
      for (const auto& x : expected) found = found || (x - e.weights).lpNorm<1>() < 1e-12;
      CHECK(found);
    }
  }
}

TEST_CASE("exact extremes are rational points summing to one") {
  // Cycles {0,1}, {1,2} and {0,1,2}: none is a mixture of the others.
  const auto T = FiniteCorrespondence::validate(3, {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 0}});
  const auto exact = invariant_polytope_extremes_exact(T);
  REQUIRE(exact.size() == 3);
  std::set<std::string> middles;
  for (const auto& v : exact) {
    CHECK(v.sum() == Rational(1));
    middles.insert(to_string(v[1]));
  }
  CHECK(middles == std::set<std::string>{"1/2", "1/3"});
}

TEST_CASE("extremal decomposition reconstructs the measure with a minimal set of extreme atoms") {
  Rng rng(29);
  int checked = 0;
  while (checked < 30) {
    const auto T = random_relation(rng, 2 + checked % 5, 0.3);
    if (T.edge_count() > kExtremeEdgeLimit) continue;
    ++checked;
    const auto mu = random_invariant_measure(rng, T, 2);
    const auto atoms = extremal_decomposition(mu, T);
    const auto extremes = invariant_polytope_extremes(T);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(T.size());
    double total = 0.0;
    for (const auto& a : atoms) {
      CHECK(a.weight > 0.0);
      total += a.weight;
      sum += a.weight * a.measure.weights;
      bool extreme = false;
      for (const auto& e : extremes) extreme = extreme || (e.weights - a.measure.weights).lpNorm<1>() < 1e-12;
      CHECK(extreme);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK((sum - mu.weights).lpNorm<1>() < 1e-10);
    CHECK(static_cast<int>(atoms.size()) <= T.size());
    // No smaller set of extremes reaches mu.
    const std::size_t fewer = atoms.size() - 1;
    if (fewer == 0) continue;
    std::vector<int> pick(fewer);
    std::function<bool(std::size_t, int)> any_reaches = [&](std::size_t depth, int from) {
      if (depth == fewer) {
        std::vector<Eigen::VectorXd> pts;
        for (int j : pick) pts.push_back(extremes[static_cast<std::size_t>(j)].weights);
        return oracle::hull_distance(pts, mu.weights) < 1e-9;
      }
      for (int j = from; j < static_cast<int>(extremes.size()); ++j) {
        pick[depth] = j;
        if (any_reaches(depth + 1, j + 1)) return true;
      }
      return false;
    };
    CHECK_FALSE(any_reaches(0, 0));
  }
  const auto T = FiniteCorrespondence::validate(2, {{0, 1}, {1, 1}});
  CHECK(kind_of([&] { extremal_decomposition(StateMeasure::dirac(2, 0), T); }) == ErrorKind::NotInvariant);
}

TEST_CASE("hat lift, forward and inverse") {
  // Block {1, 2, 3}: a 3-cycle as the graph of a map, plus an escape into it from 0.
  const auto T = FiniteCorrespondence::validate(4, {{0, 0}, {0, 1}, {1, 2}, {2, 3}, {3, 1}});
  const Eigen::Vector3d block_mu(1.0 / 3, 1.0 / 3, 1.0 / 3);
  const auto forward = hat_lift(block_mu, {1, 2, 3}, T, LiftVariant::Forward);
  CHECK(stationarity_gap(forward.measure, forward.kernel) < 1e-12);
  CHECK(forward.measure.weights[0] == 0.0);

  // Inverse graph of the map 1 -> 1, 2 -> 1 on block {1, 2}: edges 1 -> 1 and 1 -> 2.
  const auto S = FiniteCorrespondence::validate(3, {{0, 0}, {0, 2}, {1, 1}, {1, 2}, {2, 0}});
  const auto inverse = hat_lift(Eigen::Vector2d(1.0, 0.0), {1, 2}, S, LiftVariant::Inverse);
  CHECK(stationarity_gap(inverse.measure, inverse.kernel) < 1e-12);
  CHECK(inverse.kernel(1, 1) == 1.0);

  CHECK(kind_of([&] { hat_lift(Eigen::Vector2d(0.5, 0.5), {0, 1}, T, LiftVariant::Forward); }) ==
        ErrorKind::NotAFunctionOnBlock);
  CHECK(kind_of([&] { hat_lift(Eigen::Vector3d(0.5, 0.25, 0.25), {1, 2, 3}, T, LiftVariant::Forward); }) ==
        ErrorKind::NotInvariantOnBlock);
  const auto no_predecessor = FiniteCorrespondence::validate(2, {{0, 1}, {1, 1}});
  CHECK(kind_of([&] { hat_lift(Eigen::Matrix<double, 1, 1>(1.0), {1}, no_predecessor, LiftVariant::Inverse); }) ==
        ErrorKind::NotSurjective);
}

TEST_CASE("hat lift on generated map blocks gives invariant kernels") {
  Rng rng(30);
  for (int k = 0; k < 40; ++k) {
    const auto br = random_map_blocks(rng, 1 + k % 3, 1, 4, 2);
    const auto& block = br.blocks.back();
    const auto induced = induced_relation(br.relation, block);
    const bool forward = std::all_of(block.begin(), block.end(), [&](int s) {
      int inside = 0;
      for (int t : br.relation.successors(s)) inside += std::count(block.begin(), block.end(), t) ? 1 : 0;
      return inside == 1;
    });
    // The last block receives no edges from later blocks, so its invariant measures lift directly.
    const auto local = stationary_measures(TransitionKernel::uniform(induced.relation)).front();
    if (forward) {
      const auto lift = hat_lift(local.weights, block, br.relation, LiftVariant::Forward);
      CHECK(stationarity_gap(lift.measure, lift.kernel) < 1e-10);
      CHECK(is_invariant(lift.measure, br.relation).invariant);
    }
  }
}

TEST_CASE("relabeling transports measures and kernels") {
  Rng rng(31);
  for (int k = 0; k < 50; ++k) {
    const auto c = random_chain(rng, 1 + k % 6);
    const auto theta = random_permutation(rng, c.T.size());
    const auto r = relabel(c.T, Potential::zero(c.T), theta);
    const auto mu2 = relabel_measure(c.mu, theta);
    const auto Q2 = relabel_kernel(c.Q, r.relation, theta);
    for (int i = 0; i < c.T.size(); ++i) {
      CHECK(mu2.weights[theta[i]] == c.mu.weights[i]);
      for (int j : c.T.successors(i)) CHECK(Q2(theta[i], theta[j]) == c.Q(i, j));
    }
    CHECK(std::abs(entropy_rate(mu2, Q2) - entropy_rate(c.mu, c.Q)) < 1e-12);
    const auto nu2 = relabel_pair_measure(c.T, pair_measure(c.mu, c.Q), r.relation, theta);
    CHECK((nu2.weights - pair_measure(mu2, Q2).weights).lpNorm<1>() < 1e-12);
  }
}
