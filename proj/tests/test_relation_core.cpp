#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "thermo/correspondence.hpp"
#include "thermo/error.hpp"
#include "thermo/generators.hpp"
#include "thermo/pressure.hpp"

using namespace thermo;

namespace {

FiniteCorrespondence full_shift() { return FiniteCorrespondence::validate(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}); }
FiniteCorrespondence golden_mean() { return FiniteCorrespondence::validate(2, {{0, 0}, {0, 1}, {1, 0}}); }

const double kLog2 = std::log(2.0);
const double kLogGolden = std::log((1.0 + std::sqrt(5.0)) / 2.0);

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no Error thrown");
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("validate sorts edges and builds successor rows") {
  const auto T = FiniteCorrespondence::validate(3, {{2, 0}, {0, 2}, {1, 1}, {0, 1}});
  CHECK(T.edge_count() == 4);
  CHECK(T.edge(0) == Edge{0, 1});
  CHECK(T.edge(3) == Edge{2, 0});
  CHECK(T.out_degree(0) == 2);
  const auto succ = T.successors(0);
  CHECK(std::vector<int>(succ.begin(), succ.end()) == std::vector<int>{1, 2});
  CHECK(T.predecessors(1) == std::vector<int>{0, 1});
  CHECK(*T.edge_index(1, 1) == 2);
  CHECK_FALSE(T.has_edge(1, 0));
  CHECK(T.is_surjective());
}

TEST_CASE("validate reports every empty successor") {
  try {
    FiniteCorrespondence::validate(4, {{0, 1}, {2, 1}});
    FAIL("expected EmptySuccessor");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptySuccessor);
    CHECK(e.details() == std::vector<std::string>{"EmptySuccessor(1)", "EmptySuccessor(3)"});
  }
}

TEST_CASE("validate rejects duplicates, bad indices and label mismatches") {
  CHECK(kind_of([] { FiniteCorrespondence::validate(2, {{0, 1}, {0, 1}, {1, 0}}); }) == ErrorKind::DuplicateEdge);
  CHECK(kind_of([] { FiniteCorrespondence::validate(2, {{0, 2}, {1, 0}}); }) == ErrorKind::IndexOutOfRange);
  CHECK(kind_of([] { FiniteCorrespondence::validate(2, {{0, 1}, {1, 0}}, {"a"}); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("paths and Birkhoff sums") {
  const auto T = golden_mean();
  const Potential phi{Eigen::Vector3d(0.5, -1.0, 2.0)};
  const Path p = Path::make(T, {0, 0, 1, 0});
  CHECK(birkhoff_sum(T, phi, p) == doctest::Approx(0.5 - 1.0 + 2.0));
  CHECK(kind_of([&] { Path::make(T, {1, 1}); }) == ErrorKind::InvalidPath);
  CHECK(kind_of([&] { Path::make(T, {}); }) == ErrorKind::InvalidPath);
}

TEST_CASE("map graphs and their inverses") {
  const auto F = from_map(3, {1, 2, 0}, MapDirection::Forward);
  CHECK(F.edge_count() == 3);
  CHECK(F.has_edge(0, 1));
  const auto G = from_map(3, {1, 2, 0}, MapDirection::Inverse);
  CHECK(G.has_edge(1, 0));
  CHECK(kind_of([] { from_map(3, {0, 0, 1}, MapDirection::Inverse); }) == ErrorKind::NotSurjective);
  CHECK(inverse_correspondence(F) == G);
}

TEST_CASE("strongly connected components agree with mutual reachability") {
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    const auto T = random_relation(rng, 1 + k % 9, 0.2);
    const auto scc = strongly_connected_components(T);
    const auto reach = oracle::reachability(T);
    for (int i = 0; i < T.size(); ++i) {
      for (int j = 0; j < T.size(); ++j) {
        CHECK((scc.component_of[i] == scc.component_of[j]) == (reach[i][j] && reach[j][i]));
      }
    }
    for (std::size_t c = 1; c < scc.members.size(); ++c) CHECK(scc.members[c - 1][0] < scc.members[c][0]);
  }
}

TEST_CASE("cyclic period matches the gcd of closed-walk lengths") {
  Rng rng(12);
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 6;
    // A cycle of length n with chords that skip, so periods other than 1 occur.
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
    const int stride = 1 + static_cast<int>(rng() % 3);
    if (n > stride) edges.push_back({0, stride % n});
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    const auto T = FiniteCorrespondence::validate(n, edges);
    std::vector<WeightedEdge> weighted;
    for (const auto& e : T.edges()) weighted.push_back({e.from, e.to, 0.0});
    const Eigen::MatrixXd A = T.adjacency();
    Eigen::MatrixXd power = A;
    int g = 0;
    for (int len = 1; len <= 2 * n; ++len) {
      if (power.trace() > 0.0) g = std::gcd(g, len);
      power = power * A;
    }
    CHECK(cyclic_period(n, weighted) == g);
  }
}

TEST_CASE("spectral pressure of the shifts") {
  CHECK(spectral_pressure(full_shift(), Potential::zero(full_shift())).pressure == doctest::Approx(kLog2).epsilon(1e-14));
  const auto sp = spectral_pressure(golden_mean(), Potential::zero(golden_mean()));
  CHECK(std::abs(sp.pressure - kLogGolden) < 1e-13);
  CHECK(std::abs(sp.pressure - 0.481212) < 1e-6);
  CHECK(sp.unique());
}

TEST_CASE("two self-loops tie as dominant classes") {
  const auto T = FiniteCorrespondence::validate(2, {{0, 0}, {1, 1}});
  const auto sp = spectral_pressure(T, Potential::zero(T));
  CHECK(sp.pressure == doctest::Approx(0.0));
  CHECK(sp.dominant_classes == std::vector<int>{0, 1});
}

TEST_CASE("spectral pressure matches a dense eigen-solver") {
  Rng rng(13);
  for (int k = 0; k < 300; ++k) {
    const auto T = random_relation(rng, 1 + k % 12, 0.25);
    const auto phi = random_potential(rng, T, -2.0, 2.0);
    CHECK(std::abs(spectral_pressure(T, phi).pressure - oracle::dense_pressure(T, phi)) < 1e-9);
  }
}

TEST_CASE("periodic components: Perron vectors are eigenvectors") {
  // Cycles of lengths 3 and 6 sharing the arc 0 -> 1 -> 2: period 3.
  const auto T = FiniteCorrespondence::validate(
      6, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
  Rng rng(14);
  const auto phi = random_potential(rng, T);
  const auto sp = spectral_pressure(T, phi, true);
  REQUIRE(sp.components.size() == 1);
  const auto& c = sp.components[0];
  CHECK(c.period == 3);
  const Eigen::MatrixXd M = oracle::weighted_matrix(T, phi);
  const Eigen::VectorXd r = c.right.cwiseProduct(c.gauge.array().exp().matrix());
  const Eigen::VectorXd l = c.left.cwiseProduct((-c.gauge).array().exp().matrix());
  const double rho = std::exp(c.log_radius);
  CHECK((M * r - rho * r).norm() < 1e-10 * r.norm());
  CHECK((l.transpose() * M - rho * l.transpose()).norm() < 1e-10 * l.norm());
}

TEST_CASE("widely spread weights keep the Perron data accurate") {
  // exp of a large coboundary: entries span thousands of orders of magnitude.
  Rng rng(15);
  for (int k = 0; k < 50; ++k) {
    const auto T = random_primitive(rng, 2 + k % 6, 0.4);
    const auto phi = random_potential(rng, T);
    const Eigen::VectorXd g = 2000.0 * random_state_function(rng, T.size());
    Potential shifted = phi;
    shifted.values += coboundary(T, g).values;
    CHECK(std::abs(spectral_pressure(T, shifted).pressure - spectral_pressure(T, phi).pressure) < 1e-9);
  }
}

TEST_CASE("path pressure sequence matches brute-force enumeration") {
  Rng rng(16);
  for (int k = 0; k < 60; ++k) {
    const auto T = random_relation(rng, 1 + k % 4, 0.4);
    const auto phi = random_potential(rng, T);
    const int n_max = 7;
    const auto a = path_pressure_sequence(T, phi, n_max);
    REQUIRE(a.size() == static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) CHECK(std::abs(a[n - 1] - oracle::brute_path_pressure(T, phi, n)) < 1e-12);
  }
}

TEST_CASE("path pressure converges at rate 5/n on primitive relations") {
  Rng rng(17);
  for (int k = 0; k < 100; ++k) {
    const auto T = random_primitive(rng, 1 + k % 12, 0.3);
    const auto phi = random_potential(rng, T);
    const double P = spectral_pressure(T, phi).pressure;
    const auto a = path_pressure_sequence(T, phi, 1000);
    CHECK(std::abs(a[99] - P) <= 5.0 / 100);
    CHECK(std::abs(a[999] - P) <= 5.0 / 1000);
  }
  const auto a = path_pressure_sequence(golden_mean(), Potential::zero(golden_mean()), 1000);
  CHECK(std::abs(a.back() - 0.481212) < 5e-3);
}

TEST_CASE("basic pressure properties") {
  Rng rng(18);
  for (int k = 0; k < 100; ++k) {
    const auto T = random_relation(rng, 1 + k % 10, 0.3);
    const auto phi = random_potential(rng, T);
    const auto psi = random_potential(rng, T);
    const double P = spectral_pressure(T, phi).pressure;
    const double c = 3.0 * (static_cast<double>(rng() % 1000) / 1000.0 - 0.5);
    CHECK(std::abs(spectral_pressure(T, {phi.values.array() + c}).pressure - P - c) < 1e-9);
    const Potential cob = coboundary(T, random_state_function(rng, T.size(), -3.0, 3.0));
    CHECK(std::abs(spectral_pressure(T, {phi.values + cob.values}).pressure - P) < 1e-9);
    const Potential bigger{phi.values.cwiseMax(psi.values)};
    CHECK(spectral_pressure(T, bigger).pressure >= P - 1e-12);
    for (double t : {0.25, 0.5, 0.75}) {
      const double mid = spectral_pressure(T, {t * phi.values + (1 - t) * psi.values}).pressure;
      CHECK(mid <= t * P + (1 - t) * spectral_pressure(T, psi).pressure + 1e-9);
    }
  }
}

TEST_CASE("pressure is invariant under inversion and relabeling") {
  Rng rng(19);
  for (int k = 0; k < 100; ++k) {
    const auto T = random_primitive(rng, 1 + k % 8, 0.3);
    const auto phi = random_potential(rng, T);
    const auto Tinv = inverse_correspondence(T);
    const auto P = spectral_pressure(T, phi).pressure;
    CHECK(std::abs(spectral_pressure(Tinv, reverse_potential(T, phi, Tinv)).pressure - P) < 1e-9);
    const auto theta = random_permutation(rng, T.size());
    const auto r = relabel(T, phi, theta);
    const auto edge_map = relabel_edge_map(T, r.relation, theta);
    for (int e = 0; e < T.edge_count(); ++e) CHECK(r.potential.values[edge_map[e]] == phi.values[e]);
    CHECK(std::abs(spectral_pressure(r.relation, r.potential).pressure - P) < 1e-12);
  }
  CHECK(kind_of([] { relabel(full_shift(), Potential::zero(full_shift()), {0, 0}); }) == ErrorKind::NotBijective);
}

TEST_CASE("potential shape is checked") {
  CHECK(kind_of([] { spectral_pressure(full_shift(), {Eigen::VectorXd::Zero(3)}); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("induced relation keeps the block's internal edges") {
  const auto T = FiniteCorrespondence::validate(4, {{0, 1}, {1, 0}, {1, 2}, {2, 3}, {3, 2}, {3, 3}});
  const auto ind = induced_relation(T, {2, 3});
  CHECK(ind.relation.size() == 2);
  CHECK(ind.relation.edge_count() == 3);
  CHECK(T.edge(ind.global_edge[0]) == Edge{2, 3});
  CHECK(kind_of([&] { induced_relation(T, {1, 2}); }) == ErrorKind::EmptySuccessor);
}

TEST_CASE("decomposition validation names the violated condition") {
  const auto T = FiniteCorrespondence::validate(4, {{0, 1}, {1, 0}, {1, 2}, {2, 3}, {3, 2}, {3, 3}});
  CHECK(decomposition_validate(T, {{0, 1}, {2, 3}}).ok);
  const auto missing = decomposition_validate(T, {{0, 1}, {2}});
  CHECK(missing.violated_condition == 1);
  CHECK(missing.witness_state == 3);
  const auto escape = decomposition_validate(T, {{0, 1, 2}, {3}});
  CHECK(escape.violated_condition == 3);
  const auto backward = decomposition_validate(T, {{2, 3}, {0, 1}});
  CHECK(backward.violated_condition == 5);
  CHECK(backward.witness_edge == Edge{1, 2});
  CHECK(kind_of([&] { decomposition_pressure(T, Potential::zero(T), {{2, 3}, {0, 1}}); }) ==
        ErrorKind::InvalidDecomposition);
}

TEST_CASE("decomposition pressure equals the maximum block pressure") {
  Rng rng(20);
  for (int k = 0; k < 50; ++k) {
    const auto br = random_block_relation(rng, 2 + k % 3, 1, 4, 0.4);
    REQUIRE(decomposition_validate(br.relation, br.blocks).ok);
    const auto phi = random_potential(rng, br.relation);
    const auto d = decomposition_pressure(br.relation, phi, br.blocks);
    CHECK(d.block_pressures.size() == br.blocks.size());
    CHECK(std::abs(d.pressure - oracle::dense_pressure(br.relation, phi)) < 1e-9);
  }
}
