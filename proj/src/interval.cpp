#include "thermo/interval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "thermo/error.hpp"
#include "thermo/kernel.hpp"
#include "thermo/pressure.hpp"
#include "thermo/variational.hpp"

namespace thermo {

namespace {

Rational frac(long p, long q) { return Rational(p) / Rational(q); }

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Closure of the image of [a, b] under one linear piece.
std::pair<Rational, Rational> piece_image(const LinearPiece& piece, const Rational& a, const Rational& b) {
  const Rational u = piece.slope * a + piece.intercept;
  const Rational v = piece.slope * b + piece.intercept;
  return {std::min(u, v), std::max(u, v)};
}

// Closed cells of `partition` meeting [lo, hi] in positive length.
std::vector<int> cells_met(const std::vector<Rational>& partition, const Rational& lo, const Rational& hi) {
  std::vector<int> out;
  for (std::size_t k = 0; k + 1 < partition.size(); ++k) {
    if (std::max(lo, partition[k]) < std::min(hi, partition[k + 1])) out.push_back(static_cast<int>(k));
  }
  return out;
}

}  // namespace

PiecewiseLinearMap PiecewiseLinearMap::make(std::vector<Rational> breakpoints,
                                            std::vector<LinearPiece> pieces) {
  if (breakpoints.size() < 2) throw Error(ErrorKind::InvalidInput, "a map needs at least two breakpoints");
  if (pieces.size() + 1 != breakpoints.size()) {
    throw Error(ErrorKind::InvalidInput, "need exactly one piece between consecutive breakpoints");
  }
  if (breakpoints.front() < Rational(0) || breakpoints.back() > Rational(1)) {
    throw Error(ErrorKind::InvalidInput, "breakpoints must lie in [0,1]");
  }
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!(breakpoints[k] < breakpoints[k + 1])) {
      throw Error(ErrorKind::InvalidInput, "breakpoints must be strictly increasing");
    }
  }
  for (std::size_t k = 1; k + 1 < breakpoints.size(); ++k) {
    const Rational left = pieces[k - 1].slope * breakpoints[k] + pieces[k - 1].intercept;
    const Rational right = pieces[k].slope * breakpoints[k] + pieces[k].intercept;
    if (left != right) {
      throw Error(ErrorKind::InvalidInput, "map is discontinuous at " + to_string(breakpoints[k]));
    }
  }
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const auto [lo, hi] = piece_image(pieces[k], breakpoints[k], breakpoints[k + 1]);
    if (lo < Rational(0) || hi > Rational(1)) {
      throw Error(ErrorKind::InvalidInput, "map leaves [0,1] on piece " + std::to_string(k));
    }
  }
  return PiecewiseLinearMap(std::move(breakpoints), std::move(pieces));
}

int PiecewiseLinearMap::piece_covering(const Rational& a, const Rational& b) const {
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    if (breakpoints_[k] <= a && b <= breakpoints_[k + 1]) return static_cast<int>(k);
  }
  return -1;
}

Rational pl_eval(const PiecewiseLinearMap& map, const Rational& x) {
  if (!map.contains(x)) throw Error(ErrorKind::OutOfDomain, to_string(x) + " is outside the map's interval");
  const int k = map.piece_covering(x, x);
  const LinearPiece& piece = map.pieces()[static_cast<std::size_t>(k)];
  return piece.slope * x + piece.intercept;
}

IntervalCorrespondence IntervalCorrespondence::make(std::vector<PiecewiseLinearMap> branches) {
  if (branches.empty()) throw Error(ErrorKind::InvalidInput, "a correspondence needs at least one branch");
  return {std::move(branches)};
}

GridRelation grid_discretize(const IntervalCorrespondence& T, int resolution) {
  if (resolution < 4 || !is_power_of_two(resolution)) {
    throw Error(ErrorKind::InvalidInput, "grid resolution must be a power of two >= 4");
  }
  if (T.branches.empty()) throw Error(ErrorKind::InvalidInput, "a correspondence needs at least one branch");
  const Rational N(resolution);
  for (const auto& branch : T.branches) {
    for (const auto& b : branch.breakpoints()) {
      if (boost::multiprecision::denominator(b * N) != 1) {
        throw Error(ErrorKind::MisalignedBreakpoints,
                    "breakpoint " + to_string(b) + " is not a multiple of 1/" + std::to_string(resolution));
      }
    }
  }

  std::set<Edge> edges;
  for (int i = 0; i < resolution; ++i) {
    const Rational a = Rational(i) / N;
    const Rational b = Rational(i + 1) / N;
    for (const auto& branch : T.branches) {
      if (!branch.contains(a) || !branch.contains(b)) continue;
      const int k = branch.piece_covering(a, b);
      const auto [lo, hi] = piece_image(branch.pieces()[static_cast<std::size_t>(k)], a, b);
      if (lo == hi) {
        const int j = std::min(resolution - 1, static_cast<int>(to_double(floor(lo * N))));
        edges.insert({i, j});
        continue;
      }
      const int first = static_cast<int>(to_double(floor(lo * N)));
      const int last = static_cast<int>(to_double(ceil(hi * N))) - 1;
      for (int j = first; j <= last; ++j) edges.insert({i, j});
    }
  }
  std::vector<bool> has_successor(static_cast<std::size_t>(resolution), false);
  for (const Edge& e : edges) has_successor[static_cast<std::size_t>(e.from)] = true;
  for (int i = 0; i < resolution; ++i) {
    if (!has_successor[static_cast<std::size_t>(i)]) {
      throw Error(ErrorKind::DegenerateCell, "cell " + std::to_string(i) + " has no image under any branch");
    }
  }
  return {resolution, FiniteCorrespondence::validate(resolution, {edges.begin(), edges.end()})};
}

Potential sample_potential(const GridRelation& grid, const std::function<double(double, double)>& fn) {
  const auto& T = grid.relation;
  Eigen::VectorXd values(T.edge_count());
  for (int e = 0; e < T.edge_count(); ++e) {
    const double x = (T.edge(e).from + 0.5) / grid.resolution;
    const double y = (T.edge(e).to + 0.5) / grid.resolution;
    values[e] = fn(x, y);
  }
  return {std::move(values)};
}

MarkovModel markov_model(const PiecewiseLinearMap& map, const std::vector<Rational>& partition) {
  if (partition.size() < 2) throw Error(ErrorKind::InvalidInput, "a partition needs at least one cell");
  for (std::size_t k = 0; k + 1 < partition.size(); ++k) {
    if (!(partition[k] < partition[k + 1])) throw Error(ErrorKind::InvalidInput, "partition points must increase");
  }
  if (partition.front() != map.domain_begin() || partition.back() != map.domain_end()) {
    throw Error(ErrorKind::NotMarkov, "partition does not cover the map's interval");
  }
  const int cells = static_cast<int>(partition.size()) - 1;
  std::vector<Edge> edges;
  for (int i = 0; i < cells; ++i) {
    const Rational& a = partition[static_cast<std::size_t>(i)];
    const Rational& b = partition[static_cast<std::size_t>(i + 1)];
    const int k = map.piece_covering(a, b);
    if (k < 0) throw Error(ErrorKind::NotMarkov, "cell " + std::to_string(i) + " straddles a breakpoint");
    const auto [lo, hi] = piece_image(map.pieces()[static_cast<std::size_t>(k)], a, b);
    const auto lo_at = std::find(partition.begin(), partition.end(), lo);
    const auto hi_at = std::find(partition.begin(), partition.end(), hi);
    if (lo == hi || lo_at == partition.end() || hi_at == partition.end()) {
      throw Error(ErrorKind::NotMarkov, "image of cell " + std::to_string(i) + " is not a union of cells");
    }
    for (auto j = lo_at - partition.begin(); j < hi_at - partition.begin(); ++j) {
      edges.push_back({i, static_cast<int>(j)});
    }
  }
  MarkovModel out;
  out.relation = FiniteCorrespondence::validate(cells, std::move(edges));
  out.partition = partition;
  out.entropy = spectral_pressure(out.relation, Potential::zero(out.relation)).pressure;
  return out;
}

ExampleMaps example_maps() {
  const Rational zero(0), one(1), half = frac(1, 2), quarter = frac(1, 4), three_quarters = frac(3, 4);
  return {
      PiecewiseLinearMap::make({zero, half, one}, {{one, zero}, {half, quarter}}),
      PiecewiseLinearMap::make({zero, quarter, half, one},
                               {{Rational(-2), one}, {Rational(2), zero}, {-half, frac(5, 4)}}),
      PiecewiseLinearMap::make({zero, half}, {{one, zero}}),
      PiecewiseLinearMap::make({half, three_quarters, one},
                               {{Rational(2), -half}, {Rational(-2), frac(5, 2)}}),
  };
}

IntervalCorrespondence example_correspondence() {
  ExampleMaps maps = example_maps();
  return IntervalCorrespondence::make({std::move(maps.f), std::move(maps.g)});
}

ExampleReport worked_example(int resolution) {
  if (resolution < 8 || !is_power_of_two(resolution)) {
    throw Error(ErrorKind::InvalidInput, "example resolution must be a power of two >= 8");
  }
  const ExampleMaps maps = example_maps();
  const IntervalCorrespondence T = example_correspondence();
  ExampleReport report;
  report.resolution = resolution;

  // (a) X1 = [0,1/2] carried by h1, X2 = [1/2,1] carried by the inverse of h2,
  // joined by the edges T sends from X1 into X2.
  const MarkovModel low = markov_model(maps.h1, {Rational(0), frac(1, 2)});
  const MarkovModel high = markov_model(maps.h2, {frac(1, 2), frac(3, 4), Rational(1)});
  const FiniteCorrespondence high_inverse = inverse_correspondence(high.relation);
  const int offset = low.relation.size();
  std::vector<Edge> edges(low.relation.edges().begin(), low.relation.edges().end());
  for (const Edge& e : high_inverse.edges()) edges.push_back({e.from + offset, e.to + offset});
  for (int i = 0; i < low.relation.size(); ++i) {
    const Rational& a = low.partition[static_cast<std::size_t>(i)];
    const Rational& b = low.partition[static_cast<std::size_t>(i + 1)];
    for (const auto& branch : T.branches) {
      for (std::size_t k = 0; k < branch.pieces().size(); ++k) {
        const Rational lo = std::max(a, branch.breakpoints()[k]);
        const Rational hi = std::min(b, branch.breakpoints()[k + 1]);
        if (!(lo < hi)) continue;
        const auto [ilo, ihi] = piece_image(branch.pieces()[k], lo, hi);
        for (int j : cells_met(high.partition, ilo, ihi)) edges.push_back({i, j + offset});
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  report.markov_relation = FiniteCorrespondence::validate(offset + high.relation.size(), std::move(edges));
  report.markov_blocks = {{}, {}};
  for (int s = 0; s < offset; ++s) report.markov_blocks[0].push_back(s);
  for (int s = 0; s < high.relation.size(); ++s) report.markov_blocks[1].push_back(s + offset);
  report.markov_route = decomposition_pressure(report.markov_relation, Potential::zero(report.markov_relation),
                                               report.markov_blocks)
                            .pressure;

  // (b) grid estimates with refinement.
  GridRelation grid;
  for (int n = 8; n <= resolution; n *= 2) {
    grid = grid_discretize(T, n);
    report.refinement.emplace_back(n, spectral_pressure(grid.relation, Potential::zero(grid.relation)).pressure);
  }
  report.grid_route = report.refinement.back().second;
  std::vector<std::vector<int>> halves(2);
  for (int s = 0; s < resolution; ++s) halves[s < resolution / 2 ? 0 : 1].push_back(s);
  report.grid_blocks_valid = decomposition_validate(grid.relation, halves).ok;

  // (c) entropy plus integral of each extreme tangent on the same grid relation.
  const Potential zero = Potential::zero(grid.relation);
  const TangentSet tangents = tangent_functionals(grid.relation, zero);
  report.variational_route = -std::numeric_limits<double>::infinity();
  for (const auto& nu : tangents.extreme_tangents) {
    const TransitionKernel Q = TransitionKernel::from_pair_measure(grid.relation, nu);
    const StateMeasure mu{nu.first_marginal(grid.relation)};
    report.variational_route = std::max(report.variational_route, entropy_rate(mu, Q) + nu.integrate(zero));
  }

  report.grid_gap = std::abs(report.grid_route - std::log(2.0));
  report.route_gap = std::abs(report.variational_route - report.grid_route);
  return report;
}

}  // namespace thermo
