#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "thermo/correspondence.hpp"
#include "thermo/rational.hpp"

namespace thermo {

struct LinearPiece {
  Rational slope;
  Rational intercept;
};

/// Continuous piecewise-linear self-map of a subinterval [b_0, b_k] of [0,1]
/// with exact rational data. Piece p lives on [b_p, b_{p+1}].
class PiecewiseLinearMap {
 public:
  /// Checks increasing breakpoints in [0,1], one piece per gap, continuity at
  /// interior breakpoints and image inside [0,1]. Throws InvalidInput.
  static PiecewiseLinearMap make(std::vector<Rational> breakpoints, std::vector<LinearPiece> pieces);

  const std::vector<Rational>& breakpoints() const { return breakpoints_; }
  const std::vector<LinearPiece>& pieces() const { return pieces_; }
  const Rational& domain_begin() const { return breakpoints_.front(); }
  const Rational& domain_end() const { return breakpoints_.back(); }
  bool contains(const Rational& x) const { return x >= domain_begin() && x <= domain_end(); }

  /// Index of the piece whose closed interval contains [a, b], or -1.
  int piece_covering(const Rational& a, const Rational& b) const;

 private:
  PiecewiseLinearMap(std::vector<Rational> b, std::vector<LinearPiece> p)
      : breakpoints_(std::move(b)), pieces_(std::move(p)) {}

  std::vector<Rational> breakpoints_;
  std::vector<LinearPiece> pieces_;
};

/// Exact value; throws OutOfDomain outside the map's interval.
Rational pl_eval(const PiecewiseLinearMap& map, const Rational& x);

/// T(x) = { branch(x) : branch defined at x }.
struct IntervalCorrespondence {
  std::vector<PiecewiseLinearMap> branches;

  static IntervalCorrespondence make(std::vector<PiecewiseLinearMap> branches);
};

/// Finite model on the cells [k/N, (k+1)/N), the last one closed.
struct GridRelation {
  int resolution = 0;
  FiniteCorrespondence relation;

  Rational cell_begin(int k) const { return Rational(k) / resolution; }
  Rational cell_end(int k) const { return Rational(k + 1) / resolution; }
};

/// Cell i -> cell j iff some branch maps cell i onto a set meeting cell j in
/// positive length, or maps it to a single point of cell j.
/// Throws InvalidInput (N not a power of two >= 4), MisalignedBreakpoints,
/// DegenerateCell (a cell with no successor).
GridRelation grid_discretize(const IntervalCorrespondence& T, int resolution);

/// phi(i, j) = fn(center of cell i, center of cell j).
Potential sample_potential(const GridRelation& grid, const std::function<double(double, double)>& fn);

struct MarkovModel {
  FiniteCorrespondence relation;
  std::vector<Rational> partition;
  double entropy = 0.0;  // spectral pressure with phi = 0
};

/// Closed cells [p_k, p_{k+1}] of a Markov partition of the map's interval.
/// Cell i -> cell j iff the image of cell i contains cell j. Throws NotMarkov.
MarkovModel markov_model(const PiecewiseLinearMap& map, const std::vector<Rational>& partition);

/// The two-branch example: f, g on [0,1], h1 the identity on [0,1/2] and
/// h2 the tent-like map of [1/2,1] onto itself.
struct ExampleMaps {
  PiecewiseLinearMap f;
  PiecewiseLinearMap g;
  PiecewiseLinearMap h1;
  PiecewiseLinearMap h2;
};

ExampleMaps example_maps();
IntervalCorrespondence example_correspondence();

/// Route (b) must fall within this distance of log 2 at N = 1024.
inline constexpr double kExampleBand = 1e-9;

struct ExampleReport {
  int resolution = 0;
  double markov_route = 0.0;       // (a) block decomposition of the Markov models
  double grid_route = 0.0;         // (b) spectral pressure of the grid relation
  double variational_route = 0.0;  // (c) entropy plus integral of the Gibbs pairs
  double band_half_width = kExampleBand;
  double grid_gap = 0.0;           // |(b) - log 2|
  double route_gap = 0.0;          // |(c) - (b)|
  bool grid_blocks_valid = false;  // X1 = cells below 1/2, X2 = cells above
  std::vector<std::pair<int, double>> refinement;  // (N, route (b)) for N = 8, 16, ...
  FiniteCorrespondence markov_relation;
  std::vector<std::vector<int>> markov_blocks;
};

/// Runs all three routes. N must be a power of two >= 8.
ExampleReport worked_example(int resolution);

}  // namespace thermo
