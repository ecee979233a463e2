#include "thermo/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "thermo/error.hpp"
#include "thermo/simplex.hpp"

namespace thermo {

namespace {

constexpr double kFeasibilityTolerance = 1e-10;
constexpr std::size_t kCombinationBudget = 200000;
constexpr double kSupportTolerance = 1e-9;

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> marginal_system(const FiniteCorrespondence& T) {
  const int n = T.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(2 * n, T.edge_count());
  for (int e = 0; e < T.edge_count(); ++e) {
    A(T.edge(e).from, e) = Scalar(1);
    A(n + T.edge(e).to, e) = Scalar(1);
  }
  return A;
}

std::optional<PairMeasure> lp_witness(const StateMeasure& mu, const FiniteCorrespondence& T) {
  const Eigen::MatrixXd A = marginal_system<double>(T);
  Eigen::VectorXd b(2 * T.size());
  b << mu.weights, mu.weights;
  const auto x = feasible_point<double>(A, b);
  if (!x) return std::nullopt;
  Eigen::VectorXd w = x->cwiseMax(0.0);
  w /= w.sum();
  return PairMeasure{std::move(w)};
}

std::optional<std::vector<int>> subset_violation(const StateMeasure& mu,
                                                 const FiniteCorrespondence& T) {
  const int n = T.size();
  std::vector<std::uint32_t> successors(static_cast<std::size_t>(n), 0);
  for (const Edge& e : T.edges()) successors[e.from] |= std::uint32_t{1} << e.to;
  const std::uint32_t full = n == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1;
  for (std::uint32_t subset = 1; subset <= full && subset != 0; ++subset) {
    double mass = 0.0;
    double pre = 0.0;
    for (int x = 0; x < n; ++x) {
      if (subset >> x & 1U) mass += mu.weights[x];
      if (successors[x] & subset) pre += mu.weights[x];
    }
    if (mass > pre + kFeasibilityTolerance) {
      std::vector<int> out;
      for (int x = 0; x < n; ++x) {
        if (subset >> x & 1U) out.push_back(x);
      }
      return out;
    }
  }
  return std::nullopt;
}

bool lex_less(const RationalVector& u, const RationalVector& v) {
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    if (u[k] < v[k]) return true;
    if (v[k] < u[k]) return false;
  }
  return false;
}

// Feasibility of sum_j lambda_j points[j] = target, lambda in the simplex.
template <class Scalar>
std::optional<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> convex_weights(
    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& points,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& target) {
  const Eigen::Index d = target.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A(d + 1, static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    A.col(static_cast<Eigen::Index>(j)) << points[j], Scalar(1);
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b(d + 1);
  b << target, Scalar(1);
  return feasible_point<Scalar>(A, b);
}

void check_measure(const StateMeasure& mu, const FiniteCorrespondence& T) {
  if (mu.size() != T.size()) throw Error(ErrorKind::ShapeMismatch, "measure and relation sizes differ");
  StateMeasure::make(mu.weights);
}

}  // namespace

std::vector<int> preimage(const FiniteCorrespondence& T, const std::vector<int>& subset) {
  std::vector<bool> in(static_cast<std::size_t>(T.size()), false);
  for (int s : subset) {
    if (s < 0 || s >= T.size()) throw Error(ErrorKind::IndexOutOfRange, "subset state out of range");
    in[static_cast<std::size_t>(s)] = true;
  }
  std::vector<int> out;
  for (int x = 0; x < T.size(); ++x) {
    for (int y : T.successors(x)) {
      if (in[static_cast<std::size_t>(y)]) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

InvarianceReport is_invariant(const StateMeasure& mu, const FiniteCorrespondence& T,
                              InvarianceMode mode) {
  check_measure(mu, T);
  if (mode != InvarianceMode::Lp && T.size() > kSubsetModeLimit) {
    throw Error(ErrorKind::ModeUnsupported, "subset mode needs at most 16 states");
  }
  InvarianceReport report;
  if (mode == InvarianceMode::Lp) {
    report.witness = lp_witness(mu, T);
    report.invariant = report.witness.has_value();
    return report;
  }
  report.violating_subset = subset_violation(mu, T);
  report.invariant = !report.violating_subset.has_value();
  if (mode == InvarianceMode::Both) {
    report.witness = lp_witness(mu, T);
    if (report.witness.has_value() != report.invariant) {
      throw Error(ErrorKind::ConvergenceFailure, "lp and subset characterizations disagree");
    }
  }
  return report;
}

TransitionKernel witness_kernel(const FiniteCorrespondence& T, const PairMeasure& witness) {
  return TransitionKernel::from_pair_measure(T, witness);
}

std::vector<RationalVector> invariant_polytope_extremes_exact(const FiniteCorrespondence& T) {
  if (T.edge_count() > kExtremeEdgeLimit) {
    throw Error(ErrorKind::TooLarge, "extreme-point enumeration needs at most 24 edges");
  }
  const int n = T.size();
  using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
  // Equal marginals (n rows) plus total mass.
  RationalMatrix A = RationalMatrix::Zero(n + 1, T.edge_count());
  for (int e = 0; e < T.edge_count(); ++e) {
    A(T.edge(e).from, e) += Rational(1);
    A(T.edge(e).to, e) -= Rational(1);
    A(n, e) = Rational(1);
  }
  RationalVector b = RationalVector::Zero(n + 1);
  b[n] = Rational(1);

  // Bases are searched in floating point; each vertex is then recovered exactly
  // as the unique nonnegative solution on its support.
  Eigen::MatrixXd A_approx(n + 1, T.edge_count());
  for (int r = 0; r <= n; ++r) {
    for (int e = 0; e < T.edge_count(); ++e) A_approx(r, e) = to_double(A(r, e));
  }
  Eigen::VectorXd b_approx = Eigen::VectorXd::Zero(n + 1);
  b_approx[n] = 1.0;
  std::vector<RationalVector> vertices;
  for (const Eigen::VectorXd& approx : enumerate_vertices<double>(A_approx, b_approx)) {
    std::vector<int> support;
    for (int e = 0; e < T.edge_count(); ++e) {
      if (approx[e] > kSupportTolerance) support.push_back(e);
    }
    RationalMatrix A_support(n + 1, static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) A_support.col(static_cast<Eigen::Index>(k)) = A.col(support[k]);
    const auto exact = feasible_point<Rational>(A_support, b);
    if (!exact) throw Error(ErrorKind::ConvergenceFailure, "vertex support admits no exact solution");
    RationalVector v = RationalVector::Zero(T.edge_count());
    for (std::size_t k = 0; k < support.size(); ++k) v[support[k]] = (*exact)[static_cast<Eigen::Index>(k)];
    vertices.push_back(std::move(v));
  }

  std::vector<RationalVector> projected;
  for (const auto& v : vertices) {
    RationalVector mu = RationalVector::Zero(n);
    for (int e = 0; e < T.edge_count(); ++e) mu[T.edge(e).from] += v[e];
    projected.push_back(std::move(mu));
  }
  std::sort(projected.begin(), projected.end(), lex_less);
  projected.erase(std::unique(projected.begin(), projected.end(),
                              [](const RationalVector& u, const RationalVector& v) { return u == v; }),
                  projected.end());

  std::vector<RationalVector> extremes;
  for (std::size_t k = 0; k < projected.size(); ++k) {
    std::vector<RationalVector> others;
    for (std::size_t j = 0; j < projected.size(); ++j) {
      if (j != k) others.push_back(projected[j]);
    }
    if (others.empty() || !convex_weights<Rational>(others, projected[k])) {
      extremes.push_back(projected[k]);
    }
  }
  return extremes;
}

std::vector<StateMeasure> invariant_polytope_extremes(const FiniteCorrespondence& T) {
  std::vector<StateMeasure> out;
  for (const auto& v : invariant_polytope_extremes_exact(T)) {
    Eigen::VectorXd w(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) w[k] = to_double(v[k]);
    out.push_back({std::move(w)});
  }
  return out;
}

std::vector<Atom> extremal_decomposition(const StateMeasure& mu, const FiniteCorrespondence& T) {
  if (!is_invariant(mu, T).invariant) throw Error(ErrorKind::NotInvariant, "measure is not T-invariant");
  const std::vector<StateMeasure> extremes = invariant_polytope_extremes(T);
  const int count = static_cast<int>(extremes.size());

  auto try_support = [&](const std::vector<int>& support) -> std::optional<std::vector<Atom>> {
    std::vector<Eigen::VectorXd> points;
    for (int j : support) points.push_back(extremes[static_cast<std::size_t>(j)].weights);
    const auto lambda = convex_weights<double>(points, mu.weights);
    if (!lambda) return std::nullopt;
    Eigen::VectorXd weights = lambda->cwiseMax(0.0);
    weights /= weights.sum();
    Eigen::VectorXd combined = Eigen::VectorXd::Zero(mu.size());
    for (std::size_t k = 0; k < support.size(); ++k) {
      combined += weights[static_cast<Eigen::Index>(k)] * points[k];
    }
    if ((combined - mu.weights).lpNorm<1>() > kFeasibilityTolerance) return std::nullopt;
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < support.size(); ++k) {
      const double w = weights[static_cast<Eigen::Index>(k)];
      if (w > 0.0) atoms.push_back({w, extremes[static_cast<std::size_t>(support[k])]});
    }
    return atoms;
  };

  std::size_t tried = 0;
  const int max_atoms = std::min(count, mu.size() + 1);
  for (int k = 1; k <= max_atoms; ++k) {
    std::vector<int> support(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) support[static_cast<std::size_t>(j)] = j;
    for (;;) {
      if (++tried > kCombinationBudget) break;
      if (auto atoms = try_support(support); atoms && static_cast<int>(atoms->size()) == k) {
        return *atoms;
      }
      int pos = k - 1;
      while (pos >= 0 && support[static_cast<std::size_t>(pos)] == count - k + pos) --pos;
      if (pos < 0) break;
      ++support[static_cast<std::size_t>(pos)];
      for (int j = pos + 1; j < k; ++j) {
        support[static_cast<std::size_t>(j)] = support[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
    if (tried > kCombinationBudget) break;
  }
  std::vector<int> all(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) all[static_cast<std::size_t>(j)] = j;
  if (auto atoms = try_support(all)) return *atoms;
  throw Error(ErrorKind::ConvergenceFailure, "no convex decomposition found");
}

HatLift hat_lift(const Eigen::VectorXd& block_measure, const std::vector<int>& block,
                 const FiniteCorrespondence& T, LiftVariant variant) {
  const int n = T.size();
  if (block.empty() || static_cast<Eigen::Index>(block.size()) != block_measure.size()) {
    throw Error(ErrorKind::ShapeMismatch, "block and block measure sizes differ");
  }
  std::vector<int> position(static_cast<std::size_t>(n), -1);
  for (std::size_t k = 0; k < block.size(); ++k) {
    const int y = block[k];
    if (y < 0 || y >= n) throw Error(ErrorKind::IndexOutOfRange, "block state out of range");
    if (position[static_cast<std::size_t>(y)] >= 0) throw Error(ErrorKind::InvalidInput, "block repeats a state");
    position[static_cast<std::size_t>(y)] = static_cast<int>(k);
  }
  StateMeasure::make(block_measure);
  if (variant == LiftVariant::Inverse && !T.is_surjective()) {
    throw Error(ErrorKind::NotSurjective, "inverse lift needs T(X) = X");
  }

  // map_of[k]: the image (forward) or the unique in-block predecessor (inverse) of block[k].
  std::vector<int> map_of(block.size(), -1);
  for (std::size_t k = 0; k < block.size(); ++k) {
    const int y = block[k];
    std::vector<int> hits;
    if (variant == LiftVariant::Forward) {
      for (int z : T.successors(y)) {
        if (position[static_cast<std::size_t>(z)] >= 0) hits.push_back(z);
      }
    } else {
      for (int z : T.predecessors(y)) {
        if (position[static_cast<std::size_t>(z)] >= 0) hits.push_back(z);
      }
    }
    if (hits.size() != 1) {
      throw Error(ErrorKind::NotAFunctionOnBlock,
                  "state " + std::to_string(y) + " has " + std::to_string(hits.size()) +
                      (variant == LiftVariant::Forward ? " successors" : " predecessors") + " in the block");
    }
    map_of[k] = position[static_cast<std::size_t>(hits[0])];
  }

  Eigen::VectorXd image = Eigen::VectorXd::Zero(block_measure.size());
  for (std::size_t k = 0; k < block.size(); ++k) image[map_of[k]] += block_measure[static_cast<Eigen::Index>(k)];
  if ((image - block_measure).lpNorm<1>() > kFeasibilityTolerance) {
    throw Error(ErrorKind::NotInvariantOnBlock, "block measure is not invariant for the block map");
  }

  Eigen::VectorXd lifted = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < block.size(); ++k) lifted[block[k]] = block_measure[static_cast<Eigen::Index>(k)];

  Eigen::VectorXd p = Eigen::VectorXd::Zero(T.edge_count());
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  if (variant == LiftVariant::Forward) {
    for (std::size_t k = 0; k < block.size(); ++k) {
      p[*T.edge_index(block[k], block[static_cast<std::size_t>(map_of[k])])] = 1.0;
      done[static_cast<std::size_t>(block[k])] = true;
    }
  } else {
    // Q(x, y) = mu(y) / mu(x) over the in-block successors y with g(y) = x.
    for (std::size_t k = 0; k < block.size(); ++k) {
      const int x = block[static_cast<std::size_t>(map_of[k])];
      const double mass = lifted[x];
      if (mass > 0.0) {
        p[*T.edge_index(x, block[k])] = lifted[block[k]] / mass;
        done[static_cast<std::size_t>(x)] = true;
      }
    }
    for (int x = 0; x < n; ++x) {
      if (!done[static_cast<std::size_t>(x)]) continue;
      auto row = p.segment(T.row_begin(x), T.out_degree(x));
      row /= row.sum();
    }
  }
  for (int x = 0; x < n; ++x) {
    if (!done[static_cast<std::size_t>(x)]) p[T.row_begin(x)] = 1.0;
  }
  return {StateMeasure{std::move(lifted)}, TransitionKernel::make(T, std::move(p))};
}

}  // namespace thermo
