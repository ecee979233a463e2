#include "thermo/variational.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "thermo/error.hpp"
#include "thermo/invariant.hpp"
#include "thermo/simplex.hpp"

namespace thermo {

namespace {

constexpr double kScalingTolerance = 1e-10;
constexpr int kScalingIterations = 200000;
constexpr double kFaceTolerance = 1e-12;
constexpr int kMemory = 10;
constexpr int kStallSteps = 8;
constexpr double kStallDecrease = 1e-13;
constexpr double kStepFloor = 10.0;  // largest move of a log-weight from psi near 0

struct Evaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;
  double pressure = 0.0;
};

// f(psi) = P(T, psi) - <nu, psi>, gradient = Gibbs pair measure of a dominant class - nu.
Evaluation evaluate(const FiniteCorrespondence& T, const Eigen::VectorXd& nu, const Eigen::VectorXd& psi) {
  const Potential potential{psi};
  const SpectralPressure sp = spectral_pressure(T, potential, true);
  const ComponentSpectrum& top = sp.components[static_cast<std::size_t>(sp.dominant_classes.front())];
  Evaluation out;
  out.pressure = sp.pressure;
  out.value = sp.pressure - nu.dot(psi);
  out.gradient = gibbs_pair_measure(T, potential, top).weights - nu;
  return out;
}

double score(const FiniteCorrespondence& T, const Potential& phi, const PairMeasure& nu,
             const SolverConfig& config) {
  const AbstractEntropy h = abstract_kernel_entropy(T, nu, config);
  if (h.minus_infinity) return -std::numeric_limits<double>::infinity();
  return h.value + nu.integrate(phi);
}

ScalingResult scale(const FiniteCorrespondence& T, const Eigen::VectorXd& log_kernel,
                    const StateMeasure& mu, const std::vector<bool>& face) {
  const int n = T.size();
  double top = -std::numeric_limits<double>::infinity();
  for (int e = 0; e < T.edge_count(); ++e) {
    if (face[static_cast<std::size_t>(e)]) top = std::max(top, log_kernel[e]);
  }
  Eigen::VectorXd K = Eigen::VectorXd::Zero(T.edge_count());
  for (int e = 0; e < T.edge_count(); ++e) {
    if (face[static_cast<std::size_t>(e)]) K[e] = std::exp(log_kernel[e] - top);
  }
  Eigen::VectorXd a = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  ScalingResult out;
  out.optimizer.weights = Eigen::VectorXd::Zero(T.edge_count());
  for (int it = 1; it <= kScalingIterations; ++it) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    for (int e = 0; e < T.edge_count(); ++e) row[T.edge(e).from] += K[e] * b[T.edge(e).to];
    for (int i = 0; i < n; ++i) a[i] = mu.weights[i] > 0.0 ? mu.weights[i] / row[i] : 0.0;
    Eigen::VectorXd column = Eigen::VectorXd::Zero(n);
    for (int e = 0; e < T.edge_count(); ++e) column[T.edge(e).to] += a[T.edge(e).from] * K[e];
    for (int j = 0; j < n; ++j) b[j] = mu.weights[j] > 0.0 ? mu.weights[j] / column[j] : 0.0;
    if (!a.allFinite() || !b.allFinite()) break;

    Eigen::VectorXd rows_now = Eigen::VectorXd::Zero(n);
    for (int e = 0; e < T.edge_count(); ++e) rows_now[T.edge(e).from] += a[T.edge(e).from] * K[e] * b[T.edge(e).to];
    out.iterations = it;
    out.residual = (rows_now - mu.weights).lpNorm<1>();
    if (out.residual <= kScalingTolerance) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    throw Error(ErrorKind::ScalingDiverged, "matrix scaling did not reach the marginal tolerance");
  }
  for (int e = 0; e < T.edge_count(); ++e) {
    out.optimizer.weights[e] = a[T.edge(e).from] * K[e] * b[T.edge(e).to];
  }
  out.optimizer.weights /= out.optimizer.weights.sum();
  return out;
}

double transport_objective(const FiniteCorrespondence& T, const Potential& phi, const StateMeasure& mu,
                           const PairMeasure& nu) {
  double value = 0.0;
  for (int e = 0; e < T.edge_count(); ++e) {
    const double w = nu.weights[e];
    if (w > 0.0) value += w * (phi.values[e] - std::log(w / mu.weights[T.edge(e).from]));
  }
  return value;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw Error(ErrorKind::InvalidInput, "solver tolerance must be positive");
  if (max_iterations <= 0) throw Error(ErrorKind::InvalidInput, "max_iterations must be positive");
}

PairMeasure gibbs_pair_measure(const FiniteCorrespondence& T, const Potential& phi,
                               const ComponentSpectrum& component) {
  if (!component.cyclic || component.right.size() == 0 || component.left.size() == 0) {
    throw Error(ErrorKind::InvalidInput, "component has no Perron vectors");
  }
  std::vector<int> local(static_cast<std::size_t>(T.size()), -1);
  for (std::size_t k = 0; k < component.states.size(); ++k) {
    local[static_cast<std::size_t>(component.states[k])] = static_cast<int>(k);
  }
  const double norm = component.left.dot(component.right);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(T.edge_count());
  for (int e = 0; e < T.edge_count(); ++e) {
    const int i = local[static_cast<std::size_t>(T.edge(e).from)];
    const int j = local[static_cast<std::size_t>(T.edge(e).to)];
    if (i < 0 || j < 0) continue;
    const double gauge = component.gauge.size() == 0 ? 0.0 : component.gauge[j] - component.gauge[i];
    w[e] = component.left[i] * std::exp(phi.values[e] + gauge - component.log_radius) *
           component.right[j] / norm;
  }
  w /= w.sum();
  return {std::move(w)};
}

EquilibriumPair gibbs_equilibrium(const FiniteCorrespondence& T, const Potential& phi) {
  check_potential(T, phi);
  const SpectralPressure sp = spectral_pressure(T, phi, true);
  if (!sp.unique()) {
    std::vector<std::string> details;
    for (int c : sp.dominant_classes) {
      std::string line = "class " + std::to_string(c) + ":";
      for (int s : sp.components[static_cast<std::size_t>(c)].states) line += " " + std::to_string(s);
      details.push_back(line);
    }
    throw Error(ErrorKind::NonUniqueDominantClass, "several classes attain the pressure", details);
  }
  const auto& top = sp.components[static_cast<std::size_t>(sp.dominant_classes.front())];
  PairMeasure nu = gibbs_pair_measure(T, phi, top);
  TransitionKernel Q = TransitionKernel::from_pair_measure(T, nu);
  StateMeasure mu{nu.first_marginal(T)};
  if (stationarity_gap(mu, Q) > kStationaryTolerance) {
    throw Error(ErrorKind::ConvergenceFailure, "Gibbs measure is not stationary to tolerance");
  }
  const double entropy = entropy_rate(mu, Q);
  const double integral = pair_measure(mu, Q).integrate(phi);
  return {std::move(Q), std::move(mu), std::move(nu), sp.pressure, entropy, integral};
}

std::vector<bool> feasible_face(const FiniteCorrespondence& T, const StateMeasure& mu) {
  const int n = T.size();
  const int m = T.edge_count();
  std::vector<bool> face(static_cast<std::size_t>(m), false);
  std::vector<bool> decided(static_cast<std::size_t>(m), false);
  for (int e = 0; e < m; ++e) {
    if (!(mu.weights[T.edge(e).from] > 0.0) || !(mu.weights[T.edge(e).to] > 0.0)) decided[static_cast<std::size_t>(e)] = true;
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, m);
  for (int e = 0; e < m; ++e) {
    A(T.edge(e).from, e) = 1.0;
    A(n + T.edge(e).to, e) = 1.0;
  }
  Eigen::VectorXd b(2 * n);
  b << mu.weights, mu.weights;
  for (int e = 0; e < m; ++e) {
    if (decided[static_cast<std::size_t>(e)]) continue;
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(m);
    cost[e] = -1.0;
    const LpSolution<double> sol = solve_lp<double>(A, b, cost);
    if (sol.status == LpStatus::Infeasible) throw Error(ErrorKind::NotInvariant, "measure is not T-invariant");
    if (sol.status == LpStatus::Unbounded) throw Error(ErrorKind::ConvergenceFailure, "bounded LP reported unbounded");
    // Every edge the maximizer charges is certified as well.
    for (int f = 0; f < m; ++f) {
      if (sol.x[f] > kFaceTolerance) {
        face[static_cast<std::size_t>(f)] = true;
        decided[static_cast<std::size_t>(f)] = true;
      }
    }
    decided[static_cast<std::size_t>(e)] = true;
  }
  return face;
}

ScalingResult measure_pressure(const FiniteCorrespondence& T, const Potential& phi,
                               const StateMeasure& mu) {
  check_potential(T, phi);
  if (mu.size() != T.size()) throw Error(ErrorKind::ShapeMismatch, "measure and relation sizes differ");
  StateMeasure::make(mu.weights);
  if (!is_invariant(mu, T).invariant) throw Error(ErrorKind::NotInvariant, "measure is not T-invariant");
  const std::vector<bool> face = feasible_face(T, mu);
  ScalingResult out = scale(T, phi.values, mu, face);
  out.value = transport_objective(T, phi, mu, out.optimizer);
  return out;
}

AbstractEntropy abstract_kernel_entropy(const FiniteCorrespondence& T, const PairMeasure& nu,
                                        const SolverConfig& config) {
  config.validate();
  if (nu.weights.size() != T.edge_count()) throw Error(ErrorKind::ShapeMismatch, "pair measure does not match relation");
  PairMeasure::make(T, nu.weights);
  const int m = T.edge_count();

  AbstractEntropy out;
  out.boundary = (nu.weights.array() <= 0.0).any();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  Evaluation current = evaluate(T, nu.weights, x);
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;  // (s, y)
  int flat_steps = 0;

  for (int it = 0;; ++it) {
    out.iterations = it;
    out.residual = current.gradient.norm();
    if (current.value < config.divergence_floor) {
      out.minus_infinity = true;
      out.converged = true;
      break;
    }
    if (out.residual <= config.tolerance) {
      out.converged = true;
      break;
    }
    if (it >= config.max_iterations) break;
    if (flat_steps >= kStallSteps) {
      // On the boundary the infimum is approached, not attained: the gradient
      // stays away from zero while the value has settled.
      out.converged = out.boundary;
      break;
    }

    Eigen::VectorXd direction = -current.gradient;
    if (config.step_rule == StepRule::Backtracking && !memory.empty()) {
      std::vector<double> alpha(memory.size());
      Eigen::VectorXd q = current.gradient;
      for (std::size_t k = memory.size(); k-- > 0;) {
        const auto& [s, y] = memory[k];
        alpha[k] = s.dot(q) / s.dot(y);
        q -= alpha[k] * y;
      }
      const auto& [s_last, y_last] = memory.back();
      q *= s_last.dot(y_last) / y_last.squaredNorm();
      for (std::size_t k = 0; k < memory.size(); ++k) {
        const auto& [s, y] = memory[k];
        const double beta = y.dot(q) / s.dot(y);
        q += (alpha[k] - beta) * s;
      }
      direction = -q;
      if (direction.dot(current.gradient) >= 0.0) {
        direction = -current.gradient;
        memory.clear();
      }
    }

    double step = 1.0;
    Eigen::VectorXd next_x;
    Evaluation next;
    bool accepted = false;
    const double slope = direction.dot(current.gradient);
    if (config.step_rule == StepRule::Fixed) {
      next_x = x + direction;
      next = evaluate(T, nu.weights, next_x);
      accepted = true;
    } else {
      const double reach = direction.lpNorm<Eigen::Infinity>();
      const double limit = std::max(kStepFloor, x.lpNorm<Eigen::Infinity>());
      if (reach > limit) step = limit / reach;
      for (int halving = 0; halving < 60; ++halving) {
        next_x = x + step * direction;
        try {
          next = evaluate(T, nu.weights, next_x);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::ConvergenceFailure) throw;
          step *= 0.5;
          continue;
        }
        if (next.value <= current.value + 1e-4 * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
    }
    if (!accepted) break;  // no further decrease at double precision
    if (config.normalize) {
      next_x.array() -= next.pressure;
      next = evaluate(T, nu.weights, next_x);
    }
    Eigen::VectorXd s = next_x - x;
    Eigen::VectorXd y = next.gradient - current.gradient;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm() && s.dot(y) > 0.0) {
      memory.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(memory.size()) > kMemory) memory.pop_front();
    }
    const double decrease = current.value - next.value;
    flat_steps = std::abs(decrease) <= kStallDecrease * std::max(1.0, std::abs(current.value)) ? flat_steps + 1 : 0;
    x = std::move(next_x);
    current = std::move(next);
  }

  out.value = current.value;
  out.potential = Potential{x};
  if (!out.converged && !out.boundary && out.residual > std::sqrt(config.tolerance)) {
    throw Error(ErrorKind::ConvergenceFailure,
                "abstract entropy solver stopped with gradient norm " + std::to_string(out.residual));
  }
  return out;
}

AbstractPressure abstract_measure_pressure(const FiniteCorrespondence& T, const Potential& phi,
                                           const StateMeasure& mu, const SolverConfig& config) {
  check_potential(T, phi);
  if (mu.size() != T.size()) throw Error(ErrorKind::ShapeMismatch, "measure and relation sizes differ");
  StateMeasure::make(mu.weights);
  if (!is_invariant(mu, T).invariant) throw Error(ErrorKind::NotInvariant, "measure is not T-invariant");
  const std::vector<bool> face = feasible_face(T, mu);

  AbstractPressure out;
  out.value = -std::numeric_limits<double>::infinity();
  auto candidate = [&](double s) {
    const ScalingResult scaled = scale(T, s * phi.values, mu, face);
    const double value = score(T, phi, scaled.optimizer, config);
    ++out.evaluations;
    if (value > out.value) {
      out.value = value;
      out.optimizer = scaled.optimizer;
      out.temperature = s;
    }
    return value;
  };

  const std::vector<double> grid{0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 4.0};
  std::vector<double> values;
  for (double s : grid) values.push_back(candidate(s));
  const auto best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  double lo = grid[best == 0 ? 0 : best - 1];
  double hi = grid[std::min(best + 1, grid.size() - 1)];

  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = candidate(x1);
  double f2 = candidate(x2);
  for (int it = 0; it < 12; ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = candidate(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = candidate(x2);
    }
  }
  return out;
}

TangentSet tangent_functionals(const FiniteCorrespondence& T, const Potential& phi) {
  check_potential(T, phi);
  const SpectralPressure sp = spectral_pressure(T, phi, true);
  TangentSet out;
  for (int c : sp.dominant_classes) {
    out.extreme_tangents.push_back(gibbs_pair_measure(T, phi, sp.components[static_cast<std::size_t>(c)]));
    out.classes.push_back(c);
  }
  out.is_unique = out.extreme_tangents.size() == 1;
  return out;
}

DirectionalDerivative directional_derivative(const FiniteCorrespondence& T, const Potential& phi,
                                             const Potential& psi, Side side) {
  check_potential(T, phi);
  check_potential(T, psi);
  const TangentSet tangents = tangent_functionals(T, phi);
  DirectionalDerivative out;
  out.plus = -std::numeric_limits<double>::infinity();
  out.minus = std::numeric_limits<double>::infinity();
  for (const auto& nu : tangents.extreme_tangents) {
    const double v = nu.integrate(psi);
    out.plus = std::max(out.plus, v);
    out.minus = std::min(out.minus, v);
  }

  const double base = spectral_pressure(T, phi).pressure;
  auto quotient = [&](double t) {
    return (spectral_pressure(T, Potential{phi.values + t * psi.values}).pressure - base) / t;
  };
  auto richardson = [&](double sign) {
    const double d1 = quotient(sign * 1e-3);
    const double d2 = quotient(sign * 1e-4);
    const double d3 = quotient(sign * 1e-5);
    const double r1 = (10.0 * d2 - d1) / 9.0;
    const double r2 = (10.0 * d3 - d2) / 9.0;
    return (100.0 * r2 - r1) / 99.0;
  };
  if (side != Side::Minus) {
    out.difference_plus = richardson(1.0);
    out.cross_check_gap = std::abs(out.difference_plus - out.plus);
  }
  if (side != Side::Plus) {
    out.difference_minus = richardson(-1.0);
    out.cross_check_gap = std::max(out.cross_check_gap, std::abs(out.difference_minus - out.minus));
  }
  out.gateaux = out.plus - out.minus <= kGateauxTolerance;
  return out;
}

EquilibriumVerdict equilibrium_check(const FiniteCorrespondence& T, const Potential& phi,
                                     const TransitionKernel& Q, const StateMeasure& mu,
                                     EquilibriumKind kind, const SolverConfig& config) {
  check_potential(T, phi);
  if (!(Q.relation() == T)) throw Error(ErrorKind::ShapeMismatch, "kernel is supported by another relation");
  if (mu.size() != T.size()) throw Error(ErrorKind::ShapeMismatch, "measure and relation sizes differ");
  StateMeasure::make(mu.weights);
  const double pressure = spectral_pressure(T, phi).pressure;
  const PairMeasure nu = pair_measure(mu, Q);

  EquilibriumVerdict out;
  if (kind == EquilibriumKind::One) {
    if (stationarity_gap(mu, Q) > kStationaryTolerance) throw Error(ErrorKind::NotStationary, "mu Q differs from mu");
    out.gap = pressure - (entropy_rate(mu, Q) + nu.integrate(phi));
  } else {
    const AbstractEntropy h = abstract_kernel_entropy(T, nu, config);
    out.gap = h.minus_infinity ? std::numeric_limits<double>::infinity()
                               : pressure - (h.value + nu.integrate(phi));
  }
  out.is_equilibrium = out.gap <= kEquilibriumGap;

  // min || sum_k lambda_k tau_k - nu ||_1 over the simplex, as an LP with split slacks.
  const TangentSet tangents = tangent_functionals(T, phi);
  const int m = T.edge_count();
  const int k = static_cast<int>(tangents.extreme_tangents.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, k + 2 * m);
  Eigen::VectorXd b(m + 1);
  for (int j = 0; j < k; ++j) {
    A.col(j).head(m) = tangents.extreme_tangents[static_cast<std::size_t>(j)].weights;
    A(m, j) = 1.0;
  }
  A.block(0, k, m, m) = Eigen::MatrixXd::Identity(m, m);
  A.block(0, k + m, m, m) = -Eigen::MatrixXd::Identity(m, m);
  b << nu.weights, 1.0;
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(k + 2 * m);
  cost.tail(2 * m).setOnes();
  const LpSolution<double> sol = solve_lp<double>(A, b, cost);
  if (sol.status != LpStatus::Optimal) throw Error(ErrorKind::ConvergenceFailure, "tangent hull LP failed");
  out.hull_distance = std::max(0.0, sol.objective);
  out.in_tangent_hull = out.hull_distance <= kTangentHullTolerance;
  return out;
}

}  // namespace thermo
