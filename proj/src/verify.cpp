#include "thermo/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "thermo/error.hpp"
#include "thermo/generators.hpp"
#include "thermo/interval.hpp"
#include "thermo/invariant.hpp"
#include "thermo/pressure.hpp"
#include "thermo/variational.hpp"

namespace thermo {

namespace {

// Tracks the worst value of a quantity that must stay at or below `tolerance`.
class Worst {
 public:
  Worst(std::string name, double tolerance) : check_{std::move(name), true, 0.0, tolerance, ""} {}

  void see(double value, const std::string& where) {
    if (std::isnan(value)) value = std::numeric_limits<double>::infinity();
    check_.measured = seen_++ == 0 ? value : std::max(check_.measured, value);
    if (value > check_.tolerance && first_failure_.empty()) first_failure_ = where;
  }

  Check done() {
    check_.passed = check_.measured <= check_.tolerance;
    check_.detail = std::to_string(seen_) + " cases";
    if (!check_.passed) check_.detail += ", first failure at " + first_failure_;
    return check_;
  }

 private:
  Check check_;
  int seen_ = 0;
  std::string first_failure_;
};

int scaled(int count, double scale) { return std::max(1, static_cast<int>(std::lround(count * scale))); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::string tag(int k) { return "instance " + std::to_string(k); }

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Check runtime_check(const std::string& name, double seconds, double limit) {
  return {name, seconds < limit, seconds, limit, "seconds", true};
}

}  // namespace

bool Battery::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

bool SuiteReport::passed() const {
  return std::all_of(batteries.begin(), batteries.end(), [](const Battery& b) { return b.passed(); });
}

Suite parse_suite(const std::string& name) {
  if (name == "all") return Suite::All;
  if (name == "fast") return Suite::Fast;
  if (name == "example") return Suite::Example;
  throw Error(ErrorKind::InvalidInput, "unknown suite '" + name + "' (expected all, fast or example)");
}

Battery example_battery() {
  Timer timer;
  Battery b{"example", 1, {}, 0.0};
  const double log2 = std::log(2.0);
  const ExampleReport r = worked_example(1024);
  b.checks.push_back({"markov route equals log 2", std::abs(r.markov_route - log2) <= 1e-12,
                      std::abs(r.markov_route - log2), 1e-12, "route (a)"});
  b.checks.push_back({"grid route within band of log 2", r.grid_gap <= r.band_half_width, r.grid_gap,
                      r.band_half_width, "route (b), N = 1024"});
  b.checks.push_back({"variational route matches grid route", r.route_gap <= 1e-9, r.route_gap, 1e-9,
                      "route (c)"});
  b.checks.push_back({"grid blocks satisfy the decomposition conditions", r.grid_blocks_valid,
                      r.grid_blocks_valid ? 0.0 : 1.0, 0.0, "X1 = [0,1/2), X2 = [1/2,1]"});

  const GridRelation g8 = grid_discretize(example_correspondence(), 8);
  int wrong = 0;
  for (int i = 4; i < 8; ++i) {
    int inside = 0;
    for (int j : g8.relation.successors(i)) inside += j >= 4 ? 1 : 0;
    wrong += inside == 2 ? 0 : 1;
  }
  b.checks.push_back({"N = 8 upper cells have two upper successors", wrong == 0, static_cast<double>(wrong), 0.0, "cells 4..7"});
  b.seconds = timer.seconds();
  b.checks.push_back(runtime_check("runtime", b.seconds, 30.0));
  return b;
}

Battery pressure_battery(std::uint64_t seed, double scale) {
  Timer timer;
  Rng rng(seed ^ 0x2);
  Battery b{"pressure", 2, {}, 0.0};
  Worst paths("|a_1000 - P| (primitive)", 5e-3);
  Worst shift("shift P(phi + c) - P(phi) - c", 1e-9);
  Worst cobound("coboundary invariance", 1e-9);
  Worst mono("monotonicity violation", 1e-12);
  Worst convex("convexity violation", 1e-9);
  const int count = scaled(100, scale);
  for (int k = 0; k < count; ++k) {
    const int n = uniform_int(rng, 1, 12);
    const FiniteCorrespondence T = random_relation(rng, n, uniform_real(rng, 0.05, 0.5));
    const Potential phi = random_potential(rng, T);
    const double P = spectral_pressure(T, phi).pressure;

    // The 5/n rate needs a single class; reducible relations carry a log(C)/n
    // prefactor that near-tied transient classes can inflate.
    const FiniteCorrespondence U = random_primitive(rng, n, uniform_real(rng, 0.05, 0.5));
    const Potential chi = random_potential(rng, U);
    const std::vector<double> a = path_pressure_sequence(U, chi, 1000);
    paths.see(std::abs(a.back() - spectral_pressure(U, chi).pressure), tag(k));

    for (int r = 0; r < 5; ++r) {
      const double c = uniform_real(rng, -5.0, 5.0);
      shift.see(std::abs(spectral_pressure(T, Potential{phi.values.array() + c}).pressure - P - c), tag(k));
    }
    const Potential cb = coboundary(T, random_state_function(rng, n, -2.0, 2.0));
    cobound.see(std::abs(spectral_pressure(T, Potential{phi.values + cb.values}).pressure - P), tag(k));

    Eigen::VectorXd bump = random_potential(rng, T, 0.0, 0.5).values;
    mono.see(P - spectral_pressure(T, Potential{phi.values + bump}).pressure, tag(k));

    const Potential psi = random_potential(rng, T);
    const double Q = spectral_pressure(T, psi).pressure;
    for (int step = 0; step <= 10; ++step) {
      const double t = step / 10.0;
      const double mixed = spectral_pressure(T, Potential{t * phi.values + (1.0 - t) * psi.values}).pressure;
      convex.see(mixed - (t * P + (1.0 - t) * Q), tag(k));
    }
  }
  b.checks = {paths.done(), shift.done(), cobound.done(), mono.done(), convex.done()};
  b.seconds = timer.seconds();
  b.checks.push_back(runtime_check("runtime", b.seconds, 60.0));
  return b;
}

Battery characterization_battery(std::uint64_t seed, double scale) {
  Timer timer;
  Rng rng(seed ^ 0x3);
  Battery b{"characterization", 3, {}, 0.0};
  Worst witness("witness kernel ||mu Q - mu||_1", 1e-10);
  int disagreements = 0;
  int positives = 0;
  const int count = scaled(200, scale);
  for (int k = 0; k < count; ++k) {
    const int n = uniform_int(rng, 1, 10);
    const FiniteCorrespondence T = random_relation(rng, n, uniform_real(rng, 0.05, 0.4));
    const StateMeasure mu = k % 2 == 0 ? random_invariant_measure(rng, T, uniform_int(rng, 1, 3))
                                       : random_measure(rng, n);
    const InvarianceReport lp = is_invariant(mu, T, InvarianceMode::Lp);
    const InvarianceReport subsets = is_invariant(mu, T, InvarianceMode::Subsets);
    if (lp.invariant != subsets.invariant) ++disagreements;
    if (lp.invariant) {
      ++positives;
      const TransitionKernel Q = witness_kernel(T, *lp.witness);
      witness.see(stationarity_gap(mu, Q), tag(k));
    }
  }
  b.checks.push_back({"lp and subset modes agree", disagreements == 0, static_cast<double>(disagreements), 0.0,
                      std::to_string(count) + " cases, " + std::to_string(positives) + " invariant"});
  b.checks.push_back(witness.done());
  b.seconds = timer.seconds();
  return b;
}

Battery type_one_battery(std::uint64_t seed, double scale) {
  Timer timer;
  Rng rng(seed ^ 0x4);
  Battery b{"type one", 4, {}, 0.0};
  Worst gibbs("Gibbs gap |P - (h + integral)|", 1e-9);
  for (int k = 0, count = scaled(100, scale); k < count; ++k) {
    const FiniteCorrespondence T = random_primitive(rng, uniform_int(rng, 1, 8), uniform_real(rng, 0.1, 0.5));
    const Potential phi = random_potential(rng, T);
    const EquilibriumPair eq = gibbs_equilibrium(T, phi);
    gibbs.see(std::abs(eq.pressure - (eq.entropy + eq.integral)), tag(k));
  }
  Worst bound("P_mu - P", 1e-8);
  for (int k = 0, count = scaled(20, scale); k < count; ++k) {
    const FiniteCorrespondence T = random_relation(rng, uniform_int(rng, 2, 8), uniform_real(rng, 0.1, 0.5));
    const Potential phi = random_potential(rng, T);
    const double P = spectral_pressure(T, phi).pressure;
    for (int r = 0; r < 5; ++r) {
      const StateMeasure mu = random_invariant_measure(rng, T, uniform_int(rng, 1, 3));
      bound.see(measure_pressure(T, phi, mu).value - P, tag(k));
    }
  }
  Worst extremes("|max over extremes of P_mu - P|", 1e-6);
  for (int k = 0, count = scaled(20, scale); k < count; ++k) {
    const BlockRelation br = random_map_blocks(rng, uniform_int(rng, 1, 3), 1, 4, 4);
    const Potential phi = random_potential(rng, br.relation);
    const double P = spectral_pressure(br.relation, phi).pressure;
    double best = -std::numeric_limits<double>::infinity();
    for (const StateMeasure& m : invariant_polytope_extremes(br.relation)) {
      best = std::max(best, measure_pressure(br.relation, phi, m).value);
    }
    extremes.see(std::abs(best - P), tag(k));
  }
  b.checks = {gibbs.done(), bound.done(), extremes.done()};
  b.seconds = timer.seconds();
  return b;
}

Battery type_two_battery(std::uint64_t seed, double scale) {
  Timer timer;
  Rng rng(seed ^ 0x5);
  Battery b{"type two", 5, {}, 0.0};
  Worst equality("|abstract entropy(Gibbs) - (P - integral)|", 1e-4);
  Worst inequality("h - abstract entropy", 1e-4);
  int finite = 0;
  int divergent = 0;
  for (int k = 0, count = scaled(50, scale); k < count; ++k) {
    const FiniteCorrespondence T = random_primitive(rng, uniform_int(rng, 1, 7), uniform_real(rng, 0.1, 0.5));
    const Potential phi = random_potential(rng, T);
    const EquilibriumPair eq = gibbs_equilibrium(T, phi);
    const AbstractEntropy h = abstract_kernel_entropy(T, eq.pair_measure);
    const double value = h.minus_infinity ? -std::numeric_limits<double>::infinity() : h.value;
    equality.see(std::abs(value - (eq.pressure - eq.integral)), tag(k));
    inequality.see(eq.entropy - value, tag(k));

    // Another stationary pair on the same relation.
    const TransitionKernel Q = random_kernel(rng, T);
    const StateMeasure mu = stationary_measures(Q).front();
    const AbstractEntropy h2 = abstract_kernel_entropy(T, pair_measure(mu, Q));
    inequality.see(entropy_rate(mu, Q) - (h2.minus_infinity ? -std::numeric_limits<double>::infinity() : h2.value),
                   tag(k));

    // Unequal marginals.
    Eigen::VectorXd w(T.edge_count());
    for (int e = 0; e < T.edge_count(); ++e) w[e] = std::exponential_distribution<double>(1.0)(rng);
    PairMeasure skew{w / w.sum()};
    if (skew.marginal_gap(T) > 1e-3) {
      ++divergent;
      if (!abstract_kernel_entropy(T, skew).minus_infinity) ++finite;
    }
  }
  b.checks = {equality.done(), inequality.done()};
  b.checks.push_back({"unequal marginals give minus infinity", finite == 0, static_cast<double>(finite), 0.0,
                      std::to_string(divergent) + " non-stationary inputs"});
  b.seconds = timer.seconds();
  return b;
}

Battery derivative_battery(std::uint64_t seed, double scale) {
  Timer timer;
  Rng rng(seed ^ 0x6);
  Battery b{"derivatives", 6, {}, 0.0};
  Worst agree("|tangent derivative - Richardson difference|", kDerivativeAgreement);
  for (int k = 0, count = scaled(100, scale); k < count; ++k) {
    const FiniteCorrespondence T = random_primitive(rng, uniform_int(rng, 1, 8), uniform_real(rng, 0.1, 0.5));
    const Potential phi = random_potential(rng, T);
    const Potential psi = random_potential(rng, T);
    agree.see(directional_derivative(T, phi, psi, Side::Both).cross_check_gap, tag(k));
  }
  b.checks.push_back(agree.done());

  const FiniteCorrespondence loops = FiniteCorrespondence::validate(2, {{0, 0}, {1, 1}});
  Potential indicator = Potential::zero(loops);
  indicator.values[*loops.edge_index(0, 0)] = 1.0;
  const DirectionalDerivative d = directional_derivative(loops, Potential::zero(loops), indicator);
  b.checks.push_back({"two self-loops: d+ = 1", std::abs(d.plus - 1.0) <= 1e-6, std::abs(d.plus - 1.0), 1e-6, ""});
  b.checks.push_back({"two self-loops: d- = 0", std::abs(d.minus) <= 1e-6, std::abs(d.minus), 1e-6, ""});
  b.seconds = timer.seconds();
  return b;
}

Battery decomposition_battery(std::uint64_t seed, double scale) {
  Timer timer;
  Rng rng(seed ^ 0x7);
  Battery b{"decomposition", 7, {}, 0.0};
  Worst formula("|P - max block pressure|", 1e-9);
  int invalid = 0;
  for (int k = 0, count = scaled(50, scale); k < count; ++k) {
    const BlockRelation br = random_block_relation(rng, uniform_int(rng, 2, 4), 1, 4, uniform_real(rng, 0.1, 0.5));
    if (!decomposition_validate(br.relation, br.blocks).ok) {
      ++invalid;
      continue;
    }
    const Potential phi = random_potential(rng, br.relation);
    const double P = spectral_pressure(br.relation, phi).pressure;
    formula.see(std::abs(P - decomposition_pressure(br.relation, phi, br.blocks).pressure), tag(k));
  }
  b.checks.push_back({"generated blocks pass validation", invalid == 0, static_cast<double>(invalid), 0.0, ""});
  b.checks.push_back(formula.done());
  b.seconds = timer.seconds();
  return b;
}

Battery conjugacy_battery(std::uint64_t seed, double scale) {
  Timer timer;
  Rng rng(seed ^ 0x8);
  Battery b{"conjugacy", 8, {}, 0.0};
  Worst pressure("pressure", 1e-8);
  Worst entropy("kernel entropy", 1e-8);
  Worst mp("measure pressure", 1e-8);
  Worst amp("abstract measure pressure", 1e-8);
  for (int k = 0, count = scaled(100, scale); k < count; ++k) {
    const int n = uniform_int(rng, 1, 7);
    const FiniteCorrespondence T = random_primitive(rng, n, uniform_real(rng, 0.1, 0.5));
    const Potential phi = random_potential(rng, T);
    const Potential chi = random_potential(rng, T);
    const std::vector<int> theta = random_permutation(rng, n);
    const Relabeled S = relabel(T, phi, theta);
    const Relabeled S_chi = relabel(T, chi, theta);

    pressure.see(std::abs(spectral_pressure(T, phi).pressure - spectral_pressure(S.relation, S.potential).pressure),
                 tag(k));

    const EquilibriumPair eq = gibbs_equilibrium(T, phi);
    const StateMeasure mu_s = relabel_measure(eq.measure, theta);
    const TransitionKernel Q_s = relabel_kernel(eq.kernel, S.relation, theta);
    const Partition cells = Partition::discrete(n);
    entropy.see(std::abs(kernel_entropy(eq.measure, eq.kernel, 4, cells).limit -
                         kernel_entropy(mu_s, Q_s, 4, cells).limit),
                tag(k));

    mp.see(std::abs(measure_pressure(T, chi, eq.measure).value -
                    measure_pressure(S.relation, S_chi.potential, mu_s).value),
           tag(k));
    amp.see(std::abs(abstract_measure_pressure(T, chi, eq.measure).value -
                     abstract_measure_pressure(S.relation, S_chi.potential, mu_s).value),
            tag(k));
  }
  b.checks = {pressure.done(), entropy.done(), mp.done(), amp.done()};
  b.seconds = timer.seconds();
  return b;
}

std::vector<EvidenceRow> entropy_evidence(std::uint64_t seed, int instances) {
  Rng rng(seed ^ 0x9);
  std::vector<EvidenceRow> rows;
  for (int k = 0; k < instances; ++k) {
    const int n = uniform_int(rng, 2, 6);
    const FiniteCorrespondence T = random_primitive(rng, n, uniform_real(rng, 0.2, 0.6));
    const TransitionKernel Q = random_kernel(rng, T);
    const StateMeasure mu = stationary_measures(Q).front();
    const AbstractEntropy h = abstract_kernel_entropy(T, pair_measure(mu, Q));
    EvidenceRow row;
    row.instance = k;
    row.n_states = n;
    row.entropy = entropy_rate(mu, Q);
    row.abstract_entropy = h.minus_infinity ? -std::numeric_limits<double>::infinity() : h.value;
    row.difference = row.abstract_entropy - row.entropy;
    rows.push_back(row);
  }
  return rows;
}

SuiteReport run_suite(Suite suite, std::uint64_t seed) {
  SuiteReport report;
  report.batteries.push_back(example_battery());
  if (suite == Suite::Example) return report;
  const double scale = suite == Suite::Fast ? 0.25 : 1.0;
  report.batteries.push_back(pressure_battery(seed, scale));
  report.batteries.push_back(characterization_battery(seed, scale));
  report.batteries.push_back(type_one_battery(seed, scale));
  report.batteries.push_back(type_two_battery(seed, scale));
  report.batteries.push_back(derivative_battery(seed, scale));
  report.batteries.push_back(decomposition_battery(seed, scale));
  report.batteries.push_back(conjugacy_battery(seed, scale));
  if (suite == Suite::All) report.evidence = entropy_evidence(seed, 12);
  return report;
}

}  // namespace thermo
