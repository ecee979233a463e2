#include <cstdio>
#include <fstream>
#include <functional>
#include <cmath>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "thermo/error.hpp"
#include "thermo/interval.hpp"
#include "thermo/invariant.hpp"
#include "thermo/io.hpp"
#include "thermo/kernel.hpp"
#include "thermo/pressure.hpp"
#include "thermo/variational.hpp"
#include "thermo/verify.hpp"

namespace {

using thermo::io::Json;
using thermo::io::number;

enum Exit { kOk = 0, kVerificationFailed = 1, kInputError = 2, kNotConverged = 3 };

struct Options {
  std::string input, phi, mu, nu, kernel, method, suite = "fast", config, output = "-";
  std::string perm, psi, blocks, side = "both";
  int n = 1000;
  int grid = 1024;
};

std::string sha256_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw thermo::Error(thermo::ErrorKind::InvalidInput, "cannot open " + path);
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw thermo::Error(thermo::ErrorKind::InvalidInput, "digest failed for " + path);
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < length; ++k) {
    out += hex[digest[k] >> 4];
    out += hex[digest[k] & 15];
  }
  return out;
}

bool is_fixture(const std::string& name) { return name == "lllz-example" || name == "example"; }

// Records every input file with its digest, in the order the command reads them.
class Inputs {
 public:
  Json load(const std::string& flag, const std::string& path) {
    digests_[flag] = Json{{"path", path}, {"sha256", sha256_hex(path)}};
    return thermo::io::read_document(path);
  }
  void fixture(const std::string& flag, const std::string& name) { digests_[flag] = Json{{"fixture", name}}; }
  const Json& json() const { return digests_; }

 private:
  Json digests_ = Json::object();
};

struct Context {
  const Options& opt;
  Inputs inputs;
  bool verification_failed = false;

  [[noreturn]] static void missing(const char* flag) {
    throw thermo::Error(thermo::ErrorKind::InvalidInput, std::string(flag) + " is required");
  }

  thermo::FiniteCorrespondence relation() {
    if (opt.input.empty()) missing("--input");
    return thermo::io::read_correspondence(inputs.load("--input", opt.input));
  }
  thermo::Potential potential(const thermo::FiniteCorrespondence& T) {
    if (opt.phi.empty()) return thermo::Potential::zero(T);
    return thermo::io::read_potential(inputs.load("--phi", opt.phi), T);
  }
  thermo::Potential direction(const thermo::FiniteCorrespondence& T) {
    if (opt.psi.empty()) missing("--psi");
    return thermo::io::read_potential(inputs.load("--psi", opt.psi), T);
  }
  thermo::StateMeasure measure(const thermo::FiniteCorrespondence& T) {
    if (opt.mu.empty()) missing("--mu");
    return thermo::io::read_measure(inputs.load("--mu", opt.mu), T.size());
  }
  thermo::TransitionKernel kernel(const thermo::FiniteCorrespondence& T) {
    if (opt.kernel.empty()) missing("--kernel");
    return thermo::io::read_kernel(inputs.load("--kernel", opt.kernel), T);
  }
  thermo::PairMeasure pair(const thermo::FiniteCorrespondence& T) {
    if (opt.nu.empty()) missing("--nu");
    return thermo::io::read_pair_measure(inputs.load("--nu", opt.nu), T);
  }
  thermo::SolverConfig config() {
    if (opt.config.empty()) return {};
    return thermo::io::read_config(inputs.load("--config", opt.config));
  }
  std::vector<std::vector<int>> blocks() {
    if (opt.blocks.empty()) missing("--blocks");
    return thermo::io::read_blocks(inputs.load("--blocks", opt.blocks));
  }
  std::string method(const std::string& fallback, const std::vector<std::string>& allowed) const {
    const std::string m = opt.method.empty() ? fallback : opt.method;
    for (const auto& a : allowed) {
      if (m == a) return m;
    }
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw thermo::Error(thermo::ErrorKind::InvalidInput, "--method must be one of " + list);
  }
};

Json indices(const std::vector<int>& v) { return Json(v); }

Json solver_report(const thermo::AbstractEntropy& h) {
  Json r;
  r["value"] = h.minus_infinity ? Json("-inf") : number(h.value);
  r["minus_infinity"] = h.minus_infinity;
  r["iterations"] = h.iterations;
  r["residual"] = number(h.residual);
  r["converged"] = h.converged;
  r["boundary_flag"] = h.boundary;
  return r;
}

Json cmd_pressure(Context& ctx) {
  const auto T = ctx.relation();
  const auto phi = ctx.potential(T);
  const std::string method = ctx.method("spectral", {"spectral", "paths", "both"});
  Json r;
  r["method"] = method;
  r["n_states"] = T.size();
  double spectral = 0.0;
  if (method != "paths") {
    const auto sp = thermo::spectral_pressure(T, phi);
    spectral = sp.pressure;
    r["pressure"] = number(sp.pressure);
    r["dominant_classes"] = indices(sp.dominant_classes);
    r["unique_dominant_class"] = sp.unique();
  }
  if (method != "spectral") {
    if (ctx.opt.n < 1) throw thermo::Error(thermo::ErrorKind::InvalidInput, "--n must be positive");
    const auto a = thermo::path_pressure_sequence(T, phi, ctx.opt.n);
    r["n"] = ctx.opt.n;
    r["path_pressure"] = number(a.back());
    if (method == "both") r["gap"] = number(std::abs(a.back() - spectral));
  }
  return r;
}

Json cmd_verify(Context& ctx) {
  const thermo::Suite suite = thermo::parse_suite(ctx.opt.suite);
  const thermo::SuiteReport report = thermo::run_suite(suite);
  Json batteries = Json::array();
  for (const auto& b : report.batteries) {
    std::fprintf(stderr, "%-18s %s  %.2fs\n", b.name.c_str(), b.passed() ? "PASS" : "FAIL", b.seconds);
    Json checks = Json::array();
    for (const auto& c : b.checks) {
      Json check{{"name", c.name}, {"passed", c.passed}};
      // Wall-clock values would make reports differ between identical runs.
      if (!c.timing) check["measured"] = number(c.measured);
      check["tolerance"] = number(c.tolerance);
      check["detail"] = c.detail;
      checks.push_back(std::move(check));
    }
    batteries.push_back(Json{{"name", b.name}, {"criterion", b.criterion}, {"passed", b.passed()},
                             {"checks", std::move(checks)}});
  }
  Json r;
  r["suite"] = ctx.opt.suite;
  r["seed"] = thermo::kDefaultSeed;
  r["passed"] = report.passed();
  r["batteries"] = std::move(batteries);
  if (!report.evidence.empty()) {
    Json rows = Json::array();
    for (const auto& e : report.evidence) {
      rows.push_back(Json{{"instance", e.instance}, {"n_states", e.n_states}, {"entropy", number(e.entropy)},
                          {"abstract_entropy", number(e.abstract_entropy)},
                          {"difference", number(e.difference)}});
    }
    r["entropy_evidence"] = std::move(rows);
  }
  ctx.verification_failed = !report.passed();
  return r;
}

Json cmd_equilibrium(Context& ctx) {
  const auto T = ctx.relation();
  const auto phi = ctx.potential(T);
  Json r;
  r["tangent_count"] = thermo::tangent_functionals(T, phi).extreme_tangents.size();
  if (!ctx.opt.kernel.empty()) {
    const auto Q = ctx.kernel(T);
    const auto mu = ctx.measure(T);
    const std::string method = ctx.method("one", {"one", "two"});
    const auto kind = method == "one" ? thermo::EquilibriumKind::One : thermo::EquilibriumKind::Two;
    const auto v = thermo::equilibrium_check(T, phi, Q, mu, kind, ctx.config());
    r["kind"] = method;
    r["is_equilibrium"] = v.is_equilibrium;
    r["gap"] = number(v.gap);
    r["hull_distance"] = number(v.hull_distance);
    r["in_tangent_hull"] = v.in_tangent_hull;
    return r;
  }
  const auto eq = thermo::gibbs_equilibrium(T, phi);
  r["pressure"] = number(eq.pressure);
  r["entropy"] = number(eq.entropy);
  r["integral"] = number(eq.integral);
  r["gap"] = number(std::abs(eq.pressure - eq.entropy - eq.integral));
  r["measure"] = thermo::io::write_measure(eq.measure);
  r["kernel"] = thermo::io::write_kernel(eq.kernel);
  r["pair_measure"] = thermo::io::write_pair_measure(T, eq.pair_measure);
  return r;
}

Json cmd_mpressure(Context& ctx) {
  const auto T = ctx.relation();
  const auto phi = ctx.potential(T);
  const auto mu = ctx.measure(T);
  const std::string method = ctx.method("scaling", {"scaling", "abstract", "both"});
  Json r;
  r["method"] = method;
  if (method != "abstract") {
    const auto s = thermo::measure_pressure(T, phi, mu);
    r["value"] = number(s.value);
    r["iterations"] = s.iterations;
    r["residual"] = number(s.residual);
    r["converged"] = s.converged;
    r["optimizer"] = thermo::io::write_pair_measure(T, s.optimizer);
  }
  if (method != "scaling") {
    const auto a = thermo::abstract_measure_pressure(T, phi, mu, ctx.config());
    r["abstract_value"] = number(a.value);
    r["abstract_temperature"] = number(a.temperature);
    r["abstract_evaluations"] = a.evaluations;
    r["abstract_optimizer"] = thermo::io::write_pair_measure(T, a.optimizer);
  }
  return r;
}

Json cmd_aentropy(Context& ctx) {
  const auto T = ctx.relation();
  const auto config = ctx.config();
  std::optional<double> rate;
  thermo::PairMeasure nu;
  if (!ctx.opt.nu.empty()) {
    nu = ctx.pair(T);
  } else {
    const auto Q = ctx.kernel(T);
    const auto mu = ctx.measure(T);
    nu = thermo::pair_measure(mu, Q);
    rate = thermo::entropy_rate(mu, Q);
  }
  const auto h = thermo::abstract_kernel_entropy(T, nu, config);
  Json r = solver_report(h);
  r["marginal_gap"] = number(nu.marginal_gap(T));
  if (rate) r["entropy_rate"] = number(*rate);
  if (!h.minus_infinity) r["potential"] = thermo::io::write_potential(T, h.potential);
  return r;
}

Json cmd_invariant(Context& ctx) {
  const auto T = ctx.relation();
  const auto mu = ctx.measure(T);
  const std::string method = ctx.method("lp", {"lp", "subsets", "both"});
  const auto mode = method == "lp"        ? thermo::InvarianceMode::Lp
                    : method == "subsets" ? thermo::InvarianceMode::Subsets
                                          : thermo::InvarianceMode::Both;
  const auto rep = thermo::is_invariant(mu, T, mode);
  Json r;
  r["method"] = method;
  r["invariant"] = rep.invariant;
  if (rep.witness) {
    r["witness"] = thermo::io::write_pair_measure(T, *rep.witness);
    r["witness_kernel"] = thermo::io::write_kernel(thermo::witness_kernel(T, *rep.witness));
  }
  if (rep.violating_subset) r["violating_subset"] = indices(*rep.violating_subset);
  return r;
}

Json cmd_extremes(Context& ctx) {
  const auto T = ctx.relation();
  const auto exact = thermo::invariant_polytope_extremes_exact(T);
  Json list = Json::array();
  for (const auto& v : exact) {
    Json weights = Json::array();
    Json rational = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      weights.push_back(number(thermo::to_double(v[i])));
      rational.push_back(thermo::to_string(v[i]));
    }
    list.push_back(Json{{"weights", std::move(weights)}, {"exact", std::move(rational)}});
  }
  Json r;
  r["count"] = exact.size();
  r["extremes"] = std::move(list);
  if (!ctx.opt.mu.empty()) {
    const auto mu = ctx.measure(T);
    Json atoms = Json::array();
    for (const auto& a : thermo::extremal_decomposition(mu, T)) {
      atoms.push_back(Json{{"weight", number(a.weight)}, {"measure", thermo::io::write_measure(a.measure)}});
    }
    r["decomposition"] = std::move(atoms);
  }
  return r;
}

Json cmd_kentropy(Context& ctx) {
  const auto T = ctx.relation();
  const auto Q = ctx.kernel(T);
  thermo::StateMeasure mu;
  if (!ctx.opt.mu.empty()) {
    mu = ctx.measure(T);
  } else {
    const auto stationary = thermo::stationary_measures(Q);
    if (stationary.size() != 1) {
      throw thermo::Error(thermo::ErrorKind::InvalidInput,
                          "kernel has " + std::to_string(stationary.size()) + " stationary measures; pass --mu");
    }
    mu = stationary.front();
  }
  const auto partition = ctx.opt.blocks.empty() ? thermo::Partition::discrete(T.size())
                                                : thermo::Partition::make(T.size(), ctx.blocks());
  if (ctx.opt.n < 1) throw thermo::Error(thermo::ErrorKind::InvalidInput, "--n must be positive");
  const int n_max = ctx.opt.n;
  const auto k = thermo::kernel_entropy(mu, Q, n_max, partition);
  Json r;
  r["n_max"] = n_max;
  r["limit"] = number(k.limit);
  r["entropy_rate"] = number(thermo::entropy_rate(mu, Q));
  r["sequence"] = thermo::io::vector(Eigen::Map<const Eigen::VectorXd>(k.sequence.data(),
                                                                         static_cast<Eigen::Index>(k.sequence.size())));
  r["cross_check_gap"] = number(k.cross_check_gap);
  r["measure"] = thermo::io::write_measure(mu);
  return r;
}

Json cmd_derivative(Context& ctx) {
  const auto T = ctx.relation();
  const auto phi = ctx.potential(T);
  const auto psi = ctx.direction(T);
  const std::string& s = ctx.opt.side;
  if (s != "plus" && s != "minus" && s != "both") {
    throw thermo::Error(thermo::ErrorKind::InvalidInput, "--side must be plus, minus or both");
  }
  const auto side = s == "plus" ? thermo::Side::Plus : s == "minus" ? thermo::Side::Minus : thermo::Side::Both;
  const auto d = thermo::directional_derivative(T, phi, psi, side);
  Json r;
  r["side"] = s;
  r["plus"] = number(d.plus);
  r["minus"] = number(d.minus);
  r["difference_plus"] = number(d.difference_plus);
  r["difference_minus"] = number(d.difference_minus);
  r["cross_check_gap"] = number(d.cross_check_gap);
  r["gateaux"] = d.gateaux;
  r["tangent_count"] = thermo::tangent_functionals(T, phi).extreme_tangents.size();
  return r;
}

Json pressure_of(const thermo::FiniteCorrespondence& T) {
  return number(thermo::spectral_pressure(T, thermo::Potential::zero(T)).pressure);
}

Json cmd_discretize(Context& ctx) {
  if (ctx.opt.input.empty()) Context::missing("--input");
  Json r;
  r["grid"] = ctx.opt.grid;
  if (is_fixture(ctx.opt.input)) {
    ctx.inputs.fixture("--input", ctx.opt.input);
    const auto ex = thermo::worked_example(ctx.opt.grid);
    r["markov_route"] = number(ex.markov_route);
    r["grid_route"] = number(ex.grid_route);
    r["variational_route"] = number(ex.variational_route);
    r["band_half_width"] = number(ex.band_half_width);
    r["grid_gap"] = number(ex.grid_gap);
    r["route_gap"] = number(ex.route_gap);
    r["grid_blocks_valid"] = ex.grid_blocks_valid;
    Json refinement = Json::array();
    for (const auto& [n, value] : ex.refinement) refinement.push_back(Json{{"grid", n}, {"pressure", number(value)}});
    r["refinement"] = std::move(refinement);
    r["markov_relation"] = thermo::io::write_correspondence(ex.markov_relation);
    r["markov_blocks"] = ex.markov_blocks;
    return r;
  }
  const Json doc = ctx.inputs.load("--input", ctx.opt.input);
  if (doc.contains("branches")) {
    const auto grid = thermo::grid_discretize(thermo::io::read_branches(doc), ctx.opt.grid);
    r["pressure"] = pressure_of(grid.relation);
    r["relation"] = thermo::io::write_correspondence(grid.relation);
    return r;
  }
  const auto map = thermo::io::read_map(doc);
  if (map.partition) {
    const auto model = thermo::markov_model(map.map, *map.partition);
    r["entropy"] = number(model.entropy);
    r["relation"] = thermo::io::write_correspondence(model.relation);
    return r;
  }
  const auto grid = thermo::grid_discretize(thermo::IntervalCorrespondence::make({map.map}), ctx.opt.grid);
  r["pressure"] = pressure_of(grid.relation);
  r["relation"] = thermo::io::write_correspondence(grid.relation);
  return r;
}

Json cmd_relabel(Context& ctx) {
  const auto T = ctx.relation();
  if (ctx.opt.perm.empty()) Context::missing("--perm");
  const auto theta = thermo::io::read_permutation(ctx.inputs.load("--perm", ctx.opt.perm), T.size());
  const auto phi = ctx.potential(T);
  const auto rel = thermo::relabel(T, phi, theta);
  Json r;
  r["relation"] = thermo::io::write_correspondence(rel.relation);
  r["potential"] = thermo::io::write_potential(rel.relation, rel.potential);
  r["pressure"] = number(thermo::spectral_pressure(T, phi).pressure);
  r["relabeled_pressure"] = number(thermo::spectral_pressure(rel.relation, rel.potential).pressure);
  if (!ctx.opt.mu.empty()) r["measure"] = thermo::io::write_measure(thermo::relabel_measure(ctx.measure(T), theta));
  if (!ctx.opt.kernel.empty()) {
    r["kernel"] = thermo::io::write_kernel(thermo::relabel_kernel(ctx.kernel(T), rel.relation, theta));
  }
  if (!ctx.opt.nu.empty()) {
    r["pair_measure"] =
        thermo::io::write_pair_measure(rel.relation, thermo::relabel_pair_measure(T, ctx.pair(T), rel.relation, theta));
  }
  return r;
}

Json cmd_decompose(Context& ctx) {
  const auto T = ctx.relation();
  const auto blocks = ctx.blocks();
  const auto phi = ctx.potential(T);
  const auto check = thermo::decomposition_validate(T, blocks);
  Json r;
  r["valid"] = check.ok;
  if (!check.ok) {
    r["violated_condition"] = check.violated_condition;
    r["message"] = check.message;
    if (check.witness_state >= 0) r["witness_state"] = check.witness_state;
    if (check.witness_edge) r["witness_edge"] = {check.witness_edge->from, check.witness_edge->to};
    return r;
  }
  const auto d = thermo::decomposition_pressure(T, phi, blocks);
  const double spectral = thermo::spectral_pressure(T, phi).pressure;
  r["pressure"] = number(d.pressure);
  r["block_pressures"] = thermo::io::vector(
      Eigen::Map<const Eigen::VectorXd>(d.block_pressures.data(), static_cast<Eigen::Index>(d.block_pressures.size())));
  r["spectral_pressure"] = number(spectral);
  r["gap"] = number(std::abs(d.pressure - spectral));
  return r;
}

// Exclusive create: never clobber a report written by a concurrent run.
std::FILE* open_output(const std::string& output) {
  if (output == "-") return stdout;
  std::FILE* f = std::fopen(output.c_str(), "wx");
  if (!f) std::fprintf(stderr, "error: cannot create %s (exists or unwritable)\n", output.c_str());
  return f;
}

int emit(const Json& report, std::FILE* f) {
  const std::string text = report.dump(2) + "\n";
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if ((f == stdout ? std::fflush(f) : std::fclose(f)) != 0 || !ok) {
    std::fprintf(stderr, "error: failed writing the report\n");
    return kInputError;
  }
  return kOk;
}

int run(const std::string& command, const Options& opt, const std::function<Json(Context&)>& body) {
  std::FILE* out = open_output(opt.output);
  if (!out) return kInputError;
  Context ctx{opt, {}, false};
  Json report;
  report["command"] = command;
  int code = kOk;
  Json results = Json::object();
  Json error = nullptr;
  try {
    results = body(ctx);
    if (ctx.verification_failed) code = kVerificationFailed;
  } catch (const thermo::Error& e) {
    code = e.is_convergence_failure() ? kNotConverged : kInputError;
    error = Json{{"kind", std::string(thermo::to_string(e.kind()))}, {"message", e.what()}, {"details", e.details()}};
  } catch (const std::exception& e) {
    code = kInputError;
    error = Json{{"kind", "InvalidInput"}, {"message", e.what()}, {"details", Json::array()}};
  }
  report["inputs"] = ctx.inputs.json();
  report["results"] = std::move(results);
  report["status"] = error.is_null() ? "ok" : "error";
  report["error"] = std::move(error);
  if (!report["error"].is_null()) {
    std::fprintf(stderr, "error: %s\n", report["error"]["message"].get<std::string>().c_str());
  }
  const int written = emit(report, out);
  return written != kOk ? written : code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermodynamic formalism for finite correspondences"};
  app.require_subcommand(1);
  Options opt;

  struct Command {
    const char* name;
    const char* help;
    std::function<Json(Context&)> body;
    std::vector<std::string> flags;
  };
  const std::vector<Command> commands{
      {"pressure", "topological pressure: spectral, path counting or both", cmd_pressure,
       {"input", "phi", "method", "n"}},
      {"verify", "run a verification suite: all, fast or example", cmd_verify, {"suite"}},
      {"equilibrium", "Gibbs equilibrium pair, or check a given (kernel, mu)", cmd_equilibrium,
       {"input", "phi", "kernel", "mu", "method", "config"}},
      {"mpressure", "measure-theoretic pressure at an invariant mu", cmd_mpressure,
       {"input", "phi", "mu", "method", "config"}},
      {"aentropy", "abstract entropy of a pair measure or of (kernel, mu)", cmd_aentropy,
       {"input", "nu", "kernel", "mu", "config"}},
      {"invariant", "decide invariance of mu", cmd_invariant, {"input", "mu", "method"}},
      {"extremes", "extreme invariant measures, and the decomposition of mu", cmd_extremes, {"input", "mu"}},
      {"kentropy", "entropy of a stationary chain", cmd_kentropy, {"input", "kernel", "mu", "n", "blocks"}},
      {"derivative", "one-sided derivatives of the pressure along psi", cmd_derivative,
       {"input", "phi", "psi", "side"}},
      {"discretize", "grid or Markov model of an interval correspondence", cmd_discretize, {"input", "grid"}},
      {"relabel", "conjugate by a permutation of the states", cmd_relabel,
       {"input", "perm", "phi", "mu", "kernel", "nu"}},
      {"decompose", "validate a block decomposition and compare pressures", cmd_decompose,
       {"input", "blocks", "phi"}},
  };

  std::string chosen;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    for (const auto& f : c.flags) {
      if (f == "input") sub->add_option("--input", opt.input, "correspondence file (or fixture name)");
      if (f == "phi") sub->add_option("--phi", opt.phi, "potential file (default 0)");
      if (f == "psi") sub->add_option("--psi", opt.psi, "direction potential file");
      if (f == "mu") sub->add_option("--mu", opt.mu, "measure file");
      if (f == "nu") sub->add_option("--nu", opt.nu, "pair measure file");
      if (f == "kernel") sub->add_option("--kernel", opt.kernel, "kernel file");
      if (f == "method") sub->add_option("--method", opt.method, "method variant");
      if (f == "n") sub->add_option("--n", opt.n, "path length or sequence length");
      if (f == "grid") sub->add_option("--grid", opt.grid, "grid resolution N")->capture_default_str();
      if (f == "suite") sub->add_option("--suite", opt.suite, "all, fast or example")->capture_default_str();
      if (f == "config") sub->add_option("--config", opt.config, "solver config file");
      if (f == "perm") sub->add_option("--perm", opt.perm, "permutation file");
      if (f == "blocks") sub->add_option("--blocks", opt.blocks, "blocks file");
      if (f == "side") sub->add_option("--side", opt.side, "plus, minus or both")->capture_default_str();
    }
    sub->add_option("--output", opt.output, "report path, '-' for stdout")->capture_default_str();
    sub->callback([&chosen, name = c.name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }
  for (const auto& c : commands) {
    if (chosen == c.name) return run(c.name, opt, c.body);
  }
  return kInputError;
}
