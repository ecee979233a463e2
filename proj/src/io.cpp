#include "thermo/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "thermo/error.hpp"

namespace thermo::io {

namespace {

[[noreturn]] void bad(const std::string& message) { throw Error(ErrorKind::InvalidInput, message); }

const Json& field(const Json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) bad(std::string("document lacks field '") + name + "'");
  return doc.at(name);
}

int state_index(const Json& v, int n_states, const char* what) {
  if (!v.is_number_integer()) bad(std::string(what) + " must be an integer state index");
  const auto i = v.get<long long>();
  if (i < 0 || i >= n_states) {
    throw Error(ErrorKind::IndexOutOfRange,
                std::string(what) + " " + std::to_string(i) + " outside 0.." + std::to_string(n_states - 1));
  }
  return static_cast<int>(i);
}

double real(const Json& v, const char* what) {
  if (!v.is_number()) bad(std::string(what) + " must be a number");
  return v.get<double>();
}

int edge_of(const FiniteCorrespondence& T, const Json& entry, const char* what) {
  if (!entry.is_array() || entry.size() != 3) bad(std::string(what) + " entries are [i, j, value]");
  const int i = state_index(entry[0], T.size(), "edge source");
  const int j = state_index(entry[1], T.size(), "edge target");
  const auto e = T.edge_index(i, j);
  if (!e) bad(std::string(what) + " names (" + std::to_string(i) + "," + std::to_string(j) + "), not an edge");
  return *e;
}

Eigen::VectorXd edge_values(const Json& doc, const FiniteCorrespondence& T, const char* what) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(T.edge_count());
  std::set<int> seen;
  const Json& edges = field(doc, "edges");
  if (!edges.is_array()) bad(std::string(what) + " edges must be an array");
  for (const Json& entry : edges) {
    const int e = edge_of(T, entry, what);
    if (!seen.insert(e).second) {
      throw Error(ErrorKind::DuplicateEdge, std::string(what) + " lists an edge twice",
                  {"DuplicateEdge(" + std::to_string(T.edge(e).from) + "," + std::to_string(T.edge(e).to) + ")"});
    }
    v[e] = real(entry[2], what);
  }
  return v;
}

// Undo 12-digit rounding: total mass within the read tolerance is scaled back to 1.
Eigen::VectorXd renormalized(Eigen::VectorXd w, const char* what) {
  const double total = w.sum();
  if (std::abs(total - 1.0) > kReadMassTolerance) {
    bad(std::string(what) + " has total mass " + std::to_string(total));
  }
  return w / total;
}

Rational rational_field(const Json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  bad("rational values are strings such as \"3/4\" or integers");
}

std::vector<Rational> rational_list(const Json& v, const char* what) {
  if (!v.is_array()) bad(std::string(what) + " must be an array");
  std::vector<Rational> out;
  for (const Json& x : v) out.push_back(rational_field(x));
  return out;
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

double round_sig(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, x);
  return std::strtod(buf, nullptr);
}

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return round_sig(x);
}

Json vector(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

Json read_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  }
}

FiniteCorrespondence read_correspondence(const Json& doc) {
  return guarded([&] {
    const Json& n = field(doc, "n_states");
    if (!n.is_number_integer() || n.get<long long>() < 1) bad("n_states must be a positive integer");
    const int n_states = n.get<int>();
    std::vector<Edge> edges;
    for (const Json& pair : field(doc, "edges")) {
      if (!pair.is_array() || pair.size() != 2) bad("edges are [i, j] pairs");
      edges.push_back({state_index(pair[0], n_states, "edge source"),
                       state_index(pair[1], n_states, "edge target")});
    }
    std::vector<std::string> labels;
    if (doc.contains("labels")) labels = doc.at("labels").get<std::vector<std::string>>();
    return FiniteCorrespondence::validate(n_states, std::move(edges), std::move(labels));
  });
}

Json write_correspondence(const FiniteCorrespondence& T) {
  Json doc;
  doc["n_states"] = T.size();
  Json edges = Json::array();
  for (const Edge& e : T.edges()) edges.push_back({e.from, e.to});
  doc["edges"] = std::move(edges);
  if (!T.labels().empty()) doc["labels"] = T.labels();
  return doc;
}

Potential read_potential(const Json& doc, const FiniteCorrespondence& T) {
  return guarded([&] { return Potential{edge_values(doc, T, "potential")}; });
}

Json write_potential(const FiniteCorrespondence& T, const Potential& phi) {
  Json edges = Json::array();
  for (int e = 0; e < T.edge_count(); ++e) {
    edges.push_back({T.edge(e).from, T.edge(e).to, number(phi.values[e])});
  }
  return Json{{"edges", std::move(edges)}};
}

StateMeasure read_measure(const Json& doc, int n_states) {
  return guarded([&] {
    const auto w = field(doc, "weights").get<std::vector<double>>();
    if (static_cast<int>(w.size()) != n_states) {
      throw Error(ErrorKind::ShapeMismatch, "measure has " + std::to_string(w.size()) +
                                                " weights for " + std::to_string(n_states) + " states");
    }
    return StateMeasure::make(renormalized(Eigen::Map<const Eigen::VectorXd>(w.data(), n_states), "measure"));
  });
}

Json write_measure(const StateMeasure& mu) { return Json{{"weights", vector(mu.weights)}}; }

TransitionKernel read_kernel(const Json& doc, const FiniteCorrespondence& T) {
  return guarded([&] {
    const Json& rows = field(doc, "rows");
    if (!rows.is_array() || static_cast<int>(rows.size()) != T.size()) {
      throw Error(ErrorKind::ShapeMismatch, "kernel needs one row per state");
    }
    std::vector<std::vector<std::pair<int, double>>> parsed(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double total = 0.0;
      for (const Json& entry : rows[i]) {
        if (!entry.is_array() || entry.size() != 2) bad("kernel rows hold [j, probability] pairs");
        const double p = real(entry[1], "kernel probability");
        parsed[i].emplace_back(state_index(entry[0], T.size(), "kernel successor"), p);
        total += p;
      }
      if (std::abs(total - 1.0) > kReadMassTolerance) {
        bad("kernel row " + std::to_string(i) + " sums to " + std::to_string(total));
      }
      for (auto& entry : parsed[i]) entry.second /= total;
    }
    return TransitionKernel::from_rows(T, parsed);
  });
}

Json write_kernel(const TransitionKernel& Q) {
  const FiniteCorrespondence& T = Q.relation();
  Json rows = Json::array();
  for (int i = 0; i < T.size(); ++i) {
    Json row = Json::array();
    for (int e = T.row_begin(i); e < T.row_end(i); ++e) {
      if (Q.probabilities()[e] > 0.0) row.push_back({T.edge(e).to, number(Q.probabilities()[e])});
    }
    rows.push_back(std::move(row));
  }
  return Json{{"rows", std::move(rows)}};
}

PairMeasure read_pair_measure(const Json& doc, const FiniteCorrespondence& T) {
  return guarded([&] {
    return PairMeasure::make(T, renormalized(edge_values(doc, T, "pair measure"), "pair measure"));
  });
}

Json write_pair_measure(const FiniteCorrespondence& T, const PairMeasure& nu) {
  Json edges = Json::array();
  for (int e = 0; e < T.edge_count(); ++e) {
    if (nu.weights[e] > 0.0) edges.push_back({T.edge(e).from, T.edge(e).to, number(nu.weights[e])});
  }
  return Json{{"edges", std::move(edges)}};
}

MapDocument read_map(const Json& doc) {
  return guarded([&] {
    std::vector<LinearPiece> pieces;
    const Json& raw = field(doc, "pieces");
    if (!raw.is_array()) bad("pieces must be an array");
    for (const Json& piece : raw) {
      pieces.push_back({rational_field(field(piece, "slope")), rational_field(field(piece, "intercept"))});
    }
    MapDocument out{PiecewiseLinearMap::make(rational_list(field(doc, "breakpoints"), "breakpoints"),
                                             std::move(pieces)),
                    std::nullopt};
    if (doc.contains("partition")) out.partition = rational_list(doc.at("partition"), "partition");
    return out;
  });
}

Json write_map(const PiecewiseLinearMap& map) {
  Json breakpoints = Json::array();
  for (const Rational& b : map.breakpoints()) breakpoints.push_back(to_string(b));
  Json pieces = Json::array();
  for (const LinearPiece& p : map.pieces()) {
    pieces.push_back(Json{{"slope", to_string(p.slope)}, {"intercept", to_string(p.intercept)}});
  }
  return Json{{"breakpoints", std::move(breakpoints)}, {"pieces", std::move(pieces)}};
}

IntervalCorrespondence read_branches(const Json& doc) {
  return guarded([&] {
    std::vector<PiecewiseLinearMap> branches;
    for (const Json& b : field(doc, "branches")) branches.push_back(read_map(b).map);
    return IntervalCorrespondence::make(std::move(branches));
  });
}

SolverConfig read_config(const Json& doc) {
  return guarded([&] {
    if (!doc.is_object()) bad("config must be an object");
    static const std::set<std::string> known{"max_iterations", "tolerance", "divergence_floor",
                                             "step_rule", "normalize"};
    for (const auto& [key, value] : doc.items()) {
      if (!known.contains(key)) bad("unknown config field '" + key + "'");
    }
    SolverConfig c;
    if (doc.contains("max_iterations")) c.max_iterations = doc.at("max_iterations").get<int>();
    if (doc.contains("tolerance")) c.tolerance = real(doc.at("tolerance"), "tolerance");
    if (doc.contains("divergence_floor")) c.divergence_floor = real(doc.at("divergence_floor"), "divergence_floor");
    if (doc.contains("normalize")) c.normalize = doc.at("normalize").get<bool>();
    if (doc.contains("step_rule")) {
      const auto rule = doc.at("step_rule").get<std::string>();
      if (rule == "backtracking") {
        c.step_rule = StepRule::Backtracking;
      } else if (rule == "fixed") {
        c.step_rule = StepRule::Fixed;
      } else {
        bad("step_rule must be 'backtracking' or 'fixed'");
      }
    }
    c.validate();
    return c;
  });
}

Json write_config(const SolverConfig& c) {
  return Json{{"max_iterations", c.max_iterations},
              {"tolerance", number(c.tolerance)},
              {"divergence_floor", number(c.divergence_floor)},
              {"step_rule", c.step_rule == StepRule::Fixed ? "fixed" : "backtracking"},
              {"normalize", c.normalize}};
}

std::vector<std::vector<int>> read_blocks(const Json& doc) {
  return guarded([&] {
    const Json& raw = field(doc, "blocks");
    if (!raw.is_array()) bad("blocks must be an array of arrays");
    return raw.get<std::vector<std::vector<int>>>();
  });
}

std::vector<int> read_permutation(const Json& doc, int n_states) {
  return guarded([&] {
    auto theta = field(doc, "perm").get<std::vector<int>>();
    std::vector<bool> hit(static_cast<std::size_t>(n_states), false);
    if (static_cast<int>(theta.size()) != n_states) {
      throw Error(ErrorKind::NotBijective, "permutation length differs from n_states");
    }
    for (int t : theta) {
      if (t < 0 || t >= n_states || hit[static_cast<std::size_t>(t)]) {
        throw Error(ErrorKind::NotBijective, "perm is not a permutation of 0..n_states-1");
      }
      hit[static_cast<std::size_t>(t)] = true;
    }
    return theta;
  });
}

}  // namespace thermo::io
