#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "thermo/error.hpp"
#include "thermo/generators.hpp"
#include "thermo/interval.hpp"
#include "thermo/io.hpp"

using namespace thermo;
using io::Json;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no Error thrown");
  return ErrorKind::InvalidInput;
}

// Through text, as a file would carry it.
Json through_text(const Json& doc) { return Json::parse(doc.dump()); }

Json data(const std::string& name) { return io::read_document(std::string(THERMO_TEST_DATA) + "/" + name); }

}  // namespace

TEST_CASE("numbers keep twelve significant digits") {
  CHECK(io::round_sig(1.0 / 3.0) == 0.333333333333);
  CHECK(io::round_sig(-123456.7890123456) == -123456.789012);
  CHECK(io::round_sig(0.0) == 0.0);
  CHECK(io::number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(io::number(std::nan("")) == "nan");
}

TEST_CASE("correspondence documents round-trip") {
  const auto T = io::read_correspondence(data("golden_mean.json"));
  CHECK(T.size() == 2);
  CHECK(T.edge_count() == 3);
  CHECK(T.labels() == std::vector<std::string>{"a", "b"});
  const auto back = io::read_correspondence(through_text(io::write_correspondence(T)));
  CHECK(back.edges() == T.edges());
  CHECK(back.labels() == T.labels());
  CHECK(kind_of([] { io::read_correspondence(data("duplicate_edge.json")); }) == ErrorKind::DuplicateEdge);
  CHECK(kind_of([] { io::read_correspondence(Json::parse(R"({"n_states": 2, "edges": [[0, 1]]})")); }) ==
        ErrorKind::EmptySuccessor);
  CHECK(kind_of([] { io::read_correspondence(Json::parse(R"({"n_states": 2, "edges": [[0, 2]]})")); }) ==
        ErrorKind::IndexOutOfRange);
  CHECK(kind_of([] { io::read_correspondence(Json::parse(R"({"edges": [[0, 0]]})")); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { io::read_correspondence(Json::parse(R"({"n_states": "two", "edges": []})")); }) ==
        ErrorKind::InvalidInput);
  CHECK(kind_of([] { io::read_correspondence(Json::parse(R"({"n_states": 1, "edges": [[0, 0, 0]]})")); }) ==
        ErrorKind::InvalidInput);
}

TEST_CASE("potential documents round-trip and reject repeats") {
  Rng rng(61);
  const auto T = random_relation(rng, 5, 0.4);
  const auto phi = random_potential(rng, T, -3.0, 3.0);
  const auto back = io::read_potential(through_text(io::write_potential(T, phi)), T);
  CHECK((back.values - phi.values).lpNorm<Eigen::Infinity>() < 1e-11);
  const auto two = io::read_correspondence(data("two_loops.json"));
  const auto indicator = io::read_potential(data("loop_indicator.json"), two);
  CHECK(indicator.values[0] == 1.0);
  CHECK(indicator.values[1] == 0.0);
  CHECK(kind_of([&] { io::read_potential(Json::parse(R"({"edges": [[0, 0, 1], [0, 0, 2]]})"), two); }) ==
        ErrorKind::DuplicateEdge);
  CHECK(kind_of([&] { io::read_potential(Json::parse(R"({"edges": [[0, 1, 1]]})"), two); }) ==
        ErrorKind::InvalidInput);
}

TEST_CASE("measure documents renormalize rounded mass") {
  Rng rng(62);
  const auto mu = random_measure(rng, 7);
  const auto back = io::read_measure(through_text(io::write_measure(mu)), 7);
  CHECK(back.weights.sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((back.weights - mu.weights).lpNorm<1>() < 1e-11);
  CHECK(io::read_measure(data("dirac0.json"), 2).weights[0] == 1.0);
  CHECK(kind_of([] { io::read_measure(Json::parse(R"({"weights": [0.5, 0.4]})"), 2); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { io::read_measure(Json::parse(R"({"weights": [1.0]})"), 2); }) == ErrorKind::ShapeMismatch);
  CHECK(kind_of([] { io::read_measure(Json::parse(R"({"weights": ["x", 1]})"), 2); }) == ErrorKind::InvalidInput);
}

TEST_CASE("kernel documents round-trip") {
  Rng rng(63);
  const auto T = random_relation(rng, 6, 0.4);
  const auto Q = random_kernel(rng, T);
  const auto back = io::read_kernel(through_text(io::write_kernel(Q)), T);
  CHECK((back.probabilities() - Q.probabilities()).lpNorm<Eigen::Infinity>() < 1e-11);
  const auto full = io::read_correspondence(data("full_shift.json"));
  CHECK(io::read_kernel(data("half_kernel.json"), full)(1, 0) == 0.5);
  const auto golden = io::read_correspondence(data("golden_mean.json"));
  CHECK(kind_of([&] { io::read_kernel(data("half_kernel.json"), golden); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { io::read_kernel(Json::parse(R"({"rows": [[[0, 1]]]})"), full); }) ==
        ErrorKind::ShapeMismatch);
  CHECK(kind_of([&] { io::read_kernel(Json::parse(R"({"rows": [[[0, 0.7]], [[1, 1]]]})"), full); }) ==
        ErrorKind::InvalidInput);
}

TEST_CASE("pair measure documents round-trip") {
  Rng rng(64);
  const auto T = random_relation(rng, 5, 0.5);
  const auto Q = random_kernel(rng, T);
  const auto nu = pair_measure(random_measure(rng, 5), Q);
  const auto back = io::read_pair_measure(through_text(io::write_pair_measure(T, nu)), T);
  CHECK((back.weights - nu.weights).lpNorm<1>() < 1e-11);
  const auto full = io::read_correspondence(data("full_shift.json"));
  CHECK(io::read_pair_measure(data("skew_pair.json"), full).weights.sum() == doctest::Approx(1.0));
}

TEST_CASE("map documents keep exact rationals") {
  const auto doc = io::read_map(data("doubling_tent.json"));
  REQUIRE(doc.partition.has_value());
  CHECK(doc.partition->size() == 3);
  CHECK(pl_eval(doc.map, parse_rational("3/4")) == parse_rational("1/2"));
  const auto maps = example_maps();
  const auto back = io::read_map(through_text(io::write_map(maps.g))).map;
  CHECK(back.breakpoints() == maps.g.breakpoints());
  for (int k = 0; k <= 16; ++k) CHECK(pl_eval(back, Rational(k) / 16) == pl_eval(maps.g, Rational(k) / 16));
  CHECK(io::read_map(Json::parse(R"({"breakpoints": [0, 1], "pieces": [{"slope": 1, "intercept": 0}]})"))
            .map.pieces()
            .size() == 1);
  CHECK(kind_of([] {
          io::read_map(Json::parse(R"({"breakpoints": [0, 1], "pieces": [{"slope": 0.5, "intercept": 0}]})"));
        }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { io::read_map(Json::parse(R"({"breakpoints": ["0", "1"]})")); }) == ErrorKind::InvalidInput);
  const auto branches = io::read_branches(Json{{"branches", {io::write_map(maps.f), io::write_map(maps.g)}}});
  CHECK(branches.branches.size() == 2);
}

TEST_CASE("config documents") {
  const auto c = io::read_config(data("config.json"));
  CHECK(c.max_iterations == 5000);
  CHECK(c.tolerance == 1e-9);
  CHECK(c.step_rule == StepRule::Backtracking);
  const auto back = io::read_config(through_text(io::write_config(c)));
  CHECK(back.max_iterations == c.max_iterations);
  CHECK(back.tolerance == c.tolerance);
  CHECK(back.divergence_floor == c.divergence_floor);
  CHECK(io::read_config(Json::parse(R"({"step_rule": "fixed"})")).step_rule == StepRule::Fixed);
  CHECK(kind_of([] { io::read_config(Json::parse(R"({"step_rule": "newton"})")); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { io::read_config(Json::parse(R"({"tolerence": 1e-6})")); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { io::read_config(Json::parse(R"({"tolerance": -1})")); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { io::read_config(Json::parse(R"({"max_iterations": "many"})")); }) == ErrorKind::InvalidInput);
}

TEST_CASE("blocks and permutations") {
  CHECK(io::read_blocks(data("blocks.json")) == std::vector<std::vector<int>>{{0, 1}, {2, 3}});
  CHECK(io::read_permutation(data("swap.json"), 2) == std::vector<int>{1, 0});
  CHECK(kind_of([] { io::read_permutation(Json::parse(R"({"perm": [0, 0]})"), 2); }) == ErrorKind::NotBijective);
  CHECK(kind_of([] { io::read_permutation(Json::parse(R"({"perm": [0]})"), 2); }) == ErrorKind::NotBijective);
  CHECK(kind_of([] { io::read_blocks(Json::parse(R"({"blocks": 3})")); }) == ErrorKind::InvalidInput);
}

TEST_CASE("unreadable files") {
  CHECK(kind_of([] { io::read_document("/nonexistent/input.json"); }) == ErrorKind::InvalidInput);
}
