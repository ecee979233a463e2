#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace thermo {

struct Check {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
  bool timing = false;  // measured is wall-clock time, not a reproducible quantity
};

struct Battery {
  std::string name;
  int criterion = 0;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool passed() const;
};

/// One row of the entropy-versus-abstract-entropy evidence table.
struct EvidenceRow {
  int instance = 0;
  int n_states = 0;
  double entropy = 0.0;
  double abstract_entropy = 0.0;
  double difference = 0.0;
};

enum class Suite { All, Fast, Example };

/// "all", "fast" or "example"; throws InvalidInput otherwise.
Suite parse_suite(const std::string& name);

inline constexpr std::uint64_t kDefaultSeed = 20240607;

/// `scale` multiplies the instance counts (1.0 gives the acceptance counts).
Battery example_battery();
Battery pressure_battery(std::uint64_t seed, double scale = 1.0);
Battery characterization_battery(std::uint64_t seed, double scale = 1.0);
Battery type_one_battery(std::uint64_t seed, double scale = 1.0);
Battery type_two_battery(std::uint64_t seed, double scale = 1.0);
Battery derivative_battery(std::uint64_t seed, double scale = 1.0);
Battery decomposition_battery(std::uint64_t seed, double scale = 1.0);
Battery conjugacy_battery(std::uint64_t seed, double scale = 1.0);
std::vector<EvidenceRow> entropy_evidence(std::uint64_t seed, int instances);

struct SuiteReport {
  std::vector<Battery> batteries;
  std::vector<EvidenceRow> evidence;

  bool passed() const;
};

/// example: the worked example only; fast: every battery at reduced counts;
/// all: every battery at full counts plus the evidence table.
SuiteReport run_suite(Suite suite, std::uint64_t seed = kDefaultSeed);

}  // namespace thermo
