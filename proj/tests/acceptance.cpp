// Runs every acceptance criterion at full instance counts and prints one line each.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <stdexcept>
#include <vector>

#include "thermo/verify.hpp"

using namespace thermo;

namespace {

struct Criterion {
  int number;
  std::string title;
  std::function<Battery()> run;
};

std::string failed_checks(const Battery& b) {
  std::string out;
  for (const Check& c : b.checks) {
    if (c.passed) continue;
    char line[256];
    std::snprintf(line, sizeof line, "\n      failed: %s (measured %.3g, tolerance %.3g) %s", c.name.c_str(),
                  c.measured, c.tolerance, c.detail.c_str());
    out += line;
  }
  return out;
}

// Largest measured/tolerance ratio among the non-timing checks.
double margin(const Battery& b) {
  double worst_ratio = 0.0;
  for (const Check& c : b.checks) {
    if (c.timing || c.tolerance <= 0.0) continue;
    worst_ratio = std::max(worst_ratio, std::max(0.0, c.measured) / c.tolerance);
  }
  return worst_ratio;
}

}  // namespace

int main() {
  const std::uint64_t seed = kDefaultSeed;
  const std::vector<Criterion> criteria{
      {1, "example reproduction", [] { return example_battery(); }},
      {2, "pressure oracle equivalence", [&] { return pressure_battery(seed); }},
      {3, "characterization equivalence", [&] { return characterization_battery(seed); }},
      {4, "type I principle", [&] { return type_one_battery(seed); }},
      {5, "type II principle", [&] { return type_two_battery(seed); }},
      {6, "derivatives and tangents", [&] { return derivative_battery(seed); }},
      {7, "decomposition formula", [&] { return decomposition_battery(seed); }},
      {8, "conjugacy invariance", [&] { return conjugacy_battery(seed); }},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    bool passed = false;
    std::string detail;
    double ratio = 0.0;
    int checks = 0;
    try {
      const Battery b = c.run();
      passed = b.passed() && !b.checks.empty() && b.criterion == c.number;
      detail = failed_checks(b);
      ratio = margin(b);
      checks = static_cast<int>(b.checks.size());
    } catch (const std::exception& e) {
      detail = std::string("\n      threw: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d  %-30s %2d checks  worst measured/tolerance %.2e  %.2fs%s\n",
                passed ? "PASS" : "FAIL", c.number, c.title.c_str(), checks, ratio, seconds, detail.c_str());
    if (!passed) ++failures;
  }
  std::printf("%d of %zu criteria passed (seed %llu)\n", static_cast<int>(criteria.size()) - failures,
              criteria.size(), static_cast<unsigned long long>(seed));
  return failures == 0 ? 0 : 1;
}
