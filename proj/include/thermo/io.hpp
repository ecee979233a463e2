#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermo/correspondence.hpp"
#include "thermo/interval.hpp"
#include "thermo/kernel.hpp"
#include "thermo/variational.hpp"

namespace thermo::io {

using Json = nlohmann::ordered_json;

/// Emitted floats carry this many significant digits.
inline constexpr int kSignificantDigits = 12;

/// Measures and kernel rows read back from files may miss total mass 1 by this
/// much (12-digit rounding); they are renormalized before validation.
inline constexpr double kReadMassTolerance = 1e-9;

/// x rounded to 12 significant digits.
double round_sig(double x);
/// Finite values as numbers; infinities and NaN as the strings "inf", "-inf", "nan".
Json number(double x);
Json vector(const Eigen::VectorXd& v);

/// Parses a file; throws InvalidInput with the parser message.
Json read_document(const std::filesystem::path& path);

FiniteCorrespondence read_correspondence(const Json& doc);
Json write_correspondence(const FiniteCorrespondence& T);

/// `edges` of [i, j, value]; absent edges get 0.
Potential read_potential(const Json& doc, const FiniteCorrespondence& T);
Json write_potential(const FiniteCorrespondence& T, const Potential& phi);

StateMeasure read_measure(const Json& doc, int n_states);
Json write_measure(const StateMeasure& mu);

TransitionKernel read_kernel(const Json& doc, const FiniteCorrespondence& T);
Json write_kernel(const TransitionKernel& Q);

PairMeasure read_pair_measure(const Json& doc, const FiniteCorrespondence& T);
Json write_pair_measure(const FiniteCorrespondence& T, const PairMeasure& nu);

struct MapDocument {
  PiecewiseLinearMap map;
  std::optional<std::vector<Rational>> partition;
};

/// `breakpoints`, `pieces` of {slope, intercept} as rational strings, optional `partition`.
MapDocument read_map(const Json& doc);
Json write_map(const PiecewiseLinearMap& map);

/// `branches`: array of map documents.
IntervalCorrespondence read_branches(const Json& doc);

/// Flat document; every field optional. step_rule is "backtracking" or "fixed".
SolverConfig read_config(const Json& doc);
Json write_config(const SolverConfig& config);

/// `blocks`: array of arrays of states.
std::vector<std::vector<int>> read_blocks(const Json& doc);

/// `perm`: theta as an array, theta[i] the new label of state i.
std::vector<int> read_permutation(const Json& doc, int n_states);

}  // namespace thermo::io
