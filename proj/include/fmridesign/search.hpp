#pragma once

// Exhaustive enumeration of small design spaces: the ground truth every
// optimality certificate is checked against.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fmridesign/criteria.hpp"
#include "fmridesign/design.hpp"

namespace fmridesign {

enum class SearchSpace {
  binary,            // d in {0,1}^N, criterion on M_b(X_d)
  signed_pm1,        // d~ in {-1,1}^N, criterion on M_b(X_d~)
  ternary_two_stim,  // u in {0,1,2}^N, criterion on M_u
};

std::string_view search_space_name(SearchSpace s) noexcept;
SearchSpace parse_search_space(std::string_view name);

inline constexpr std::uint64_t kDefaultEvaluationCap = std::uint64_t{1} << 24;
inline constexpr int kMaxTernaryLength = 15;
// Relative tolerance for ties and for declaring a design optimal.
inline constexpr double kOptimalityTolerance = 1e-10;

// FMRIDESIGN_CAP from the environment when set and valid, else 2^24.
std::uint64_t default_evaluation_cap();

struct SearchOptions {
  bool symmetry_reduce = true;
  std::uint64_t cap = default_evaluation_cap();
  int threads = 1;
  int orbit_spot_checks = 100;
};

struct SearchReport {
  SearchSpace space = SearchSpace::binary;
  int n = 0;
  int k = 0;
  std::string criterion;
  double best_value = 0.0;      // criterion value; for (M,S) the maximal trace
  double best_secondary = 0.0;  // (M,S) only: minimal tr(M^2) among max-trace designs
  // Canonical orbit representatives of all minimizers, lexicographically sorted.
  std::vector<std::string> argmin;
  std::uint64_t argmin_designs = 0;  // designs (not orbits) attaining the minimum
  std::uint64_t space_size = 0;
  std::uint64_t evaluated = 0;
  bool symmetry_reduced = false;
  int orbit_spot_checks = 0;
  bool orbit_invariance_ok = true;
  double wall_seconds = 0.0;
};

SearchReport exhaustive_best(SearchSpace space, int n, int k, const CriterionSpec& criterion,
                             const SearchOptions& options = {});

struct Verification {
  bool is_optimal = false;
  double margin = 0.0;  // design value - global best
  double value = 0.0;
  double best = 0.0;
};

// `space` must be binary or signed_pm1; the design is mapped with to_signed for the latter.
Verification verify_optimal(const BinaryDesign& d, SearchSpace space, int k,
                            const CriterionSpec& criterion, const SearchOptions& options = {});
Verification verify_optimal(const TernaryStimulusDesign& u, int k, const CriterionSpec& criterion,
                            const SearchOptions& options = {});

// Lexicographically smallest member of the design's orbit in `space`, as a
// symbol string ("0110", "+-+-", "1202").
std::string canonical_orbit_representative(SearchSpace space, std::string_view symbols);

}  // namespace fmridesign
