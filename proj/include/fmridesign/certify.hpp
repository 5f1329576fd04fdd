#pragma once

// Optimality certificates for circulant designs.
//
// A design is certified by matching its (signed) information matrix exactly
// against the extremal form for its residue class of N mod 4:
//
//   N = 4t - 1:  M_b = (N+1)[I - J/N]   Phi_p-optimal for p in [0,1] once
//                                       K >= 4 and N >= N0(K)
//   N = 4t:      M_b = N I              universally optimal
//   N = 4t + 1:  M_b = (N-1)[I + J/N]   optimal for every type-1 criterion
//
// N = 4t + 2 has no known target and is never certified.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fmridesign/design.hpp"

namespace fmridesign {

// c(x) = 2x^3 + (10 - 7K)x^2 + 2(2K - 5)(K - 1)x + 4K^2 - 7K.
double bound_cubic(int k, double x);

// Largest real root of bound_cubic(k, .); requires K >= 4.
double n0_cubic(int k);

std::optional<ScaledInfoMatrix> target_info_matrix(int n, int k);

enum class Objective { estimate_hrf, contrast };
enum class TargetForm { hadamard_4t_minus_1, circulant_oa_4t, near_oa_4t_plus_1, none };
enum class CriteriaFamily { phi_p_range_0_1, universal, type1_all, none };

std::string_view objective_name(Objective o) noexcept;
std::string_view target_form_name(TargetForm f) noexcept;
std::string_view criteria_family_name(CriteriaFamily f) noexcept;

struct BoundCheck {
  double n0 = 0.0;
  bool satisfied = false;
  double margin = 0.0;  // N - N0
};

struct InsertionCheck {
  int run_length = 0;
  bool satisfied = false;  // K <= g + 1
};

// Consequences of matching the 4t-1 or 4t+1 target for a ternary design.
struct ContrastChecks {
  int signed_sum = 0;     // a = j^T dbar
  int zero_count = 0;     // r
  bool raw_matrix_matches = false;  // M(X_dbar) = (N+1)I - J  or  (N-1)I + J
  bool exact_contrast_matrix = false;  // M_u = M_b(X_dbar)/4 holds exactly (u has no zero)
};

struct Certificate {
  int n = 0;
  int k = 0;
  int residue = 0;  // N mod 4
  Objective objective = Objective::estimate_hrf;
  TargetForm form = TargetForm::none;
  CriteriaFamily family = CriteriaFamily::none;
  std::optional<BoundCheck> bound;
  std::optional<InsertionCheck> insertion;
  std::optional<ContrastChecks> contrast;
  double p_cap = 1.0;
  bool p_cap_covered = false;  // the family covers Phi_p for every p in [0, p_cap]
  bool asymptotic_only = false;  // larger-p claims exist only without an explicit bound
  std::string rule;  // which certification rule fired
  std::vector<std::string> notes;

  std::string summary() const;
};

Certificate certify_estimation(const BinaryDesign& d, int k, double p_cap = 1.0);
Certificate certify_contrast(const TernaryStimulusDesign& u, int k, double p_cap = 1.0);

}  // namespace fmridesign
