#include "fmridesign/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fmridesign/error.hpp"

namespace fmridesign {
namespace {

// Bisection until the bracket stops shrinking in double precision.
template <typename F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

IntMatrix raw_target(int n, int k, int residue) {
  // (N+1)I - J for 4t-1, (N-1)I + J for 4t+1.
  IntMatrix m = IntMatrix::Constant(k, k, residue == 3 ? -1 : 1);
  m.diagonal().setConstant(n);
  return m;
}

void apply_family(Certificate& c) {
  switch (c.form) {
    case TargetForm::hadamard_4t_minus_1:
      if (c.k < 4) {
        c.rule = "hadamard-form-no-explicit-bound";
        c.notes.push_back("explicit bound unavailable for K < 4");
        c.asymptotic_only = true;
        return;
      }
      c.bound = BoundCheck{n0_cubic(c.k), false, 0.0};
      c.bound->margin = c.n - c.bound->n0;
      c.bound->satisfied = c.n >= c.bound->n0;
      if (!c.bound->satisfied) {
        c.rule = "hadamard-form-below-bound";
        c.notes.push_back("N < N0(K) = " + format_fixed(c.bound->n0, 2));
        c.asymptotic_only = true;
        return;
      }
      c.family = CriteriaFamily::phi_p_range_0_1;
      c.rule = c.objective == Objective::estimate_hrf ? "hadamard-explicit-bound"
                                                       : "hadamard-contrast-explicit-bound";
      c.p_cap_covered = c.p_cap <= 1.0;
      if (c.p_cap > 1.0) {
        c.asymptotic_only = true;
        c.notes.push_back("p in (1, p_cap]: asymptotic (no explicit bound)");
      }
      return;
    case TargetForm::circulant_oa_4t:
      c.family = CriteriaFamily::universal;
      c.rule = c.objective == Objective::estimate_hrf ? "circulant-oa-universal"
                                                       : "circulant-oa-contrast-universal";
      c.p_cap_covered = true;
      return;
    case TargetForm::near_oa_4t_plus_1:
      c.family = CriteriaFamily::type1_all;
      c.rule = c.objective == Objective::estimate_hrf ? "near-oa-type1"
                                                       : "near-oa-contrast-type1";
      // every finite-p Phi_p is a monotone transform of the type-1 sum of x^-p
      c.p_cap_covered = std::isfinite(c.p_cap);
      return;
    case TargetForm::none:
      break;
  }
  c.rule = "none";
}

Certificate start(Objective objective, int n, int k, double p_cap) {
  if (!(p_cap >= 0.0)) throw_invalid("p_cap must be >= 0");
  if (k < 1 || k > n) throw_invalid("K must satisfy 1 <= K <= N");
  Certificate c;
  c.n = n;
  c.k = k;
  c.residue = n % 4;
  c.objective = objective;
  c.p_cap = p_cap;
  return c;
}

TargetForm form_for_residue(int residue) {
  switch (residue) {
    case 3:
      return TargetForm::hadamard_4t_minus_1;
    case 0:
      return TargetForm::circulant_oa_4t;
    case 1:
      return TargetForm::near_oa_4t_plus_1;
    default:
      return TargetForm::none;
  }
}

}  // namespace

double bound_cubic(int k, double x) {
  const double kk = k;
  return 2.0 * x * x * x + (10.0 - 7.0 * kk) * x * x + 2.0 * (2.0 * kk - 5.0) * (kk - 1.0) * x +
         4.0 * kk * kk - 7.0 * kk;
}

double n0_cubic(int k) {
  if (k < 4) throw_invalid("N0(K,1) is defined only for K >= 4");
  const double kk = k;
  auto c = [k](double x) { return bound_cubic(k, x); };

  // Cauchy bound on root magnitude.
  const double a2 = (10.0 - 7.0 * kk) / 2.0;
  const double a1 = (2.0 * kk - 5.0) * (kk - 1.0);
  const double a0 = (4.0 * kk * kk - 7.0 * kk) / 2.0;
  const double upper = 1.0 + std::max({std::abs(a2), std::abs(a1), std::abs(a0)});

  // c'(x) = 6x^2 + 2(10 - 7K)x + 2(2K - 5)(K - 1); beyond its larger root c increases.
  const double qa = 6.0;
  const double qb = 2.0 * (10.0 - 7.0 * kk);
  const double qc = 2.0 * (2.0 * kk - 5.0) * (kk - 1.0);
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc <= 0.0) return bisect(c, -upper, upper);

  const double crit_hi = (-qb + std::sqrt(disc)) / (2.0 * qa);
  const double crit_lo = (-qb - std::sqrt(disc)) / (2.0 * qa);
  if (c(crit_hi) <= 0.0) return bisect(c, crit_hi, upper);
  // Local minimum is positive: the only real root lies left of the local maximum.
  return bisect(c, -upper, crit_lo);
}

std::optional<ScaledInfoMatrix> target_info_matrix(int n, int k) {
  if (k < 1 || k > n) throw_invalid("K must satisfy 1 <= K <= N");
  const std::int64_t nn = n;
  IntMatrix eye = IntMatrix::Identity(k, k);
  IntMatrix ones = IntMatrix::Ones(k, k);
  switch (n % 4) {
    case 3:
      return ScaledInfoMatrix{(nn + 1) * (nn * eye - ones), nn, InfoKind::biased};
    case 0:
      return ScaledInfoMatrix{nn * nn * eye, nn, InfoKind::biased};
    case 1:
      return ScaledInfoMatrix{(nn - 1) * (nn * eye + ones), nn, InfoKind::biased};
    default:
      return std::nullopt;
  }
}

std::string_view objective_name(Objective o) noexcept {
  return o == Objective::estimate_hrf ? "estimate_hrf" : "contrast";
}

std::string_view target_form_name(TargetForm f) noexcept {
  switch (f) {
    case TargetForm::hadamard_4t_minus_1:
      return "hadamard_4t_minus_1";
    case TargetForm::circulant_oa_4t:
      return "circulant_oa_4t";
    case TargetForm::near_oa_4t_plus_1:
      return "near_oa_4t_plus_1";
    case TargetForm::none:
      break;
  }
  return "none";
}

std::string_view criteria_family_name(CriteriaFamily f) noexcept {
  switch (f) {
    case CriteriaFamily::phi_p_range_0_1:
      return "phi_p_range_0_1";
    case CriteriaFamily::universal:
      return "universal";
    case CriteriaFamily::type1_all:
      return "type1_all";
    case CriteriaFamily::none:
      break;
  }
  return "none";
}

std::string Certificate::summary() const {
  const std::string target = objective == Objective::contrast ? " for contrast" : "";
  switch (family) {
    case CriteriaFamily::phi_p_range_0_1:
      return "Φ_p-optimal" + target + ", p∈[0,1]; N₀=" + format_fixed(bound->n0, 2);
    case CriteriaFamily::universal:
      return "universally optimal" + target;
    case CriteriaFamily::type1_all:
      return "optimal" + target + " for all type-1 criteria";
    case CriteriaFamily::none:
      break;
  }
  if (form != TargetForm::none) {
    return std::string("target form ") + std::string(target_form_name(form)) +
           " matched; no explicit optimality bound" +
           (notes.empty() ? std::string() : " (" + notes.front() + ")");
  }
  return "no certificate: information matrix matches no target form";
}

Certificate certify_estimation(const BinaryDesign& d, int k, double p_cap) {
  Certificate c = start(Objective::estimate_hrf, d.length(), k, p_cap);
  const auto target = target_info_matrix(c.n, k);
  if (!target) c.notes.push_back("no target form is known for N ≡ 2 (mod 4)");

  const ScaledInfoMatrix mb = info_matrix(to_signed(d).entries(), k, InfoKind::biased);
  if (target && same_matrix(mb, *target)) c.form = form_for_residue(c.residue);
  apply_family(c);

  if (const auto& ins = d.insertion()) {
    c.insertion = InsertionCheck{ins->run_length, k <= ins->run_length + 1};
    if (!c.insertion->satisfied) c.notes.push_back("K exceeds g + 1 for the inserted run");
  }
  return c;
}

Certificate certify_contrast(const TernaryStimulusDesign& u, int k, double p_cap) {
  Certificate c = start(Objective::contrast, u.length(), k, p_cap);
  const auto target = target_info_matrix(c.n, k);
  if (!target) c.notes.push_back("no target form is known for N ≡ 2 (mod 4)");

  const SignedTernaryDesign dbar = signed_from_ternary(u);
  const ScaledInfoMatrix mb = info_matrix(dbar.entries(), k, InfoKind::biased);
  const bool matched = target && same_matrix(mb, *target);

  ContrastChecks checks;
  for (auto v : dbar.entries()) checks.signed_sum += v;
  checks.zero_count = dbar.count_zeros();
  checks.exact_contrast_matrix = !u.has_zero();
  if (c.residue == 3 || c.residue == 1) {
    const ScaledInfoMatrix raw = info_matrix(dbar.entries(), k, InfoKind::raw);
    checks.raw_matrix_matches = raw.scaled == c.n * raw_target(c.n, k, c.residue);
  }
  c.contrast = checks;

  if (matched) {
    bool consistent = checks.zero_count == 0;
    if (c.residue == 3 || c.residue == 1) {
      consistent = consistent && std::abs(checks.signed_sum) == 1 && checks.raw_matrix_matches;
    }
    if (consistent) {
      c.form = form_for_residue(c.residue);
    } else {
      c.notes.push_back("target form matched but |a| = 1, r = 0 consequences failed");
    }
  }
  apply_family(c);
  return c;
}

}  // namespace fmridesign
