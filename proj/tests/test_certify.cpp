#include "doctest.h"
#include "fmridesign/certify.hpp"
#include "fmridesign/criteria.hpp"
#include "fmridesign/error.hpp"
#include "fmridesign/search.hpp"
#include "oracles.hpp"

using namespace fmridesign;

TEST_CASE("N0 for K = 9 and K = 4") {
  CHECK(std::abs(n0_cubic(9) - 21.34) < 0.01);
  CHECK(std::abs(n0_cubic(4) - 7.47) < 0.01);
  CHECK_THROWS_AS(n0_cubic(3), InvalidArgument);
}

TEST_CASE("N0 matches the closed-form cubic root") {
  for (int k = 4; k <= 100; ++k) {
    const double root = n0_cubic(k);
    CHECK(std::abs(root - oracle::n0(k)) < 1e-8 * root);
    CHECK(std::abs(bound_cubic(k, root)) < 1e-6);
    CHECK(bound_cubic(k, 2.0 * k - 1.0) < 0.0);
    CHECK(bound_cubic(k, root + 1.0) > 0.0);
    CHECK(std::abs(bound_cubic(k, 3.0) - oracle::cubic(k, 3.0)) < 1e-9 * std::abs(oracle::cubic(k, 3.0)));
  }
}

TEST_CASE("target matrices") {
  CHECK(target_info_matrix(7, 2)->scaled == (IntMatrix(2, 2) << 48, -8, -8, 48).finished());
  CHECK(target_info_matrix(8, 2)->scaled == (IntMatrix(2, 2) << 64, 0, 0, 64).finished());
  CHECK(target_info_matrix(9, 2)->scaled == (IntMatrix(2, 2) << 80, 8, 8, 80).finished());
  CHECK_FALSE(target_info_matrix(10, 2).has_value());
}

TEST_CASE("Paley 151 with K = 9 carries the explicit bound") {
  const Certificate c = certify_estimation(paley_hadamard_sequence(151), 9);
  CHECK(c.summary() == "Φ_p-optimal, p∈[0,1]; N₀=21.34");
  CHECK(c.form == TargetForm::hadamard_4t_minus_1);
  CHECK(c.family == CriteriaFamily::phi_p_range_0_1);
  CHECK(c.rule == "hadamard-explicit-bound");
  REQUIRE(c.bound.has_value());
  CHECK(c.bound->satisfied);
  CHECK(c.p_cap_covered);
  CHECK_FALSE(c.asymptotic_only);
}

TEST_CASE("larger p is only asymptotic") {
  const Certificate c = certify_estimation(paley_hadamard_sequence(151), 9, 2.0);
  CHECK_FALSE(c.p_cap_covered);
  CHECK(c.asymptotic_only);
  CHECK(c.family == CriteriaFamily::phi_p_range_0_1);
}

TEST_CASE("Hadamard form without an explicit bound") {
  const Certificate small_k = certify_estimation(paley_hadamard_sequence(7), 3);
  CHECK(small_k.form == TargetForm::hadamard_4t_minus_1);
  CHECK(small_k.family == CriteriaFamily::none);
  CHECK(small_k.rule == "hadamard-form-no-explicit-bound");
  CHECK(small_k.asymptotic_only);

  const Certificate below = certify_estimation(paley_hadamard_sequence(19), 9);
  CHECK(below.rule == "hadamard-form-below-bound");
  CHECK(below.family == CriteriaFamily::none);
  CHECK_FALSE(below.bound->satisfied);
  CHECK(below.bound->margin < 0.0);
}

TEST_CASE("insertion designs") {
  const BinaryDesign one = insert_zeros(paley_hadamard_sequence(7), 1);
  const Certificate c1 = certify_estimation(one, 3);
  CHECK(c1.family == CriteriaFamily::universal);
  CHECK(c1.summary() == "universally optimal");
  REQUIRE(c1.insertion.has_value());
  CHECK(c1.insertion->satisfied);

  const Certificate too_long = certify_estimation(one, 4);
  CHECK_FALSE(too_long.insertion->satisfied);
  CHECK(too_long.family == CriteriaFamily::none);

  const Certificate c2 = certify_estimation(insert_zeros(paley_hadamard_sequence(7), 2), 3);
  CHECK(c2.family == CriteriaFamily::type1_all);
  CHECK(c2.summary() == "optimal for all type-1 criteria");
  CHECK(c2.p_cap_covered);

  const Certificate c131 = certify_estimation(insert_zeros(paley_hadamard_sequence(131), 1), 9);
  CHECK(c131.family == CriteriaFamily::universal);
  CHECK(c131.insertion->run_length == 8);
}

TEST_CASE("N = 2 mod 4 is never certified") {
  const Certificate c = certify_estimation(BinaryDesign::parse("1001011000"), 3);
  CHECK(c.family == CriteriaFamily::none);
  CHECK(c.form == TargetForm::none);
  CHECK_FALSE(c.notes.empty());
}

TEST_CASE("contrast certificates") {
  const TernaryStimulusDesign u = lift_to_ternary(paley_hadamard_sequence(31), TernaryLift::j_plus_d);
  const Certificate c = certify_contrast(u, 4);
  CHECK(c.objective == Objective::contrast);
  CHECK(c.rule == "hadamard-contrast-explicit-bound");
  REQUIRE(c.contrast.has_value());
  CHECK(std::abs(c.contrast->signed_sum) == 1);
  CHECK(c.contrast->zero_count == 0);
  CHECK(c.contrast->raw_matrix_matches);
  CHECK(c.contrast->exact_contrast_matrix);

  const TernaryStimulusDesign v = lift_to_ternary(insert_zeros(paley_hadamard_sequence(7), 1),
                                                  TernaryLift::two_j_minus_d);
  CHECK(certify_contrast(v, 3).family == CriteriaFamily::universal);

  // a zero in u breaks the exact correspondence
  const Certificate z = certify_contrast(TernaryStimulusDesign::parse("2102122"), 3);
  CHECK(z.family == CriteriaFamily::none);
  CHECK(z.contrast->zero_count == 1);
}

TEST_CASE("argument validation") {
  CHECK_THROWS(certify_estimation(paley_hadamard_sequence(7), 8));
  CHECK_THROWS(certify_estimation(paley_hadamard_sequence(7), 3, -1.0));
}

TEST_CASE("every certificate at N <= 12 is confirmed by exhaustive search") {
  std::vector<BinaryDesign> candidates;
  for (int n : {3, 7, 11}) {
    candidates.push_back(paley_hadamard_sequence(n));
    candidates.push_back(insert_zeros(paley_hadamard_sequence(n), 1));
    candidates.push_back(insert_zeros(paley_hadamard_sequence(n), 2));
  }
  candidates.push_back(m_sequence(3, 0xB, 1));
  int confirmed = 0;
  for (const auto& d : candidates) {
    if (d.length() > 12) continue;
    for (int k = 1; k <= d.length(); ++k) {
      const Certificate c = certify_estimation(d, k);
      if (c.family == CriteriaFamily::none) continue;
      std::vector<CriterionSpec> crits;
      for (double p : {0.0, 0.5, 1.0}) crits.push_back(CriterionSpec::phi(p));
      if (c.family == CriteriaFamily::universal) {
        crits.push_back(CriterionSpec::phi(2.0));
        crits.push_back(CriterionSpec::phi(kInfinity));
      }
      if (c.family == CriteriaFamily::type1_all) {
        crits.push_back(CriterionSpec::type1(spectral::inverse, "inverse"));
        crits.push_back(CriterionSpec::type1(spectral::neg_log, "neglog"));
      }
      for (const auto& crit : crits) {
        CAPTURE(d.to_string());
        CAPTURE(k);
        CAPTURE(crit.name);
        CHECK(verify_optimal(d, SearchSpace::binary, k, crit).is_optimal);
        ++confirmed;
      }
    }
  }
  CHECK(confirmed > 20);
}
