#include <cmath>

#include "doctest.h"
#include "fmridesign/certify.hpp"
#include "fmridesign/criteria.hpp"
#include "fmridesign/error.hpp"
#include "oracles.hpp"

using namespace fmridesign;

namespace {

Eigen::MatrixXd diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

}  // namespace

TEST_CASE("phi_p on a diagonal matrix") {
  const Eigen::MatrixXd m = diag({1.0, 2.0, 4.0});
  CHECK(rel_close(phi_p(m, 0.0), std::pow(8.0, -1.0 / 3.0), 1e-14));
  CHECK(rel_close(phi_p(m, 1.0), (1.0 + 0.5 + 0.25) / 3.0, 1e-14));
  CHECK(rel_close(phi_p(m, 2.0), std::sqrt((1.0 + 0.25 + 0.0625) / 3.0), 1e-14));
  CHECK(rel_close(phi_p(m, kInfinity), 1.0, 1e-14));
}

TEST_CASE("phi_p agrees with dense oracle on random information matrices") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 9 + trial % 7;
    const std::vector<int> s = oracle::bits(oracle::random_bits(rng, n));
    const Eigen::MatrixXd m = oracle::biased_info(oracle::model(s, 3));
    for (double p : {0.0, 0.5, 1.0, 2.0, kInfinity}) {
      const double ref = oracle::phi(m, p);
      const double got = phi_p(m, p);
      if (std::isinf(ref)) {
        CHECK(std::isinf(got));
      } else {
        CHECK(rel_close(got, ref, 1e-9));
      }
    }
  }
}

TEST_CASE("singular matrices score infinity") {
  const Eigen::MatrixXd m = diag({1.0, 0.0});
  for (double p : {0.0, 1.0, 3.0, kInfinity}) CHECK(std::isinf(phi_p(m, p)));
  CHECK(std::isinf(type1_value(m, spectral::inverse)));
  CHECK(std::isinf(type1_value(m, spectral::neg_log)));
  CHECK(eigenvalues(m).singular());
}

TEST_CASE("invalid p and asymmetric input are rejected") {
  CHECK_THROWS(phi_p(diag({1.0}), -1.0));
  CHECK_THROWS(phi_p(diag({1.0}), std::nan("")));
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 0, 1;
  CHECK_THROWS(eigenvalues(a));
}

TEST_CASE("A-criterion is the type-1 inverse sum divided by K") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<int> s = oracle::bits(oracle::random_bits(rng, 17));
    const Eigen::MatrixXd m = oracle::biased_info(oracle::model(s, 4));
    if (eigenvalues(m).singular()) continue;
    CHECK(rel_close(phi_p(m, 1.0) * 4.0, type1_value(m, spectral::inverse), 1e-15));
  }
}

TEST_CASE("target form for N = 3 mod 4 has the closed-form spectrum") {
  for (auto [n, k] : {std::pair{7, 3}, std::pair{11, 5}, std::pair{151, 9}}) {
    const auto t = target_info_matrix(n, k);
    REQUIRE(t.has_value());
    const Spectrum s = eigenvalues(*t);
    const double nn = n;
    for (int i = 0; i < k - 1; ++i) CHECK(rel_close(s.values[static_cast<std::size_t>(i)], nn + 1, 1e-12));
    CHECK(rel_close(s.smallest(), (nn + 1) * (nn - k) / nn, 1e-12));
    const double tr = (k - 1) / (nn + 1) + nn / ((nn + 1) * (nn - k));
    CHECK(rel_close(phi_p(*t, 1.0) * k, tr, 1e-12));
  }
  CHECK(rel_close(phi_p(*target_info_matrix(7, 3), 1.0) * 3, 0.46875, 1e-15));
}

TEST_CASE("N I target gives 1/N for every p") {
  const auto t = target_info_matrix(8, 3);
  for (double p : {0.0, 0.5, 1.0, 2.0, 7.0, kInfinity}) CHECK(rel_close(phi_p(*t, p), 0.125, 1e-14));
}

TEST_CASE("criterion parsing") {
  CHECK(parse_criterion("A").p == 1.0);
  CHECK(parse_criterion("D").p == 0.0);
  CHECK(std::isinf(parse_criterion("E").p));
  CHECK(parse_criterion("phi:0.5").p == 0.5);
  CHECK(parse_criterion("phi:inf").name == "phi_inf");
  CHECK(parse_criterion("phi1").name == "phi_1");
  CHECK(parse_criterion("type1:neglog").kind == CriterionKind::type1);
  CHECK(parse_criterion("ms").kind == CriterionKind::ms);
  CHECK_THROWS(parse_criterion("phi:-1"));
  CHECK_THROWS(parse_criterion("G"));
  CHECK_THROWS(evaluate(CriterionSpec::ms(), eigenvalues(diag({1.0}))));
}

TEST_CASE("(M,S) comparison") {
  const ScaledInfoMatrix hadamard = *target_info_matrix(7, 3);
  IntMatrix other = hadamard.scaled;
  other(0, 1) = other(1, 0) = 0;  // same trace, smaller tr(M^2)
  const ScaledInfoMatrix better{other, 7, InfoKind::biased};
  CHECK(ms_compare(better, hadamard) == MsOrdering::better);
  CHECK(ms_compare(hadamard, better) == MsOrdering::worse);
  CHECK(ms_compare(hadamard, hadamard) == MsOrdering::tie);
  const ScaledInfoMatrix bigger{hadamard.scaled * 2, 7, InfoKind::biased};
  CHECK(ms_compare(bigger, hadamard) == MsOrdering::better);
  CHECK(ms_compare(hadamard.to_real(), bigger.to_real()) == MsOrdering::worse);
  Eigen::MatrixXd bad = hadamard.to_real();
  bad(0, 0) = std::nan("");
  CHECK(ms_compare(bad, hadamard.to_real()) == MsOrdering::incomparable);
  CHECK(ms_ordering_name(MsOrdering::tie) == "tie");
}
