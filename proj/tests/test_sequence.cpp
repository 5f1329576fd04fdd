#include <string>

#include "doctest.h"
#include "fmridesign/error.hpp"
#include "fmridesign/sequence.hpp"
#include "oracles.hpp"

using namespace fmridesign;

TEST_CASE("paley sequence for N = 7") {
  const BinaryDesign d = paley_hadamard_sequence(7);
  CHECK(d.to_string() == "1001011");
  CHECK(d.provenance() == Provenance::paley);
  CHECK(d.count_ones() == 4);
}

TEST_CASE("paley sequences agree with the quadratic-residue definition") {
  int checked = 0;
  for (int n = 3; n <= 500; n += 4) {
    if (!oracle::prime(n)) continue;
    const BinaryDesign d = paley_hadamard_sequence(n);
    CHECK(d.to_string() == oracle::paley(n));
    CHECK(d.count_ones() == (n + 1) / 2);
    ++checked;
  }
  CHECK(checked > 40);
}

TEST_CASE("paley rejects lengths outside the prime 3 mod 4 class") {
  for (int n : {1, 4, 9, 10, 13, 15, 17}) {
    CHECK_THROWS_AS(paley_hadamard_sequence(n), ConstructionUnavailable);
  }
  try {
    paley_hadamard_sequence(10);
    FAIL("no throw");
  } catch (const ConstructionUnavailable& e) {
    CHECK(std::string(e.what()).find("N must be prime ≡ 3 (mod 4)") != std::string::npos);
  }
}

TEST_CASE("primality") {
  CHECK(is_prime(2));
  CHECK(is_prime(151));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(91));
  CHECK_FALSE(is_prime(-7));
}

TEST_CASE("m-sequence of degree 2") {
  CHECK(m_sequence(2, 0x7, 3).to_string() == "110");
  CHECK(m_sequence(2, 0x7, 1).to_string() == "101");
}

TEST_CASE("default primitive polynomials give two-level autocorrelation") {
  for (int r = 2; r <= 12; ++r) {
    const auto taps = default_primitive_polynomial(r);
    REQUIRE(taps.has_value());
    const BinaryDesign d = m_sequence(r, *taps, 1);
    const int n = (1 << r) - 1;
    REQUIRE(d.length() == n);
    CHECK(d.count_ones() == 1 << (r - 1));
    CHECK(d.provenance() == Provenance::m_sequence);
    // signed periodic autocorrelation is -1 off the origin
    for (int lag = 1; lag < std::min(n, 40); ++lag) {
      long acc = 0;
      for (int i = 0; i < n; ++i) acc += (1 - 2 * d[i]) * (1 - 2 * d[(i + lag) % n]);
      CHECK(acc == -1);
    }
  }
  CHECK(default_primitive_polynomial(16).has_value());
  CHECK_FALSE(default_primitive_polynomial(1).has_value());
  CHECK_FALSE(default_primitive_polynomial(17).has_value());
}

TEST_CASE("m-sequence rejects bad registers") {
  CHECK_THROWS_AS(m_sequence(4, 0x15, 1), ConstructionUnavailable);  // x^4 + x^2 + 1 is not primitive
  CHECK_THROWS(m_sequence(4, 0x13, 0));
  CHECK_THROWS(m_sequence(4, 0x3, 1));  // missing x^r
  CHECK_THROWS(m_sequence(1, 0x3, 1));
}

TEST_CASE("circular zero runs") {
  const auto runs = zero_runs(BinaryDesign::parse("0110100"));
  REQUIRE(runs.size() == 2);
  CHECK(runs[0] == ZeroRun{6, 3});
  CHECK(runs[1] == ZeroRun{4, 1});

  CHECK(zero_runs(BinaryDesign::parse("0000")) == std::vector<ZeroRun>{{1, 4}});
  CHECK(zero_runs(BinaryDesign::parse("111")).empty());

  const auto ties = zero_runs(BinaryDesign::parse("1001001"));
  REQUIRE(ties.size() == 2);
  CHECK(ties[0] == ZeroRun{2, 2});
  CHECK(ties[1] == ZeroRun{5, 2});
}

TEST_CASE("zero insertion into the longest run") {
  const BinaryDesign h = paley_hadamard_sequence(7);
  const BinaryDesign one = insert_zeros(h, 1);
  CHECK(one.to_string() == "10001011");
  REQUIRE(one.insertion().has_value());
  CHECK(one.insertion()->run_length == 2);
  CHECK(one.insertion()->zeros_inserted == 1);
  CHECK(one.insertion()->parent_length == 7);
  CHECK(one.provenance() == Provenance::insertion);

  const BinaryDesign two = insert_zeros(h, 2);
  CHECK(two.to_string() == "100001011");
  CHECK(two.insertion()->zeros_inserted == 2);

  // extending again keeps the original run length
  const BinaryDesign again = insert_zeros(one, 1);
  CHECK(again.to_string() == two.to_string());
  CHECK(again.insertion()->run_length == 2);
  CHECK(again.insertion()->zeros_inserted == 2);
  CHECK(again.insertion()->parent_length == 7);

  // a run that wraps around the end
  CHECK(insert_zeros(BinaryDesign::parse("0110100"), 1).to_string() == "01101000");

  CHECK_THROWS(insert_zeros(h, 0));
  CHECK_THROWS(insert_zeros(h, 3));
  CHECK_THROWS(insert_zeros(BinaryDesign::parse("11"), 1));
}

TEST_CASE("rotations") {
  const BinaryDesign d = BinaryDesign::parse("1001011");
  CHECK(d.rotated(1).to_string() == "0010111");
  CHECK(d.rotated(-1).to_string() == "1100101");
  CHECK(d.rotated(7) == d);
  CHECK(d.canonical_rotation().to_string() == "0010111");
  CHECK(equal_up_to_rotation(d, d.rotated(3)));
  CHECK_FALSE(equal_up_to_rotation(d, BinaryDesign::parse("1001101")));
  CHECK_FALSE(equal_up_to_rotation(d, BinaryDesign::parse("10010110")));
}

TEST_CASE("parsing") {
  CHECK(BinaryDesign::parse("10 01\n1").to_string() == "10011");
  CHECK_THROWS_AS(BinaryDesign::parse("1021"), InvalidArgument);
  CHECK_THROWS_AS(BinaryDesign::parse(""), InvalidArgument);
  CHECK_THROWS_AS(BinaryDesign(std::vector<std::uint8_t>{0, 2}), InvalidArgument);
}
