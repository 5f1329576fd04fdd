#include <sstream>

#include "doctest.h"
#include "fmridesign/error.hpp"
#include "fmridesign/record.hpp"

using namespace fmridesign;

TEST_CASE("binary records round-trip through a line") {
  const DesignRecord r = make_record(paley_hadamard_sequence(7), "paley", {{"n", 7}});
  const std::string line = to_line(r);
  CHECK(line ==
        R"({"alphabet":"binary","n":7,"provenance":{"construction":"paley","params":{"n":7}},"schema":1,"sequence":"1001011"})");
  CHECK(parse_record_line(line) == r);
  const BinaryDesign d = binary_design(r);
  CHECK(d.provenance() == Provenance::paley);
  CHECK(d == paley_hadamard_sequence(7));
}

TEST_CASE("insertion metadata survives a round trip") {
  const BinaryDesign ins = insert_zeros(paley_hadamard_sequence(7), 2);
  DesignRecord r = make_record(ins, "insert2", {{"from", "paley"}});
  r.certificate = "optimal for all type-1 criteria";
  const DesignRecord back = parse_record_line(to_line(r));
  CHECK(back == r);
  const BinaryDesign d = binary_design(back);
  REQUIRE(d.insertion().has_value());
  CHECK(d.insertion()->run_length == ins.insertion()->run_length);
  CHECK(d.insertion()->zeros_inserted == 2);
  CHECK(d.insertion()->parent_length == 7);
  CHECK(d.provenance() == Provenance::insertion);
}

TEST_CASE("ternary records") {
  const TernaryStimulusDesign u = lift_to_ternary(paley_hadamard_sequence(7), TernaryLift::j_plus_d);
  const DesignRecord r = make_record(u, "contrast_lift");
  const DesignRecord back = parse_record_line(to_line(r));
  CHECK(back.alphabet == Alphabet::ternary);
  CHECK(ternary_design(back) == u);
  CHECK_THROWS_AS(binary_design(back), InvalidArgument);
  CHECK_THROWS_AS(ternary_design(make_record(paley_hadamard_sequence(7), "paley")), InvalidArgument);
}

TEST_CASE("streams skip blank lines") {
  std::vector<DesignRecord> recs{make_record(paley_hadamard_sequence(3), "paley"),
                                 make_record(paley_hadamard_sequence(11), "paley")};
  std::stringstream ss;
  write_records(ss, recs);
  std::stringstream padded("\n" + ss.str() + "\n   \n");
  CHECK(read_records(padded) == recs);
  CHECK_THROWS_AS(read_records_file("/nonexistent/designs.jsonl"), InvalidArgument);
}

TEST_CASE("malformed records are rejected") {
  const char* bad[] = {
      "not json",
      "[1,2]",
      R"({"n":3,"alphabet":"binary","sequence":"101"})",
      R"({"schema":2,"n":3,"alphabet":"binary","sequence":"101"})",
      R"({"schema":1,"n":4,"alphabet":"binary","sequence":"101"})",
      R"({"schema":1,"n":3,"alphabet":"binary","sequence":"102"})",
      R"({"schema":1,"n":3,"alphabet":"ternary","sequence":"103"})",
      R"({"schema":1,"n":3,"alphabet":"quaternary","sequence":"101"})",
      R"({"schema":"1","n":3,"alphabet":"binary","sequence":"101"})",
  };
  for (const char* line : bad) {
    CAPTURE(line);
    CHECK_THROWS_AS(parse_record_line(line), InvalidArgument);
  }
  const DesignRecord minimal =
      parse_record_line(R"({"schema":1,"n":3,"alphabet":"binary","sequence":"101"})" + std::string());
  CHECK(minimal.construction == "user");
}
