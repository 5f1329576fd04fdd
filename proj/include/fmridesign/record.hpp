#pragma once

// Design files: one JSON object per line,
//
//   {"alphabet":"binary","n":7,"provenance":{"construction":"paley","params":{"n":7}},
//    "schema":1,"sequence":"1001011"}
//
// with keys in sorted order and an optional "certificate" summary string.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fmridesign/design.hpp"
#include "fmridesign/sequence.hpp"

namespace fmridesign {

inline constexpr int kRecordSchema = 1;

enum class Alphabet { binary, ternary };

std::string_view alphabet_name(Alphabet a) noexcept;

struct DesignRecord {
  int schema = kRecordSchema;
  int n = 0;
  Alphabet alphabet = Alphabet::binary;
  std::string sequence;
  std::string construction = "user";
  nlohmann::json params = nlohmann::json::object();
  std::optional<std::string> certificate;

  friend bool operator==(const DesignRecord&, const DesignRecord&) = default;
};

// Provenance is taken from the design; insertion metadata lands in params.
DesignRecord make_record(const BinaryDesign& d, std::string construction,
                         nlohmann::json params = nlohmann::json::object());
DesignRecord make_record(const TernaryStimulusDesign& u, std::string construction,
                         nlohmann::json params = nlohmann::json::object());

// Rebuilds the design, including insertion metadata from params.
BinaryDesign binary_design(const DesignRecord& r);
TernaryStimulusDesign ternary_design(const DesignRecord& r);

nlohmann::json to_json(const DesignRecord& r);
// Validates schema, alphabet and length; throws InvalidArgument.
DesignRecord record_from_json(const nlohmann::json& j);

std::string to_line(const DesignRecord& r);
DesignRecord parse_record_line(std::string_view line);

// Blank lines are skipped.
std::vector<DesignRecord> read_records(std::istream& in);
std::vector<DesignRecord> read_records_file(const std::string& path);
void write_records(std::ostream& out, const std::vector<DesignRecord>& records);

}  // namespace fmridesign
