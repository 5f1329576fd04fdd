#include "fmridesign/record.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "fmridesign/error.hpp"

namespace fmridesign {
namespace {

Provenance provenance_for(const std::string& construction) {
  if (construction == "paley") return Provenance::paley;
  if (construction == "mseq") return Provenance::m_sequence;
  if (construction == "insert1" || construction == "insert2") return Provenance::insertion;
  return Provenance::user;
}

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw_invalid(std::string("design record is missing \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw_invalid(std::string("design record field \"") + key + "\" has the wrong type");
  }
}

}  // namespace

std::string_view alphabet_name(Alphabet a) noexcept {
  return a == Alphabet::binary ? "binary" : "ternary";
}

DesignRecord make_record(const BinaryDesign& d, std::string construction, nlohmann::json params) {
  DesignRecord r;
  r.n = d.length();
  r.alphabet = Alphabet::binary;
  r.sequence = d.to_string();
  r.construction = std::move(construction);
  r.params = std::move(params);
  if (const auto& ins = d.insertion()) {
    r.params["run_length"] = ins->run_length;
    r.params["zeros_inserted"] = ins->zeros_inserted;
    r.params["parent_length"] = ins->parent_length;
  }
  return r;
}

DesignRecord make_record(const TernaryStimulusDesign& u, std::string construction,
                         nlohmann::json params) {
  DesignRecord r;
  r.n = u.length();
  r.alphabet = Alphabet::ternary;
  r.sequence = u.to_string();
  r.construction = std::move(construction);
  r.params = std::move(params);
  return r;
}

BinaryDesign binary_design(const DesignRecord& r) {
  if (r.alphabet != Alphabet::binary) throw_invalid("record holds a ternary design, expected binary");
  BinaryDesign plain = BinaryDesign::parse(r.sequence);
  std::optional<InsertionInfo> ins;
  if (r.params.contains("run_length")) {
    ins = InsertionInfo{field<int>(r.params, "run_length"), field<int>(r.params, "zeros_inserted"),
                        field<int>(r.params, "parent_length")};
  }
  std::vector<std::uint8_t> bits(plain.bits().begin(), plain.bits().end());
  return BinaryDesign(std::move(bits), provenance_for(r.construction), ins);
}

TernaryStimulusDesign ternary_design(const DesignRecord& r) {
  if (r.alphabet != Alphabet::ternary) throw_invalid("record holds a binary design, expected ternary");
  return TernaryStimulusDesign::parse(r.sequence);
}

nlohmann::json to_json(const DesignRecord& r) {
  nlohmann::json j;
  j["schema"] = r.schema;
  j["n"] = r.n;
  j["alphabet"] = alphabet_name(r.alphabet);
  j["sequence"] = r.sequence;
  j["provenance"] = {{"construction", r.construction}, {"params", r.params}};
  if (r.certificate) j["certificate"] = *r.certificate;
  return j;
}

DesignRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw_invalid("design record must be a JSON object");
  DesignRecord r;
  r.schema = field<int>(j, "schema");
  if (r.schema != kRecordSchema) {
    throw_invalid("unsupported design record schema " + std::to_string(r.schema));
  }
  r.n = field<int>(j, "n");
  const auto alphabet = field<std::string>(j, "alphabet");
  if (alphabet == "binary") {
    r.alphabet = Alphabet::binary;
  } else if (alphabet == "ternary") {
    r.alphabet = Alphabet::ternary;
  } else {
    throw_invalid("unknown alphabet \"" + alphabet + "\"");
  }
  r.sequence = field<std::string>(j, "sequence");
  if (static_cast<int>(r.sequence.size()) != r.n) {
    throw_invalid("sequence length " + std::to_string(r.sequence.size()) + " does not match n = " +
                  std::to_string(r.n));
  }
  const char top = r.alphabet == Alphabet::binary ? '1' : '2';
  for (char c : r.sequence) {
    if (c < '0' || c > top) {
      throw_invalid(std::string("symbol '") + c + "' is outside the " + alphabet + " alphabet");
    }
  }
  if (j.contains("provenance")) {
    const auto& p = j.at("provenance");
    r.construction = field<std::string>(p, "construction");
    if (p.contains("params")) r.params = p.at("params");
  }
  if (j.contains("certificate")) r.certificate = field<std::string>(j, "certificate");
  return r;
}

std::string to_line(const DesignRecord& r) { return to_json(r).dump(); }

DesignRecord parse_record_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw_invalid(std::string("malformed design record: ") + e.what());
  }
  return record_from_json(j);
}

std::vector<DesignRecord> read_records(std::istream& in) {
  std::vector<DesignRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_record_line(line));
  }
  return out;
}

std::vector<DesignRecord> read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_invalid("cannot read design file " + path);
  auto records = read_records(in);
  if (records.empty()) throw_invalid("design file " + path + " holds no records");
  return records;
}

void write_records(std::ostream& out, const std::vector<DesignRecord>& records) {
  for (const auto& r : records) out << to_line(r) << '\n';
}

}  // namespace fmridesign
