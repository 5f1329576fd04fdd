#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fmridesign/cli.hpp"
#include "json.hpp"

using fmridesign::cli::run;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("fmridesign_cli_" + name);
  std::ofstream(path) << content;
  return path.string();
}

std::string data_path(const std::string& name) { return std::string(FMRIDESIGN_DATA_DIR) + "/" + name; }

std::string read_line(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_CASE("construct paley 151 reproduces the stored record") {
  const Outcome o = call({"construct", "paley", "--n", "151"});
  CHECK(o.code == 0);
  CHECK(json::parse(o.out)["sequence"] == json::parse(read_line(data_path("dH_151.json")))["sequence"]);
}

TEST_CASE("construct reports validation errors as JSON") {
  const Outcome o = call({"construct", "paley", "--n", "10"});
  CHECK(o.code == 2);
  CHECK(o.out.empty());
  const json e = json::parse(o.err);
  CHECK(e["error"] == "validation");
  CHECK(e["message"].get<std::string>().find("not prime") != std::string::npos);

  CHECK(call({"construct", "wavelet", "--n", "7"}).code == 2);
  CHECK(call({"construct", "mseq", "--degree", "4", "--taps", "0x11"}).code == 2);
}

TEST_CASE("construct variants") {
  CHECK(json::parse(call({"construct", "mseq", "--degree", "2", "--taps", "0x7", "--state", "3"}).out)["sequence"] == "110");
  const json ins = json::parse(call({"construct", "insert1", "--from", "paley", "--n", "7"}).out);
  CHECK(ins["sequence"] == "10001011");
  CHECK(ins["provenance"]["params"]["run_length"] == 2);
  CHECK(json::parse(call({"construct", "contrast_lift", "--from", "paley", "--n", "7"}).out)["sequence"] ==
        "2112122");
  const json canon = json::parse(call({"construct", "paley", "--n", "7", "--canonical", "--k", "3"}).out);
  CHECK(canon["sequence"] == "0010111");
  CHECK(canon.contains("certificate"));
}

TEST_CASE("evaluate") {
  const std::string paley7 = temp_file("p7.jsonl", call({"construct", "paley", "--n", "7"}).out);
  const json r = json::parse(call({"evaluate", "--design", paley7, "--k", "3", "--criterion", "phi1"}).out);
  CHECK(std::abs(r["trace_inverse"].get<double>() - 0.46875) < 1e-12);
  CHECK(std::abs(r["criteria"]["phi_1"]["value"].get<double>() - 0.15625) < 1e-12);
  CHECK(r["criteria"]["phi_1"]["convention"] == "tr(M^-1)/K");
  CHECK(r["scaled_information"]["divisor"] == 7);

  const std::string ins = temp_file("i8.jsonl", call({"construct", "insert1", "--from", "paley", "--n", "7"}).out);
  const json r8 = json::parse(call({"evaluate", "--design", ins, "--k", "3", "--criterion", "A"}).out);
  CHECK(std::abs(r8["criteria"]["phi_1"]["value"].get<double>() - 0.125) < 1e-12);

  const std::string ones =
      temp_file("ones.jsonl", R"({"alphabet":"binary","n":7,"schema":1,"sequence":"1111111"})");
  const json rs = json::parse(call({"evaluate", "--design", ones, "--k", "3"}).out);
  CHECK(rs["singular"] == true);
  CHECK(rs["trace_inverse"] == "inf");
  CHECK(rs["criteria"]["phi_1"]["value"] == "inf");
}

TEST_CASE("certify") {
  const std::string dh = data_path("dH_151.json");
  const Outcome o = call({"certify", "--design", dh, "--k", "9"});
  CHECK(o.code == 0);
  const json j = json::parse(o.out);
  CHECK(j["summary"] == "Φ_p-optimal, p∈[0,1]; N₀=21.34");
  CHECK(j["bound"]["satisfied"] == true);
  const json g = json::parse(call({"certify", "--design", data_path("d1gH_132.json"), "--k", "9"}).out);
  CHECK(g["summary"] == "universally optimal");
  const json inf = json::parse(call({"certify", "--design", dh, "--k", "9", "--p", "inf"}).out);
  CHECK(inf["p_cap"] == "inf");
  CHECK(inf["p_cap_covered"] == false);
}

TEST_CASE("search") {
  const Outcome o = call({"search", "--space", "binary", "--n", "8", "--k", "3", "--criterion", "phi1"});
  CHECK(o.code == 0);
  const json j = json::parse(o.out);
  const auto argmin = j["argmin"].get<std::vector<std::string>>();
  CHECK(std::find(argmin.begin(), argmin.end(), "00010111") != argmin.end());
  CHECK(std::abs(j["best_value"].get<double>() - 0.5) < 1e-12);
  CHECK(o.out == call({"search", "--space", "binary", "--n", "8", "--k", "3", "--criterion", "phi1",
                       "--threads", "3"}).out);

  const Outcome capped = call({"search", "--space", "binary", "--n", "16", "--k", "3", "--cap", "100"});
  CHECK(capped.code == 3);
  CHECK(json::parse(capped.err)["error"] == "resource_cap");
  CHECK(call({"search", "--space", "ternary", "--n", "16", "--k", "2"}).code == 3);
}

TEST_CASE("blocks") {
  const json j = json::parse(call({"blocks", "--n", "23", "--k", "9"}).out);
  CHECK(j["best"] == "(1,1,1,1,1,1,1,1,1)");
  CHECK(j["winner_all_ones"] == true);
  CHECK(std::abs(j["n0"].get<double>() - 21.34) < 0.01);
  CHECK(call({"blocks", "--n", "9", "--k", "3"}).code == 2);
}

TEST_CASE("simulate is deterministic and reports the theory") {
  const std::string p = temp_file("p19.jsonl", call({"construct", "paley", "--n", "19"}).out);
  const std::vector<std::string> args{"simulate", "--design", p, "--k", "4", "--replicates", "2000", "--seed", "5"};
  const Outcome a = call(args);
  CHECK(a.code == 0);
  CHECK(a.out == call(args).out);
  const json j = json::parse(a.out);
  CHECK(j["theory"].size() == 4);
  CHECK(j["replicates"] == 2000);
  const json c = json::parse(call({"simulate", "--design", p, "--k", "4", "--replicates", "500", "--noise",
                                   "compound"}).out);
  CHECK(c.contains("exploratory"));
  CHECK(call({"simulate", "--design", p, "--k", "4", "--hrf", "1,2"}).code == 2);
}

TEST_CASE("efficiency and tabulated designs") {
  const std::string p = temp_file("p7b.jsonl", call({"construct", "paley", "--n", "7"}).out);
  const std::string i = temp_file("i8b.jsonl", call({"construct", "insert1", "--from", "paley", "--n", "7"}).out);
  const json e = json::parse(call({"efficiency", "--design", p, i, "--k", "3"}).out);
  REQUIRE(e["designs"].size() == 2);
  CHECK(e["designs"][1]["efficiency"] == 1.0);

  const json t = json::parse(call({"tabulated", "--check", FMRIDESIGN_DATA_DIR}).out);
  CHECK(t["d_H"]["exact_match"] == true);
  CHECK(t["d_1gH"]["rotation_match"] == true);
}

TEST_CASE("missing inputs") {
  CHECK(call({"evaluate", "--design", "/nonexistent.jsonl", "--k", "3"}).code == 2);
  CHECK(call({}).code == 2);
  CHECK(call({"evaluate", "--k", "3"}).code == 2);
}
