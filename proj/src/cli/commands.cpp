#include "fmridesign/cli.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <Eigen/LU>

#include "CLI11.hpp"
#include "json.hpp"

#include "fmridesign/blocks.hpp"
#include "fmridesign/certify.hpp"
#include "fmridesign/criteria.hpp"
#include "fmridesign/error.hpp"
#include "fmridesign/record.hpp"
#include "fmridesign/search.hpp"
#include "fmridesign/sequence.hpp"
#include "fmridesign/simulate.hpp"

namespace fmridesign::cli {
namespace {

using nlohmann::json;

// JSON has no infinities: they are written as the string "inf".
json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json matrix_json(const IntMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

double parse_p(const std::string& text) {
  if (text == "inf" || text == "infinity") return kInfinity;
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) throw_invalid("cannot parse p value '" + text + "'");
  return p;
}

std::uint32_t parse_uint(const std::string& text, const char* what) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || v > 0xFFFFFFFFul) {
    throw_invalid(std::string("cannot parse ") + what + " '" + text + "'");
  }
  return static_cast<std::uint32_t>(v);
}

DesignRecord load_record(const std::string& path, int index) {
  const auto records = read_records_file(path);
  if (index < 0 || index >= static_cast<int>(records.size())) {
    throw_invalid("record index " + std::to_string(index) + " out of range for " + path);
  }
  return records[static_cast<std::size_t>(index)];
}

void emit(std::ostream& out, const json& report) { out << report.dump(2) << '\n'; }

std::string min_rotation(const std::string& s) {
  std::string best = s;
  for (std::size_t r = 1; r < s.size(); ++r) best = std::min(best, s.substr(r) + s.substr(0, r));
  return best;
}

json certificate_json(const Certificate& c) {
  json j;
  j["n"] = c.n;
  j["k"] = c.k;
  j["residue"] = c.residue;
  j["objective"] = objective_name(c.objective);
  j["form"] = target_form_name(c.form);
  j["family"] = criteria_family_name(c.family);
  j["summary"] = c.summary();
  j["rule"] = c.rule;
  j["p_cap"] = number(c.p_cap);
  j["p_cap_covered"] = c.p_cap_covered;
  j["asymptotic_only"] = c.asymptotic_only;
  j["notes"] = c.notes;
  j["bound"] = nullptr;
  if (c.bound) {
    j["bound"] = {{"n0", c.bound->n0}, {"satisfied", c.bound->satisfied}, {"margin", c.bound->margin}};
  }
  j["insertion"] = nullptr;
  if (c.insertion) {
    j["insertion"] = {{"run_length", c.insertion->run_length},
                      {"satisfied", c.insertion->satisfied}};
  }
  j["contrast"] = nullptr;
  if (c.contrast) {
    j["contrast"] = {{"signed_sum", c.contrast->signed_sum},
                     {"zero_count", c.contrast->zero_count},
                     {"raw_matrix_matches", c.contrast->raw_matrix_matches},
                     {"exact_contrast_matrix", c.contrast->exact_contrast_matrix}};
  }
  return j;
}

Certificate certify_record(const DesignRecord& r, int k, double p_cap) {
  if (r.alphabet == Alphabet::binary) return certify_estimation(binary_design(r), k, p_cap);
  return certify_contrast(ternary_design(r), k, p_cap);
}

// ---------------------------------------------------------------- construct

struct SourceOptions {
  std::string from;
  std::string design;
  int n = 0;
  int degree = 0;
  std::string taps;
  std::string state = "1";
};

BinaryDesign mseq_from(const SourceOptions& o, json& params) {
  int degree = o.degree;
  if (degree == 0 && o.n > 0) {
    const unsigned v = static_cast<unsigned>(o.n) + 1;
    if ((v & (v - 1)) != 0) throw_invalid("m-sequence length N must be 2^r - 1");
    degree = std::countr_zero(v);
  }
  if (degree == 0) throw_invalid("mseq needs --degree or --n");
  std::uint32_t taps = 0;
  if (o.taps.empty()) {
    const auto poly = default_primitive_polynomial(degree);
    if (!poly) throw_invalid("no default primitive polynomial for degree " + std::to_string(degree) + "; pass --taps");
    taps = *poly;
  } else {
    taps = parse_uint(o.taps, "taps");
  }
  const std::uint32_t state = parse_uint(o.state, "state");
  params["degree"] = degree;
  params["taps"] = taps;
  params["state"] = state;
  return m_sequence(degree, taps, state);
}

BinaryDesign source_design(const SourceOptions& o, json& params) {
  if (!o.design.empty()) {
    params["from"] = "file";
    return binary_design(load_record(o.design, 0));
  }
  if (o.from == "paley") {
    if (o.n == 0) throw_invalid("paley needs --n");
    params["from"] = "paley";
    params["n"] = o.n;
    return paley_hadamard_sequence(o.n);
  }
  if (o.from == "mseq") {
    params["from"] = "mseq";
    return mseq_from(o, params);
  }
  throw_invalid("give --from paley|mseq or --design FILE");
}

int cmd_construct(const std::string& method, const SourceOptions& src, const std::string& variant,
                  bool canonical, int k, const std::string& out_path, std::ostream& out) {
  json params = json::object();
  DesignRecord rec;
  if (method == "paley") {
    if (src.n == 0) throw_invalid("paley needs --n");
    params["n"] = src.n;
    rec = make_record(paley_hadamard_sequence(src.n), "paley", params);
  } else if (method == "mseq") {
    const BinaryDesign d = mseq_from(src, params);
    rec = make_record(d, "mseq", params);
  } else if (method == "insert1" || method == "insert2") {
    const BinaryDesign parent = source_design(src, params);
    rec = make_record(insert_zeros(parent, method == "insert1" ? 1 : 2), method, params);
  } else {
    const BinaryDesign base = source_design(src, params);
    TernaryLift lift;
    if (variant == "j_plus_d") {
      lift = TernaryLift::j_plus_d;
    } else if (variant == "two_j_minus_d") {
      lift = TernaryLift::two_j_minus_d;
    } else {
      throw_invalid("--variant must be j_plus_d or two_j_minus_d");
    }
    params["variant"] = variant;
    rec = make_record(lift_to_ternary(base, lift), "contrast_lift", params);
  }
  if (canonical) {
    rec.sequence = min_rotation(rec.sequence);
    rec.params["canonical"] = true;
  }
  if (k > 0) rec.certificate = certify_record(rec, k, 1.0).summary();

  if (out_path.empty() || out_path == "-") {
    write_records(out, {rec});
  } else {
    std::ofstream f(out_path);
    if (!f) throw_invalid("cannot write " + out_path);
    write_records(f, {rec});
  }
  return kExitOk;
}

// ----------------------------------------------------------------- evaluate

std::vector<CriterionSpec> criteria_from(const std::vector<std::string>& names,
                                         const std::vector<std::string>& ps) {
  std::vector<CriterionSpec> specs;
  for (const auto& n : names) specs.push_back(parse_criterion(n));
  for (const auto& p : ps) specs.push_back(CriterionSpec::phi(parse_p(p)));
  if (specs.empty()) {
    for (const char* n : {"phi0", "phi1", "phiinf"}) specs.push_back(parse_criterion(n));
  }
  return specs;
}

json criteria_json(const std::vector<CriterionSpec>& specs, const Spectrum& s,
                   const Eigen::MatrixXd& m) {
  json out = json::object();
  for (const auto& c : specs) {
    if (c.kind == CriterionKind::ms) {
      out[c.name] = {{"trace", m.trace()}, {"trace_square", (m * m).trace()}};
      continue;
    }
    json entry = {{"value", number(evaluate(c, s))}};
    if (c.kind == CriterionKind::phi_p && c.p == 1.0) entry["convention"] = "tr(M^-1)/K";
    out[c.name] = entry;
  }
  return out;
}

int cmd_evaluate(const std::string& path, int index, int k, const std::vector<CriterionSpec>& specs,
                 const std::string& scale, std::ostream& out) {
  const DesignRecord rec = load_record(path, index);
  json report;
  report["schema"] = 1;
  report["command"] = "evaluate";
  report["n"] = rec.n;
  report["k"] = k;
  report["sequence"] = rec.sequence;

  Eigen::MatrixXd m;
  std::optional<ScaledInfoMatrix> exact;
  if (rec.alphabet == Alphabet::binary) {
    const BinaryDesign d = binary_design(rec);
    if (scale == "signed") {
      exact = info_matrix(to_signed(d).entries(), k);
      report["information"] = "M_b(X_dtilde), dtilde = j - 2d";
    } else if (scale == "binary") {
      exact = info_matrix(as_int8(d), k);
      report["information"] = "M_b(X_d)";
    } else {
      throw_invalid("--scale must be signed or binary");
    }
    m = exact->to_real();
  } else {
    const TernaryStimulusDesign u = ternary_design(rec);
    exact = contrast_info_exact(u, k);
    m = exact ? exact->to_real() : contrast_info(u, k);
    report["information"] = "M_u";
  }
  const Spectrum s = eigenvalues(m);
  report["spectrum"] = json::array();
  for (double v : s.values) report["spectrum"].push_back(v);
  report["singular"] = s.singular();
  double tr_inv = 0.0;
  for (double v : s.values) tr_inv += 1.0 / v;
  report["trace_inverse"] = number(s.singular() ? kInfinity : tr_inv);
  report["criteria"] = criteria_json(specs, s, m);
  if (exact) {
    report["scaled_information"] = {{"divisor", exact->divisor}, {"matrix", matrix_json(exact->scaled)}};
  } else {
    report["scaled_information"] = nullptr;
  }
  emit(out, report);
  return kExitOk;
}

// ------------------------------------------------------------------- search

int cmd_search(const std::string& space, int n, int k, const std::string& criterion, int threads,
               std::uint64_t cap, bool no_symmetry, bool timing, std::ostream& out) {
  SearchOptions opts;
  opts.threads = threads;
  opts.cap = cap;
  opts.symmetry_reduce = !no_symmetry;
  const SearchReport rep =
      exhaustive_best(parse_search_space(space), n, k, parse_criterion(criterion), opts);
  json j;
  j["schema"] = 1;
  j["command"] = "search";
  j["space"] = search_space_name(rep.space);
  j["n"] = rep.n;
  j["k"] = rep.k;
  j["criterion"] = rep.criterion;
  j["best_value"] = number(rep.best_value);
  if (criterion == "ms") j["best_trace_square"] = number(rep.best_secondary);
  j["argmin"] = rep.argmin;
  j["argmin_designs"] = rep.argmin_designs;
  j["space_size"] = rep.space_size;
  j["evaluated"] = rep.evaluated;
  j["symmetry_reduced"] = rep.symmetry_reduced;
  j["orbit_spot_checks"] = rep.orbit_spot_checks;
  j["orbit_invariance_ok"] = rep.orbit_invariance_ok;
  if (timing) j["wall_seconds"] = rep.wall_seconds;
  emit(out, j);
  return kExitOk;
}

// ----------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string design;
  int index = 0;
  int k = 0;
  int replicates = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string noise = "iid";
  double sigma2 = 1.0;
  double gamma = 0.0;
  std::vector<double> h;
  std::vector<double> h2;
};

Eigen::VectorXd truth_vector(const std::vector<double>& v, int k, const char* flag) {
  if (v.empty()) return Eigen::VectorXd::Zero(k);
  if (static_cast<int>(v.size()) != k) {
    throw_invalid(std::string(flag) + " needs exactly K = " + std::to_string(k) + " values");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), k);
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const DesignRecord rec = load_record(o.design, o.index);
  const NoiseKind kind = parse_noise_kind(o.noise);
  const NoiseSpec noise = NoiseSpec::of_kind(kind, rec.n, o.sigma2);
  MonteCarloOptions mc{o.replicates, o.seed, o.threads};
  GroundTruth truth;
  truth.gamma = o.gamma;
  truth.h = truth_vector(o.h, o.k, "--hrf");

  json j;
  j["schema"] = 1;
  j["command"] = "simulate";
  j["n"] = rec.n;
  j["k"] = o.k;
  j["sequence"] = rec.sequence;
  j["seed"] = o.seed;
  j["noise"] = {{"kind", noise_kind_name(kind)}, {"sigma2", o.sigma2}};
  if (kind == NoiseKind::compound) {
    j["noise"]["alpha"] = noise.alpha();
    j["noise"]["beta"] = vector_json(noise.beta());
  }

  MonteCarloResult res;
  if (rec.alphabet == Alphabet::binary) {
    const BinaryDesign d = binary_design(rec);
    res = monte_carlo(d, truth, noise, mc);
    j["estimand"] = "h";
    if (kind == NoiseKind::compound) {
      const Eigen::MatrixXd cov = res.theory / (o.sigma2 > 0 ? o.sigma2 : 1.0);
      const Eigen::MatrixXd ols_info = cov.inverse();
      j["exploratory"]["ols_information"] = matrix_json(ols_info);
      j["exploratory"]["gls_information"] = matrix_json(gls_information(d, o.k, noise));
    }
  } else {
    truth.h2 = truth_vector(o.h2, o.k, "--hrf2");
    res = monte_carlo(ternary_design(rec), truth, noise, mc);
    j["estimand"] = "zeta = h1 - h2";
  }
  j["replicates"] = res.replicates;
  j["mean"] = vector_json(res.mean);
  j["covariance"] = matrix_json(res.covariance);
  j["theory"] = matrix_json(res.theory);
  j["max_relative_error"] = number(res.max_relative_error);
  j["frobenius_error"] = number(res.frobenius_error);
  emit(out, j);
  return kExitOk;
}

int cmd_efficiency(const std::vector<std::string>& paths, int k, const std::string& criterion,
                   const std::string& noise, std::ostream& out) {
  std::vector<BinaryDesign> designs;
  std::vector<std::string> sequences;
  for (const auto& p : paths) {
    for (const auto& r : read_records_file(p)) {
      designs.push_back(binary_design(r));
      sequences.push_back(r.sequence);
    }
  }
  const auto rows = efficiency_report(designs, k, parse_criterion(criterion), parse_noise_kind(noise));
  json j;
  j["schema"] = 1;
  j["command"] = "efficiency";
  j["k"] = k;
  j["criterion"] = parse_criterion(criterion).name;
  j["noise"] = noise;
  j["designs"] = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    j["designs"].push_back({{"index", i},
                            {"n", rows[i].n},
                            {"sequence", sequences[i]},
                            {"value", number(rows[i].value)},
                            {"efficiency", rows[i].efficiency}});
  }
  emit(out, j);
  return kExitOk;
}

// ------------------------------------------------------------------- blocks

int cmd_blocks(int n, int k, std::ostream& out) {
  const BlockMinimum mn = min_block_trace(n, k);
  json j;
  j["schema"] = 1;
  j["command"] = "blocks";
  j["n"] = n;
  j["k"] = k;
  j["n0"] = k >= 4 ? json(n0_cubic(k)) : json(nullptr);
  j["in_stated_domain"] = mn.in_stated_domain;
  j["bound_applies"] = mn.bound_applies;
  j["best"] = mn.best.to_string();
  j["value"] = mn.value;
  j["winner_all_ones"] = mn.winner_all_ones;
  j["winner_contiguous"] = mn.winner_contiguous;
  j["skipped_not_positive_definite"] = mn.skipped_not_positive_definite;
  j["ranking"] = json::array();
  for (const auto& r : mn.ranking) {
    j["ranking"].push_back({{"partition", r.partition.to_string()},
                            {"trace", r.value},
                            {"trace_second_form", block_trace_inverse(n, r.partition, TraceFormula::second)},
                            {"trace_dense", block_trace_inverse_dense(n, r.partition)}});
  }
  emit(out, j);
  return kExitOk;
}

// ---------------------------------------------------------------- tabulated

int cmd_tabulated(const std::string& golden_dir, std::ostream& out) {
  const DesignRecord dh = make_record(paley_hadamard_sequence(151), "paley", {{"n", 151}});
  const DesignRecord d1 = make_record(insert_zeros(paley_hadamard_sequence(131), 1), "insert1",
                                      {{"from", "paley"}, {"n", 131}});
  if (golden_dir.empty()) {
    write_records(out, {dh, d1});
    return kExitOk;
  }
  const DesignRecord gh = load_record(golden_dir + "/dH_151.json", 0);
  const DesignRecord g1 = load_record(golden_dir + "/d1gH_132.json", 0);
  json j;
  j["schema"] = 1;
  j["command"] = "tabulated";
  j["d_H"] = {{"n", dh.n}, {"exact_match", dh.sequence == gh.sequence}};
  j["d_1gH"] = {{"n", d1.n},
                {"exact_match", d1.sequence == g1.sequence},
                {"rotation_match", min_rotation(d1.sequence) == min_rotation(g1.sequence)}};
  emit(out, j);
  return kExitOk;
}

void report_error(std::ostream& err, const char* kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal circulant fMRI designs: construct, certify, search, simulate", "fmridesign"};
  app.require_subcommand(1);

  std::string cap_text;
  std::uint64_t cap = 0;
  int threads = 1;

  // construct
  auto* construct = app.add_subcommand("construct", "Build a design and emit a design record");
  std::string method, variant = "j_plus_d", out_path;
  SourceOptions src;
  bool canonical = false;
  int construct_k = 0;
  construct->add_option("method", method, "paley | mseq | insert1 | insert2 | contrast_lift")
      ->required()
      ->check(CLI::IsMember({"paley", "mseq", "insert1", "insert2", "contrast_lift"}));
  construct->add_option("--n", src.n, "Length (paley) or parent length");
  construct->add_option("--from", src.from, "Parent construction for insert/contrast_lift: paley | mseq");
  construct->add_option("--design", src.design, "Parent design file");
  construct->add_option("--degree", src.degree, "m-sequence register length r");
  construct->add_option("--taps", src.taps, "m-sequence polynomial mask incl. x^r (e.g. 0x25)");
  construct->add_option("--state", src.state, "m-sequence initial state, bit i = s_i");
  construct->add_option("--variant", variant, "contrast_lift: j_plus_d | two_j_minus_d");
  construct->add_flag("--canonical", canonical, "Rotate to the lexicographically smallest rotation");
  construct->add_option("--k", construct_k, "Attach the certificate summary for this K");
  construct->add_option("--out", out_path, "Output file (default stdout)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Criterion values and spectrum of a design");
  std::string design_path;
  int index = 0, k = 0;
  std::vector<std::string> criteria, ps;
  std::string scale = "signed";
  eval->add_option("--design", design_path, "Design file")->required();
  eval->add_option("--index", index, "Record index within the file");
  eval->add_option("--k", k, "HRF length K")->required();
  eval->add_option("--criterion", criteria, "phi0|phi1|phi2|phiinf|phi:<p>|A|D|E|type1:inverse|type1:neglog|ms");
  eval->add_option("--p", ps, "Add Phi_p for this p (inf allowed)");
  eval->add_option("--scale", scale, "signed (M_b of j - 2d) | binary (M_b of d)");

  // certify
  auto* cert = app.add_subcommand("certify", "Optimality certificate for a design");
  std::string p_cap = "1";
  cert->add_option("--design", design_path, "Design file")->required();
  cert->add_option("--index", index, "Record index within the file");
  cert->add_option("--k", k, "HRF length K")->required();
  cert->add_option("--p", p_cap, "Largest p of interest (default 1)");

  // search
  auto* search = app.add_subcommand("search", "Exhaustive search over a small design space");
  std::string space = "binary", criterion = "phi1";
  int n = 0;
  bool no_symmetry = false, timing = false;
  search->add_option("--space", space, "binary | signed | ternary");
  search->add_option("--n", n, "Design length N")->required();
  search->add_option("--k", k, "HRF length K")->required();
  search->add_option("--criterion", criterion, "Criterion to minimize");
  search->add_option("--threads", threads, "Worker threads");
  search->add_option("--cap", cap_text, "Evaluation cap (default FMRIDESIGN_CAP or 2^24)");
  search->add_flag("--no-symmetry", no_symmetry, "Evaluate every design, not one per orbit");
  search->add_flag("--timing", timing, "Report wall-clock seconds");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo check of the estimator covariance");
  SimulateOptions so;
  sim->add_option("--design", so.design, "Design file")->required();
  sim->add_option("--index", so.index, "Record index within the file");
  sim->add_option("--k", so.k, "HRF length K")->required();
  sim->add_option("--replicates", so.replicates, "Replicates");
  sim->add_option("--seed", so.seed, "Random seed");
  sim->add_option("--threads", so.threads, "Worker threads");
  sim->add_option("--noise", so.noise, "iid | compound");
  sim->add_option("--sigma2", so.sigma2, "Noise variance scale");
  sim->add_option("--gamma", so.gamma, "Intercept");
  sim->add_option("--hrf", so.h, "HRF (h1 for ternary designs), comma separated")->delimiter(',');
  sim->add_option("--hrf2", so.h2, "Second HRF for ternary designs")->delimiter(',');

  // efficiency
  auto* eff = app.add_subcommand("efficiency", "Relative efficiencies of designs");
  std::vector<std::string> designs;
  std::string noise = "iid";
  eff->add_option("--design", designs, "Design file(s); every record is used")->required();
  eff->add_option("--k", k, "HRF length K")->required();
  eff->add_option("--criterion", criterion, "Positive scalar criterion (default phi1)");
  eff->add_option("--noise", noise, "iid | compound");

  // blocks
  auto* blocks = app.add_subcommand("blocks", "Block-matrix traces and their minimum over partitions");
  blocks->add_option("--n", n, "N = 3 (mod 4), N >= 7")->required();
  blocks->add_option("--k", k, "Dimension K")->required();

  // tabulated
  auto* tabulated = app.add_subcommand("tabulated", "Regenerate the two long tabulated designs");
  std::string golden;
  tabulated->add_option("--check", golden, "Directory holding the golden records to compare against");

  std::vector<const char*> argv{"fmridesign"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      report_error(err, "validation", e.what());
      return kExitValidation;
    }
    if (!cap_text.empty()) {
      std::size_t used = 0;
      cap = std::stoull(cap_text, &used);
      if (used != cap_text.size() || cap == 0) throw_invalid("--cap must be a positive integer");
    } else {
      cap = default_evaluation_cap();
    }

    if (construct->parsed()) {
      return cmd_construct(method, src, variant, canonical, construct_k, out_path, out);
    }
    if (eval->parsed()) return cmd_evaluate(design_path, index, k, criteria_from(criteria, ps), scale, out);
    if (cert->parsed()) {
      json j = certificate_json(certify_record(load_record(design_path, index), k, parse_p(p_cap)));
      j["schema"] = 1;
      j["command"] = "certify";
      emit(out, j);
      return kExitOk;
    }
    if (search->parsed()) {
      return cmd_search(space, n, k, criterion, threads, cap, no_symmetry, timing, out);
    }
    if (sim->parsed()) return cmd_simulate(so, out);
    if (eff->parsed()) return cmd_efficiency(designs, k, criterion, noise, out);
    if (blocks->parsed()) return cmd_blocks(n, k, out);
    if (tabulated->parsed()) return cmd_tabulated(golden, out);
  } catch (const ResourceCapExceeded& e) {
    report_error(err, "resource_cap", e.what());
    return kExitResourceCap;
  } catch (const DesignError& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  } catch (const json::exception& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace fmridesign::cli
