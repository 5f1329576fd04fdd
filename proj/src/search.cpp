#include "fmridesign/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <set>
#include <thread>

#include "fmridesign/error.hpp"

namespace fmridesign {
namespace {

// Lexicographic (primary, secondary) key; smaller is better. For scalar
// criteria secondary is 0; for (M,S) it is (-trace, tr of square).
struct Key {
  double primary = kInfinity;
  double secondary = 0.0;
};

bool close(double a, double b) {
  if (a == b) return true;
  if (std::isinf(a) || std::isinf(b)) return false;
  return std::abs(a - b) <= kOptimalityTolerance * std::max(std::abs(a), std::abs(b));
}

int compare(const Key& a, const Key& b) {
  if (!close(a.primary, b.primary)) return a.primary < b.primary ? -1 : 1;
  if (!close(a.secondary, b.secondary)) return a.secondary < b.secondary ? -1 : 1;
  return 0;
}

bool numerically_less(const Key& a, const Key& b) {
  return a.primary < b.primary || (a.primary == b.primary && a.secondary < b.secondary);
}

std::uint64_t saturating_pow(std::uint64_t base, int exp) {
  std::uint64_t v = 1;
  for (int i = 0; i < exp; ++i) {
    if (v > UINT64_MAX / base) return UINT64_MAX;
    v *= base;
  }
  return v;
}

// Index <-> symbol sequence; symbol 0 is the most significant digit so that
// integer order equals lexicographic order of the sequence.
class Codec {
 public:
  Codec(SearchSpace space, int n)
      : space_(space), n_(n), base_(space == SearchSpace::ternary_two_stim ? 3 : 2),
        size_(saturating_pow(base_, n)) {}

  std::uint64_t size() const { return size_; }
  int length() const { return n_; }

  void decode(std::uint64_t idx, std::vector<std::uint8_t>& digits) const {
    digits.resize(static_cast<std::size_t>(n_));
    for (int i = n_ - 1; i >= 0; --i) {
      digits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(idx % base_);
      idx /= base_;
    }
  }

  std::uint64_t encode(const std::vector<std::uint8_t>& digits) const {
    std::uint64_t idx = 0;
    for (auto d : digits) idx = idx * base_ + d;
    return idx;
  }

  // Every member of the orbit (with repetitions for periodic sequences).
  std::vector<std::uint64_t> orbit(std::uint64_t idx) const {
    std::vector<std::uint64_t> out;
    if (base_ == 2) {
      const std::uint64_t mask = size_ - 1;
      for (int s = 0; s < n_; ++s) {
        const std::uint64_t r =
            s == 0 ? idx : (((idx << s) | (idx >> (n_ - s))) & mask);
        out.push_back(r);
        if (space_ == SearchSpace::signed_pm1) out.push_back(~r & mask);
      }
      return out;
    }
    std::vector<std::uint8_t> digits, rot(static_cast<std::size_t>(n_));
    decode(idx, digits);
    for (int s = 0; s < n_; ++s) {
      for (int i = 0; i < n_; ++i) {
        rot[static_cast<std::size_t>(i)] = digits[static_cast<std::size_t>((i + s) % n_)];
      }
      out.push_back(encode(rot));
      for (auto& d : rot) d = d == 0 ? 0 : static_cast<std::uint8_t>(3 - d);  // swap labels 1 <-> 2
      out.push_back(encode(rot));
    }
    return out;
  }

  std::uint64_t canonical(std::uint64_t idx) const {
    if (base_ == 2) {
      const std::uint64_t mask = size_ - 1;
      std::uint64_t best = idx;
      for (int s = 1; s < n_; ++s) {
        const std::uint64_t r = ((idx << s) | (idx >> (n_ - s))) & mask;
        best = std::min(best, r);
      }
      if (space_ == SearchSpace::signed_pm1) {
        const std::uint64_t c = ~idx & mask;
        for (int s = 0; s < n_; ++s) {
          const std::uint64_t r = s == 0 ? c : (((c << s) | (c >> (n_ - s))) & mask);
          best = std::min(best, r);
        }
      }
      return best;
    }
    const auto members = orbit(idx);
    return *std::min_element(members.begin(), members.end());
  }

  std::uint64_t orbit_size(std::uint64_t idx) const {
    const auto members = orbit(idx);
    return std::set<std::uint64_t>(members.begin(), members.end()).size();
  }

  std::string symbols(std::uint64_t idx) const {
    std::vector<std::uint8_t> digits;
    decode(idx, digits);
    std::string s(digits.size(), '0');
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (space_ == SearchSpace::signed_pm1) {
        s[i] = digits[i] ? '+' : '-';
      } else {
        s[i] = static_cast<char>('0' + digits[i]);
      }
    }
    return s;
  }

  std::uint64_t parse(std::string_view symbols) const {
    std::vector<std::uint8_t> digits;
    for (char c : symbols) {
      int v = -1;
      if (space_ == SearchSpace::signed_pm1) {
        v = c == '+' ? 1 : (c == '-' ? 0 : -1);
      } else if (c >= '0' && c < static_cast<char>('0' + base_)) {
        v = c - '0';
      }
      if (v < 0) throw_invalid(std::string("invalid symbol '") + c + "' for search space");
      digits.push_back(static_cast<std::uint8_t>(v));
    }
    if (static_cast<int>(digits.size()) != n_) throw_invalid("symbol string has wrong length");
    return encode(digits);
  }

 private:
  SearchSpace space_;
  int n_;
  std::uint64_t base_;
  std::uint64_t size_;
};

class Evaluator {
 public:
  Evaluator(SearchSpace space, int n, int k, const CriterionSpec& criterion)
      : space_(space), n_(n), k_(k), criterion_(criterion), codec_(space, n) {}

  Key operator()(std::uint64_t idx) {
    codec_.decode(idx, digits_);
    if (space_ == SearchSpace::ternary_two_stim) {
      const Eigen::MatrixXd m = contrast_info(TernaryStimulusDesign(digits_), k_);
      if (criterion_.kind == CriterionKind::ms) return Key{-m.trace(), (m * m).trace()};
      return Key{evaluate(criterion_, eigenvalues(m)), 0.0};
    }
    seq_.resize(digits_.size());
    for (std::size_t i = 0; i < digits_.size(); ++i) {
      seq_[i] = space_ == SearchSpace::signed_pm1 ? static_cast<std::int8_t>(2 * digits_[i] - 1)
                                                  : static_cast<std::int8_t>(digits_[i]);
    }
    const ScaledInfoMatrix m = info_matrix(seq_, k_, InfoKind::biased);
    if (criterion_.kind == CriterionKind::ms) {
      const double d = static_cast<double>(m.divisor);
      const double sumsq = static_cast<double>(m.scaled.cwiseProduct(m.scaled).sum());
      return Key{-static_cast<double>(m.scaled_trace()) / d, sumsq / (d * d)};
    }
    return Key{evaluate(criterion_, eigenvalues(m)), 0.0};
  }

 private:
  SearchSpace space_;
  int n_;
  int k_;
  const CriterionSpec& criterion_;
  Codec codec_;
  std::vector<std::uint8_t> digits_;
  std::vector<std::int8_t> seq_;
};

struct Partial {
  Key best;
  std::vector<std::pair<std::uint64_t, Key>> candidates;
  std::uint64_t evaluated = 0;

  void prune() {
    std::erase_if(candidates, [this](const auto& c) { return compare(c.second, best) != 0; });
  }

  void offer(std::uint64_t idx, const Key& key) {
    ++evaluated;
    if (std::isinf(key.primary)) return;
    const int c = compare(key, best);
    if (c > 0) return;
    const bool lowered = numerically_less(key, best);
    if (lowered) best = key;
    candidates.emplace_back(idx, key);
    if (lowered) prune();
  }

  void merge(Partial&& other) {
    evaluated += other.evaluated;
    if (numerically_less(other.best, best)) best = other.best;
    for (auto& c : other.candidates) candidates.push_back(c);
    prune();
  }
};

void check_search_args(SearchSpace space, int n, int k, const SearchOptions& options,
                       std::uint64_t size) {
  if (n < 1) throw_invalid("N must be >= 1");
  if (k < 1 || k > n) throw_invalid("K must satisfy 1 <= K <= N");
  if (options.threads < 1) throw_invalid("threads must be >= 1");
  if (space == SearchSpace::ternary_two_stim && n > kMaxTernaryLength) {
    throw ResourceCapExceeded("ternary search is limited to N <= " +
                                  std::to_string(kMaxTernaryLength),
                              size, options.cap);
  }
  if (size > options.cap) {
    throw ResourceCapExceeded("search space of " + std::to_string(size) +
                                  " designs exceeds the evaluation cap of " +
                                  std::to_string(options.cap),
                              size, options.cap);
  }
}

}  // namespace

std::string_view search_space_name(SearchSpace s) noexcept {
  switch (s) {
    case SearchSpace::binary:
      return "binary";
    case SearchSpace::signed_pm1:
      return "signed";
    case SearchSpace::ternary_two_stim:
      break;
  }
  return "ternary";
}

SearchSpace parse_search_space(std::string_view name) {
  if (name == "binary") return SearchSpace::binary;
  if (name == "signed") return SearchSpace::signed_pm1;
  if (name == "ternary" || name == "ternary_two_stim") return SearchSpace::ternary_two_stim;
  throw_invalid("unknown search space '" + std::string(name) + "'");
}

std::uint64_t default_evaluation_cap() {
  if (const char* env = std::getenv("FMRIDESIGN_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultEvaluationCap;
}

SearchReport exhaustive_best(SearchSpace space, int n, int k, const CriterionSpec& criterion,
                             const SearchOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const Codec codec(space, n);
  check_search_args(space, n, k, options, codec.size());

  const std::uint64_t size = codec.size();
  const int workers = static_cast<int>(std::min<std::uint64_t>(options.threads, size));
  std::vector<Partial> partials(static_cast<std::size_t>(workers));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));

  auto run = [&](int w) {
    try {
      Evaluator eval(space, n, k, criterion);
      const std::uint64_t lo = size * static_cast<std::uint64_t>(w) / workers;
      const std::uint64_t hi = size * static_cast<std::uint64_t>(w + 1) / workers;
      Partial& part = partials[static_cast<std::size_t>(w)];
      for (std::uint64_t idx = lo; idx < hi; ++idx) {
        if (options.symmetry_reduce && codec.canonical(idx) != idx) continue;
        part.offer(idx, eval(idx));
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Partial total = std::move(partials.front());
  for (std::size_t w = 1; w < partials.size(); ++w) total.merge(std::move(partials[w]));

  SearchReport rep;
  rep.space = space;
  rep.n = n;
  rep.k = k;
  rep.criterion = criterion.name;
  rep.space_size = size;
  rep.evaluated = total.evaluated;
  rep.symmetry_reduced = options.symmetry_reduce;
  if (criterion.kind == CriterionKind::ms) {
    rep.best_value = -total.best.primary;
    rep.best_secondary = total.best.secondary;
  } else {
    rep.best_value = total.best.primary;
  }

  std::set<std::uint64_t> reps;
  for (const auto& c : total.candidates) reps.insert(codec.canonical(c.first));
  if (options.symmetry_reduce) {
    for (auto r : reps) rep.argmin_designs += codec.orbit_size(r);
  } else {
    rep.argmin_designs = total.candidates.size();
  }
  for (auto r : reps) rep.argmin.push_back(codec.symbols(r));

  if (options.symmetry_reduce && options.orbit_spot_checks > 0) {
    std::mt19937_64 rng(0x5eedULL ^ (static_cast<std::uint64_t>(n) << 8) ^ static_cast<std::uint64_t>(k));
    std::uniform_int_distribution<std::uint64_t> pick(0, size - 1);
    Evaluator eval(space, n, k, criterion);
    const bool exact = space != SearchSpace::ternary_two_stim;
    for (int i = 0; i < options.orbit_spot_checks; ++i) {
      const std::uint64_t canon = codec.canonical(pick(rng));
      const Key ref = eval(canon);
      for (auto member : codec.orbit(canon)) {
        const Key v = eval(member);
        const bool same = exact ? (v.primary == ref.primary && v.secondary == ref.secondary)
                                : compare(v, ref) == 0;
        if (!same) rep.orbit_invariance_ok = false;
      }
      ++rep.orbit_spot_checks;
    }
  }

  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {

Verification finish_verification(const Key& design, const SearchReport& rep,
                                 const CriterionSpec& criterion) {
  Verification v;
  if (criterion.kind == CriterionKind::ms) {
    const Key best{-rep.best_value, rep.best_secondary};
    v.value = -design.primary;
    v.best = rep.best_value;
    const int c = compare(design, best);
    if (c == 0) {
      v.margin = 0.0;
    } else if (!close(design.primary, best.primary)) {
      v.margin = design.primary - best.primary;
    } else {
      v.margin = design.secondary - best.secondary;
    }
    v.is_optimal = c == 0;
    return v;
  }
  v.value = design.primary;
  v.best = rep.best_value;
  v.margin = std::isinf(v.value) ? kInfinity : v.value - v.best;
  v.is_optimal = v.margin <= kOptimalityTolerance * std::abs(v.best);
  return v;
}

}  // namespace

Verification verify_optimal(const BinaryDesign& d, SearchSpace space, int k,
                            const CriterionSpec& criterion, const SearchOptions& options) {
  if (space == SearchSpace::ternary_two_stim) {
    throw_invalid("a binary design can only be verified in the binary or signed space");
  }
  const int n = d.length();
  const SearchReport rep = exhaustive_best(space, n, k, criterion, options);
  Codec codec(space, n);
  std::string symbols = d.to_string();
  if (space == SearchSpace::signed_pm1) {
    // d~ = j - 2d: 0 -> '+', 1 -> '-'
    for (char& c : symbols) c = c == '0' ? '+' : '-';
  }
  Evaluator eval(space, n, k, criterion);
  return finish_verification(eval(codec.parse(symbols)), rep, criterion);
}

Verification verify_optimal(const TernaryStimulusDesign& u, int k, const CriterionSpec& criterion,
                            const SearchOptions& options) {
  const int n = u.length();
  const SearchReport rep = exhaustive_best(SearchSpace::ternary_two_stim, n, k, criterion, options);
  Codec codec(SearchSpace::ternary_two_stim, n);
  Evaluator eval(SearchSpace::ternary_two_stim, n, k, criterion);
  return finish_verification(eval(codec.parse(u.to_string())), rep, criterion);
}

std::string canonical_orbit_representative(SearchSpace space, std::string_view symbols) {
  const Codec codec(space, static_cast<int>(symbols.size()));
  return codec.symbols(codec.canonical(codec.parse(symbols)));
}

}  // namespace fmridesign
