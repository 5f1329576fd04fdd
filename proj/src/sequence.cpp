#include "fmridesign/sequence.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <numeric>
#include <string>

#include "fmridesign/error.hpp"

namespace fmridesign {

std::string_view provenance_name(Provenance p) noexcept {
  switch (p) {
    case Provenance::paley:
      return "paley";
    case Provenance::m_sequence:
      return "m_sequence";
    case Provenance::insertion:
      return "insertion";
    case Provenance::user:
      break;
  }
  return "user";
}

BinaryDesign::BinaryDesign(std::vector<std::uint8_t> bits, Provenance provenance,
                           std::optional<InsertionInfo> insertion)
    : bits_(std::move(bits)), provenance_(provenance), insertion_(insertion) {
  if (bits_.empty()) throw_invalid("design must have at least one time point");
  for (auto b : bits_) {
    if (b > 1) throw_invalid("binary design entries must be 0 or 1");
  }
}

BinaryDesign BinaryDesign::parse(std::string_view symbols, Provenance provenance) {
  std::vector<std::uint8_t> bits;
  bits.reserve(symbols.size());
  for (char c : symbols) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c != '0' && c != '1') {
      throw_invalid(std::string("binary design symbol must be 0 or 1, got '") + c + "'");
    }
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return BinaryDesign(std::move(bits), provenance);
}

int BinaryDesign::count_ones() const noexcept {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string BinaryDesign::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = static_cast<char>('0' + bits_[i]);
  return s;
}

BinaryDesign BinaryDesign::rotated(int shift) const {
  const int n = length();
  const int s = ((shift % n) + n) % n;
  std::vector<std::uint8_t> out(bits_.size());
  std::rotate_copy(bits_.begin(), bits_.begin() + s, bits_.end(), out.begin());
  return BinaryDesign(std::move(out), provenance_, insertion_);
}

BinaryDesign BinaryDesign::canonical_rotation() const {
  BinaryDesign best = *this;
  for (int s = 1; s < length(); ++s) {
    BinaryDesign r = rotated(s);
    if (std::lexicographical_compare(r.bits_.begin(), r.bits_.end(), best.bits_.begin(),
                                     best.bits_.end())) {
      best = std::move(r);
    }
  }
  return best;
}

bool equal_up_to_rotation(const BinaryDesign& a, const BinaryDesign& b) {
  if (a.length() != b.length()) return false;
  for (int s = 0; s < a.length(); ++s) {
    if (a.rotated(s) == b) return true;
  }
  return false;
}

bool is_prime(std::int64_t n) noexcept {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::int64_t f = 3; f * f <= n; f += 2) {
    if (n % f == 0) return false;
  }
  return true;
}

BinaryDesign paley_hadamard_sequence(int n) {
  if (!is_prime(n)) {
    throw ConstructionUnavailable("N must be prime ≡ 3 (mod 4): " + std::to_string(n) +
                                  " is not prime");
  }
  if (n % 4 != 3) {
    throw ConstructionUnavailable("N must be prime ≡ 3 (mod 4): " + std::to_string(n) +
                                  " ≡ " + std::to_string(n % 4) + " (mod 4)");
  }
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 1);
  for (std::int64_t x = 1; x <= (n - 1) / 2; ++x) {
    bits[static_cast<std::size_t>((x * x) % n)] = 0;
  }
  return BinaryDesign(std::move(bits), Provenance::paley);
}

std::optional<std::uint32_t> default_primitive_polynomial(int degree) noexcept {
  // x^r plus the listed lower-order terms; all verified by the period check.
  static constexpr std::array<std::uint32_t, 17> table = {
      0,        0,
      0x7,      // x^2 + x + 1
      0xB,      // x^3 + x + 1
      0x13,     // x^4 + x + 1
      0x25,     // x^5 + x^2 + 1
      0x43,     // x^6 + x + 1
      0x83,     // x^7 + x + 1
      0x11D,    // x^8 + x^4 + x^3 + x^2 + 1
      0x211,    // x^9 + x^4 + 1
      0x409,    // x^10 + x^3 + 1
      0x805,    // x^11 + x^2 + 1
      0x1053,   // x^12 + x^6 + x^4 + x + 1
      0x201B,   // x^13 + x^4 + x^3 + x + 1
      0x4443,   // x^14 + x^10 + x^6 + x + 1
      0x8003,   // x^15 + x + 1
      0x1100B,  // x^16 + x^12 + x^3 + x + 1
  };
  if (degree < 2 || degree >= static_cast<int>(table.size())) return std::nullopt;
  return table[static_cast<std::size_t>(degree)];
}

BinaryDesign m_sequence(int degree, std::uint32_t taps, std::uint32_t seed) {
  if (degree < 2 || degree > 24) throw_invalid("m-sequence degree must be in [2, 24]");
  const std::uint32_t state_mask = (std::uint32_t{1} << degree) - 1;
  if ((taps >> degree) != 1) {
    throw_invalid("taps must encode a polynomial of exact degree " + std::to_string(degree));
  }
  if ((seed & state_mask) == 0 || (seed & ~state_mask) != 0) {
    throw_invalid("seed must be a nonzero " + std::to_string(degree) + "-bit state");
  }
  const std::uint32_t feedback = taps & state_mask;
  const std::uint64_t period = (std::uint64_t{1} << degree) - 1;

  // state bit i holds s_{n+i}
  std::vector<std::uint8_t> bits;
  bits.reserve(period);
  std::uint32_t state = seed;
  for (std::uint64_t step = 0; step < period; ++step) {
    bits.push_back(static_cast<std::uint8_t>(state & 1u));
    const auto next = static_cast<std::uint32_t>(__builtin_parity(state & feedback));
    state = (state >> 1) | (next << (degree - 1));
    if (state == seed && step + 1 < period) {
      throw ConstructionUnavailable("polynomial is not primitive: LFSR period " +
                                    std::to_string(step + 1) + " < " + std::to_string(period));
    }
  }
  if (state != seed) {
    throw ConstructionUnavailable("polynomial is not primitive: LFSR does not return to its seed "
                                  "after 2^r - 1 steps");
  }
  return BinaryDesign(std::move(bits), Provenance::m_sequence);
}

std::vector<ZeroRun> zero_runs(const BinaryDesign& d) {
  const int n = d.length();
  std::vector<ZeroRun> runs;
  const auto bits = d.bits();
  const auto one = std::find(bits.begin(), bits.end(), std::uint8_t{1});
  if (one == bits.end()) return {ZeroRun{1, n}};

  // Walk once around the circle starting at a 1 so no run is split.
  const int origin = static_cast<int>(one - bits.begin());
  int i = 0;
  while (i < n) {
    const int pos = (origin + i) % n;
    if (bits[static_cast<std::size_t>(pos)] == 0) {
      int len = 0;
      while (i < n && bits[static_cast<std::size_t>((origin + i) % n)] == 0) {
        ++len;
        ++i;
      }
      runs.push_back(ZeroRun{pos + 1, len});
    } else {
      ++i;
    }
  }
  std::sort(runs.begin(), runs.end(), [](const ZeroRun& a, const ZeroRun& b) {
    if (a.length != b.length) return a.length > b.length;
    return a.start < b.start;
  });
  return runs;
}

BinaryDesign insert_zeros(const BinaryDesign& d, int count) {
  if (count != 1 && count != 2) throw_invalid("zero insertion count must be 1 or 2");
  const auto runs = zero_runs(d);
  if (runs.empty()) throw_invalid("design has no zero run to extend");
  const ZeroRun& longest = runs.front();

  std::vector<std::uint8_t> bits(d.bits().begin(), d.bits().end());
  const auto at = bits.begin() + longest.start;  // just after the run's first zero
  bits.insert(at, static_cast<std::size_t>(count), std::uint8_t{0});

  InsertionInfo info{longest.length, count, d.length()};
  if (d.insertion()) {
    // Extending an already-extended sequence: keep the original Hadamard run.
    info = *d.insertion();
    info.zeros_inserted += count;
  }
  return BinaryDesign(std::move(bits), Provenance::insertion, info);
}

}  // namespace fmridesign
