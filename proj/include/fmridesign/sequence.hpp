#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fmridesign {

enum class Provenance { paley, m_sequence, insertion, user };

std::string_view provenance_name(Provenance p) noexcept;

// Metadata carried by designs produced by zero insertion. The insertion
// design is valid for estimating an HRF of length K whenever K <= run_length + 1.
struct InsertionInfo {
  int run_length = 0;      // g: length of the zero run before insertion
  int zeros_inserted = 0;  // 1 or 2
  int parent_length = 0;   // N of the Hadamard sequence that was extended
};

/// A stimulus on/off sequence d in {0,1}^N, read circularly.
class BinaryDesign {
 public:
  BinaryDesign() = default;
  explicit BinaryDesign(std::vector<std::uint8_t> bits, Provenance provenance = Provenance::user,
                        std::optional<InsertionInfo> insertion = std::nullopt);

  // Parses "1001011"; whitespace is ignored.
  static BinaryDesign parse(std::string_view symbols, Provenance provenance = Provenance::user);

  int length() const noexcept { return static_cast<int>(bits_.size()); }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::uint8_t operator[](int i) const { return bits_[static_cast<std::size_t>(i)]; }
  Provenance provenance() const noexcept { return provenance_; }
  const std::optional<InsertionInfo>& insertion() const noexcept { return insertion_; }

  int count_ones() const noexcept;
  int count_zeros() const noexcept { return length() - count_ones(); }
  std::string to_string() const;

  // Rotates left by `shift` positions: result[i] = bits[(i + shift) mod N].
  BinaryDesign rotated(int shift) const;
  // The lexicographically smallest rotation.
  BinaryDesign canonical_rotation() const;

  friend bool operator==(const BinaryDesign& a, const BinaryDesign& b) noexcept {
    return a.bits_ == b.bits_;
  }

 private:
  std::vector<std::uint8_t> bits_;
  Provenance provenance_ = Provenance::user;
  std::optional<InsertionInfo> insertion_;
};

// True if b equals some circular rotation of a.
bool equal_up_to_rotation(const BinaryDesign& a, const BinaryDesign& b);

struct ZeroRun {
  int start = 1;   // 1-based index of the run's first zero, read circularly
  int length = 0;  // g

  friend bool operator==(const ZeroRun&, const ZeroRun&) = default;
};

bool is_prime(std::int64_t n) noexcept;

// Hadamard sequence from the Paley difference set: d_n = 0 iff (n-1) is a
// nonzero quadratic residue mod N. Requires N prime with N = 3 (mod 4).
BinaryDesign paley_hadamard_sequence(int n);

// Primitive polynomial of degree r as a bit mask (bit i = coefficient of x^i,
// bit r set). Known for 2 <= r <= 16.
std::optional<std::uint32_t> default_primitive_polynomial(int degree) noexcept;

// Output of the Fibonacci LFSR s_{n+r} = sum_{i<r} c_i s_{n+i} over GF(2),
// where `taps` holds the polynomial x^r + sum c_i x^i as a bit mask
// (bit r must be set). Bit i of `seed` is s_i; the output starts at s_0.
// The polynomial is accepted only if the state sequence reaches the full
// period 2^r - 1.
BinaryDesign m_sequence(int degree, std::uint32_t taps, std::uint32_t seed);

// All maximal circular runs of zeros, sorted by descending length then
// ascending start. An all-zero design yields one run of length N at start 1.
std::vector<ZeroRun> zero_runs(const BinaryDesign& d);

// Inserts `count` (1 or 2) zeros immediately after the first zero of the
// longest circular zero run (leftmost on ties).
BinaryDesign insert_zeros(const BinaryDesign& d, int count);

}  // namespace fmridesign
