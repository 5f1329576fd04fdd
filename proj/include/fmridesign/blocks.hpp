#pragma once

// Block matrices B = (+)_i [(N-3) I_{r_i} + 4 J_{r_i}] - J_K for N = 3 (mod 4),
// their closed-form trace tr{(B - J/N)^{-1}}, and the exhaustive minimum of
// that trace over all block partitions of K.
//
// The closed forms are only claimed for K >= 4; smaller K is accepted for
// exploration and flagged via `in_stated_domain`.

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "fmridesign/design.hpp"

namespace fmridesign {

/// Block sizes r_1 >= r_2 >= ... >= r_m > 0 summing to K.
class BlockPartition {
 public:
  // Sizes are sorted into canonical descending order.
  explicit BlockPartition(std::vector<int> sizes);

  int dim() const noexcept { return dim_; }
  int blocks() const noexcept { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& sizes() const noexcept { return sizes_; }
  bool all_ones() const noexcept { return blocks() == dim_; }
  // At most two distinct sizes, differing by one.
  bool contiguous_sizes() const noexcept;
  std::string to_string() const;

  friend bool operator==(const BlockPartition&, const BlockPartition&) = default;

 private:
  std::vector<int> sizes_;
  int dim_ = 0;
};

struct BlockMatrix {
  int n = 0;
  BlockPartition partition{std::vector<int>{1}};
  IntMatrix matrix;        // B
  bool in_xi = false;      // B - J/N positive definite
  bool in_stated_domain = false;  // K >= 4
};

BlockMatrix block_matrix(int n, const BlockPartition& partition);

enum class TraceFormula { first, second };

// tr{(B - J/N)^{-1}} from the closed form; throws when B - J/N is not
// positive definite.
double block_trace_inverse(int n, const BlockPartition& partition, TraceFormula variant);

// Same quantity by dense inversion; the independent cross-check.
double block_trace_inverse_dense(int n, const BlockPartition& partition);

// Integer partitions of K in descending canonical form, ordered with the
// single block (K) first and the all-ones partition last.
std::vector<BlockPartition> enumerate_partitions(int k);

struct RankedPartition {
  BlockPartition partition;
  double value = 0.0;
};

struct BlockMinimum {
  int n = 0;
  int k = 0;
  BlockPartition best{std::vector<int>{1}};
  double value = 0.0;
  std::vector<RankedPartition> ranking;  // ascending value, ties in enumeration order
  int skipped_not_positive_definite = 0;
  bool in_stated_domain = false;  // K >= 4
  bool bound_applies = false;     // K >= 4 and N >= N0(K)
  bool winner_all_ones = false;
  bool winner_contiguous = false;  // at most two contiguous sizes
};

// Requires N = 3 (mod 4) and N >= 7.
BlockMinimum min_block_trace(int n, int k);

namespace detail {
// Trace gain from splitting the single block of size r + 1 of a matrix with
// blocks of sizes r and r + 1 into blocks of sizes r and 1, i.e.
// tr{B_s,b^{-1}} - tr{B_b^{-1}}. Nonnegative (positive for r > 1) whenever
// N >= N0(K).
double split_gain_bound(int n, int k, int r);
}  // namespace detail

struct XiSampleReport {
  int samples_drawn = 0;
  int samples_in_xi = 0;  // positive definite after removing J/N
  int violations = 0;     // traces strictly below the all-ones block matrix
  double reference = 0.0;  // tr{(B* - J/N)^{-1}}
  double best_seen = 0.0;
};

// Random symmetric matrices with diagonal N and off-diagonals = 3 (mod 4),
// compared against B* = (N+1) I - J.
XiSampleReport sample_xi_minimality(int n, int k, int samples, std::uint64_t seed);

}  // namespace fmridesign
