#include "fmridesign/blocks.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <random>

#include "fmridesign/certify.hpp"
#include "fmridesign/error.hpp"

namespace fmridesign {
namespace {

void check_n(int n) {
  if (n % 4 != 3 || n < 7) throw_invalid("block matrices need N ≡ 3 (mod 4) and N >= 7");
}

__int128 gcd128(__int128 a, __int128 b) {
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// True iff (1 + 1/N)^{-1} > sum r_i / L_i, i.e. B - J/N is positive definite.
// Exact rational comparison.
bool positive_definite(int n, const BlockPartition& p) {
  __int128 num = 0;
  __int128 den = 1;
  for (int r : p.sizes()) {
    const __int128 l = n - 3 + 4 * r;
    num = num * l + r * den;
    den *= l;
    const __int128 g = gcd128(num, den);
    num /= g;
    den /= g;
  }
  return static_cast<__int128>(n) * den > static_cast<__int128>(n + 1) * num;
}

Eigen::MatrixXd centered(const IntMatrix& b, int n) {
  return b.cast<double>() - Eigen::MatrixXd::Constant(b.rows(), b.cols(), 1.0 / n);
}

}  // namespace

BlockPartition::BlockPartition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw_invalid("a partition needs at least one block");
  for (int r : sizes_) {
    if (r < 1) throw_invalid("block sizes must be positive");
  }
  std::sort(sizes_.begin(), sizes_.end(), std::greater<>());
  dim_ = std::accumulate(sizes_.begin(), sizes_.end(), 0);
}

bool BlockPartition::contiguous_sizes() const noexcept {
  return sizes_.front() - sizes_.back() <= 1;
}

std::string BlockPartition::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(sizes_[i]);
  }
  return s + ")";
}

BlockMatrix block_matrix(int n, const BlockPartition& partition) {
  check_n(n);
  const int k = partition.dim();
  BlockMatrix b;
  b.n = n;
  b.partition = partition;
  b.matrix = IntMatrix::Constant(k, k, -1);
  int offset = 0;
  for (int r : partition.sizes()) {
    b.matrix.block(offset, offset, r, r).setConstant(3);
    offset += r;
  }
  b.matrix.diagonal().setConstant(n);
  b.in_xi = positive_definite(n, partition);
  b.in_stated_domain = k >= 4;
  return b;
}

double block_trace_inverse(int n, const BlockPartition& partition, TraceFormula variant) {
  check_n(n);
  if (!positive_definite(n, partition)) {
    throw_invalid("B - J/N is not positive definite for partition " + partition.to_string());
  }
  const double nn = n;
  const double k = partition.dim();
  const double m = partition.blocks();
  const double rho = nn / (nn + 1.0);  // (1 + 1/N)^{-1}

  if (variant == TraceFormula::first) {
    double inv_l = 0.0, r_inv_l = 0.0, r_inv_l2 = 0.0;
    for (int r : partition.sizes()) {
      const double l = nn - 3.0 + 4.0 * r;
      inv_l += 1.0 / l;
      r_inv_l += r / l;
      r_inv_l2 += r / (l * l);
    }
    return inv_l + (k - m) / (nn - 3.0) + r_inv_l2 / (rho - r_inv_l);
  }

  const double t = (nn - 3.0) / 4.0;
  double a = 0.0, b = 0.0;
  for (int r : partition.sizes()) {
    a += r / (t + r);
    b += r / ((t + r) * (t + r));
  }
  return (k - a + t * b / (4.0 * rho - a)) / (4.0 * t);
}

double block_trace_inverse_dense(int n, const BlockPartition& partition) {
  const BlockMatrix b = block_matrix(n, partition);
  const Eigen::MatrixXd bb = centered(b.matrix, n);
  Eigen::LLT<Eigen::MatrixXd> llt(bb);
  if (llt.info() != Eigen::Success) {
    throw_invalid("B - J/N is not positive definite for partition " + partition.to_string());
  }
  return llt.solve(Eigen::MatrixXd::Identity(bb.rows(), bb.cols())).trace();
}

std::vector<BlockPartition> enumerate_partitions(int k) {
  if (k < 1) throw_invalid("K must be >= 1");
  std::vector<BlockPartition> out;
  std::vector<int> parts{k};
  while (true) {
    out.emplace_back(parts);
    // Rightmost part larger than one.
    int idx = static_cast<int>(parts.size()) - 1;
    while (idx >= 0 && parts[static_cast<std::size_t>(idx)] == 1) --idx;
    if (idx < 0) break;
    int remainder = static_cast<int>(parts.size()) - idx;  // trailing ones + 1
    const int value = --parts[static_cast<std::size_t>(idx)];
    parts.resize(static_cast<std::size_t>(idx) + 1);
    while (remainder > 0) {
      const int piece = std::min(value, remainder);
      parts.push_back(piece);
      remainder -= piece;
    }
  }
  return out;
}

BlockMinimum min_block_trace(int n, int k) {
  check_n(n);
  BlockMinimum result;
  result.n = n;
  result.k = k;
  result.in_stated_domain = k >= 4;
  result.bound_applies = k >= 4 && n >= n0_cubic(k);

  for (auto& p : enumerate_partitions(k)) {
    if (!positive_definite(n, p)) {
      ++result.skipped_not_positive_definite;
      continue;
    }
    const double v = block_trace_inverse(n, p, TraceFormula::first);
    result.ranking.push_back({std::move(p), v});
  }
  if (result.ranking.empty()) throw_invalid("no block partition gives a positive definite B - J/N");
  std::stable_sort(result.ranking.begin(), result.ranking.end(),
                   [](const RankedPartition& a, const RankedPartition& b) { return a.value < b.value; });
  result.best = result.ranking.front().partition;
  result.value = result.ranking.front().value;
  result.winner_all_ones = result.best.all_ones();
  result.winner_contiguous = result.best.contiguous_sizes();
  return result;
}

namespace detail {

double split_gain_bound(int n, int k, int r) {
  const double nn = n;
  const double kk = k;
  const double rr = r;
  const double rho = nn / (nn + 1.0);
  const double l = nn - 3.0 + 4.0 * rr;
  const double xi = l * rho - kk;
  const double g1 = 4.0 * (rr + 1.0) + (l + 4.0) * xi;
  return 4.0 * rr / (l * (nn - 3.0)) + ((2.0 * l + 4.0) * rho - kk) / g1 -
         ((2.0 * l + 4.0 - 4.0 * rr) * rho - kk) / ((nn + 1.0) * xi - 4.0 * (rr - 1.0));
}

}  // namespace detail

XiSampleReport sample_xi_minimality(int n, int k, int samples, std::uint64_t seed) {
  check_n(n);
  XiSampleReport rep;
  rep.reference = block_trace_inverse(n, BlockPartition(std::vector<int>(static_cast<std::size_t>(k), 1)),
                                      TraceFormula::first);
  rep.best_seen = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  // Mostly the extremal values -1 and 3, occasionally the next ones out.
  const std::array<int, 6> values{-1, -1, -1, 3, -5, 7};
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  for (int s = 0; s < samples; ++s) {
    IntMatrix e(k, k);
    for (int i = 0; i < k; ++i) {
      e(i, i) = n;
      for (int j = i + 1; j < k; ++j) e(i, j) = e(j, i) = values[pick(rng)];
    }
    ++rep.samples_drawn;
    const Eigen::MatrixXd eb = centered(e, n);
    Eigen::LLT<Eigen::MatrixXd> llt(eb);
    if (llt.info() != Eigen::Success) continue;
    ++rep.samples_in_xi;
    const double v = llt.solve(Eigen::MatrixXd::Identity(k, k)).trace();
    rep.best_seen = std::min(rep.best_seen, v);
    if (v < rep.reference * (1.0 - 1e-12)) ++rep.violations;
  }
  return rep;
}

}  // namespace fmridesign
