#include <set>

#include "doctest.h"
#include "fmridesign/blocks.hpp"
#include "fmridesign/certify.hpp"
#include "fmridesign/error.hpp"
#include "oracles.hpp"

using namespace fmridesign;

TEST_CASE("partition enumeration is complete and canonical") {
  for (int k = 1; k <= 12; ++k) {
    const auto parts = enumerate_partitions(k);
    CHECK(static_cast<long>(parts.size()) == oracle::partitions(k));
    CHECK(parts.front().sizes() == std::vector<int>{k});
    CHECK(parts.back().all_ones());
    std::set<std::vector<int>> seen;
    for (const auto& p : parts) {
      CHECK(p.dim() == k);
      CHECK(std::is_sorted(p.sizes().rbegin(), p.sizes().rend()));
      seen.insert(p.sizes());
    }
    CHECK(seen.size() == parts.size());
  }
  CHECK(oracle::partitions(10) == 42);
  CHECK_THROWS(enumerate_partitions(0));
}

TEST_CASE("partition basics") {
  const BlockPartition p({1, 3, 2});
  CHECK(p.sizes() == std::vector<int>{3, 2, 1});
  CHECK(p.to_string() == "(3,2,1)");
  CHECK_FALSE(p.contiguous_sizes());
  CHECK(BlockPartition({2, 3, 3}).contiguous_sizes());
  CHECK_THROWS(BlockPartition({}));
  CHECK_THROWS(BlockPartition({2, 0}));
}

TEST_CASE("block matrix entries") {
  const BlockMatrix b = block_matrix(11, BlockPartition({2, 1}));
  const IntMatrix expect = (IntMatrix(3, 3) << 11, 3, -1, 3, 11, -1, -1, -1, 11).finished();
  CHECK(b.matrix == expect);
  CHECK(b.in_xi);
  CHECK_FALSE(b.in_stated_domain);
  CHECK_THROWS(block_matrix(9, BlockPartition({1})));
  CHECK_THROWS(block_matrix(3, BlockPartition({1})));
  // sum r_i / L_i = 7/8 exactly: singular, not positive definite
  CHECK_FALSE(block_matrix(7, BlockPartition({3, 3, 2, 2, 2})).in_xi);
  CHECK_THROWS(block_trace_inverse(7, BlockPartition({3, 3, 2, 2, 2}), TraceFormula::first));
}

TEST_CASE("all-ones partition reproduces the Hadamard trace") {
  const BlockPartition ones({1, 1, 1});
  for (auto f : {TraceFormula::first, TraceFormula::second}) {
    CHECK(std::abs(block_trace_inverse(7, ones, f) - 0.46875) < 1e-15);
  }
  CHECK(std::abs(block_trace_inverse_dense(7, ones) - 0.46875) < 1e-13);
}

TEST_CASE("closed forms agree with dense inversion") {
  for (int n = 7; n <= 59; n += 4) {
    for (int k = 1; k <= 12; ++k) {
      for (const auto& p : enumerate_partitions(k)) {
        const BlockMatrix b = block_matrix(n, p);
        if (!b.in_xi) {
          CHECK_THROWS(block_trace_inverse(n, p, TraceFormula::first));
          continue;
        }
        const double dense = block_trace_inverse_dense(n, p);
        CHECK(std::abs(block_trace_inverse(n, p, TraceFormula::first) - dense) < 1e-9 * dense);
        CHECK(std::abs(block_trace_inverse(n, p, TraceFormula::second) - dense) < 1e-9 * dense);
      }
    }
  }
}

TEST_CASE("dense trace matches an independent inverse of B - J/N") {
  const BlockPartition p({3, 2, 2, 1});
  const IntMatrix b = block_matrix(23, p).matrix;
  Eigen::MatrixXd m = b.cast<double>();
  m.array() -= 1.0 / 23.0;
  CHECK(std::abs(m.fullPivLu().inverse().trace() - block_trace_inverse(23, p, TraceFormula::first)) < 1e-12);
}

TEST_CASE("minimum over partitions") {
  const BlockMinimum m = min_block_trace(23, 9);
  CHECK(m.best.all_ones());
  CHECK(m.winner_all_ones);
  CHECK(m.bound_applies);
  CHECK(m.ranking.size() + static_cast<std::size_t>(m.skipped_not_positive_definite) ==
        static_cast<std::size_t>(oracle::partitions(9)));
  for (std::size_t i = 1; i < m.ranking.size(); ++i) CHECK(m.ranking[i - 1].value <= m.ranking[i].value);

  const BlockMinimum small = min_block_trace(7, 3);
  CHECK_FALSE(small.in_stated_domain);
  CHECK_FALSE(small.bound_applies);
}

TEST_CASE("split gain equals the dense trace difference") {
  for (int n : {11, 23, 43, 59}) {
    for (int r = 1; r <= 3; ++r) {
      for (int u = 0; u <= 2; ++u) {
        std::vector<int> split_from(static_cast<std::size_t>(u), r);
        split_from.push_back(r + 1);
        std::vector<int> split_to(static_cast<std::size_t>(u + 1), r);
        split_to.push_back(1);
        const int k = u * r + r + 1;
        const double dense = block_trace_inverse_dense(n, BlockPartition(split_from)) -
                             block_trace_inverse_dense(n, BlockPartition(split_to));
        CAPTURE(n);
        CAPTURE(k);
        CAPTURE(r);
        CHECK(std::abs(detail::split_gain_bound(n, k, r) - dense) <= 1e-9 * std::abs(dense));
      }
    }
  }
}

TEST_CASE("split gain is nonnegative above N0") {
  for (int k = 4; k <= 12; ++k) {
    const int n_start = static_cast<int>(std::ceil(n0_cubic(k)));
    for (int n = n_start + (3 - n_start % 4 + 4) % 4; n <= 99; n += 4) {
      for (int r = 1; r < k; ++r) {
        CAPTURE(n);
        CAPTURE(k);
        CAPTURE(r);
        const double gain = detail::split_gain_bound(n, k, r);
        CHECK(gain >= 0.0);
        if (r > 1) CHECK(gain > 0.0);
      }
    }
  }
}

TEST_CASE("random symmetric matrices never beat the all-ones block matrix above N0") {
  const XiSampleReport r = sample_xi_minimality(23, 9, 2000, 7);
  CHECK(r.samples_drawn == 2000);
  CHECK(r.samples_in_xi > 0);
  CHECK(r.violations == 0);
  CHECK(r.best_seen >= r.reference * (1 - 1e-12));
}
