// Compiled with -mavx2 -mfma; only reached through the runtime dispatcher.

#include <immintrin.h>

#include <cstddef>

#include "fmridesign/kernels.hpp"

namespace fmridesign::kernels::avx2 {
namespace {

inline std::int64_t hsum_epi32(__m256i v) {
  alignas(32) std::int32_t lanes[8];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  std::int64_t s = 0;
  for (std::int32_t x : lanes) s += x;
  return s;
}

inline double hsum_pd(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Each madd lane adds at most 2 * 128 * 128 = 2^15 per step, so 2^15 steps
// stay below 2^31 before the lanes must be flushed to 64 bits.
constexpr std::size_t kFlushEvery = std::size_t{1} << 15;

std::int64_t dot_i8(const std::int8_t* x, const std::int8_t* y, std::size_t len) {
  std::int64_t total = 0;
  std::size_t i = 0;
  while (len - i >= 16) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t steps = 0;
    for (; len - i >= 16 && steps < kFlushEvery; i += 16, ++steps) {
      const __m256i xv = _mm256_cvtepi8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(x + i)));
      const __m256i yv = _mm256_cvtepi8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(y + i)));
      acc = _mm256_add_epi32(acc, _mm256_madd_epi16(xv, yv));
    }
    total += hsum_epi32(acc);
  }
  for (; i < len; ++i) total += static_cast<std::int64_t>(x[i]) * y[i];
  return total;
}

double dot_f64(const double* x, const double* y, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  if (i + 4 <= len) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    i += 4;
  }
  double s = hsum_pd(_mm256_add_pd(acc0, acc1));
  for (; i < len; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

// out[l] splits into two contiguous dot products: a[0, n-s) . b[s, n) and
// a[n-s, n) . b[0, s), with s = l mod n.
void circular_correlation(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                          std::span<std::int64_t> out) {
  const std::size_t n = a.size();
  for (std::size_t lag = 0; lag < out.size(); ++lag) {
    if (n == 0) {
      out[lag] = 0;
      continue;
    }
    const std::size_t s = lag % n;
    out[lag] = dot_i8(a.data(), b.data() + s, n - s) + dot_i8(a.data() + (n - s), b.data(), s);
  }
}

void circular_correlation(std::span<const double> a, std::span<const double> b,
                          std::span<double> out) {
  const std::size_t n = a.size();
  for (std::size_t lag = 0; lag < out.size(); ++lag) {
    if (n == 0) {
      out[lag] = 0.0;
      continue;
    }
    const std::size_t s = lag % n;
    out[lag] = dot_f64(a.data(), b.data() + s, n - s) + dot_f64(a.data() + (n - s), b.data(), s);
  }
}

}  // namespace fmridesign::kernels::avx2
