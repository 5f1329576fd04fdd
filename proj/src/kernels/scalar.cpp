#include <cstddef>

#include "fmridesign/kernels.hpp"

namespace fmridesign::kernels::scalar {

void circular_correlation(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                          std::span<std::int64_t> out) {
  const std::size_t n = a.size();
  for (std::size_t lag = 0; lag < out.size(); ++lag) {
    std::int64_t acc = 0;
    const std::size_t shift = n == 0 ? 0 : lag % n;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = i + shift;
      if (j >= n) j -= n;
      acc += static_cast<std::int64_t>(a[i]) * b[j];
    }
    out[lag] = acc;
  }
}

void circular_correlation(std::span<const double> a, std::span<const double> b,
                          std::span<double> out) {
  const std::size_t n = a.size();
  for (std::size_t lag = 0; lag < out.size(); ++lag) {
    double acc = 0.0;
    const std::size_t shift = n == 0 ? 0 : lag % n;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = i + shift;
      if (j >= n) j -= n;
      acc += a[i] * b[j];
    }
    out[lag] = acc;
  }
}

}  // namespace fmridesign::kernels::scalar
