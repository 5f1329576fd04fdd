#pragma once

// Circular correlation kernels.
//
// All model matrices in this library are circulant: column k of X is the
// input sequence shifted down by k. Every product X^T v therefore reduces to
// a circular correlation
//
//     out[l] = sum_n a[n] * b[(n + l) mod N],   l = 0 .. out.size()-1
//
// and X^T X is the Toeplitz matrix of the periodic autocorrelation of a.
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// implementation. The public entry points dispatch at runtime on the CPU's
// capabilities; FMRIDESIGN_ISA=scalar in the environment forces the scalar
// path. Both paths are equivalence-tested.

#include <cstdint>
#include <span>
#include <string_view>

namespace fmridesign::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

// The ISA chosen by the dispatcher for this process.
Isa active_isa() noexcept;

// True when the AVX2 variant is compiled in and the CPU supports it.
bool avx2_available() noexcept;

// Overrides dispatch for the rest of the process (tests and benchmarking).
// Requesting avx2 on a machine without it falls back to scalar.
void force_isa(Isa isa) noexcept;

// Integer correlation; exact for any N below 2^31 / 16384.
void circular_correlation(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                          std::span<std::int64_t> out);

void circular_correlation(std::span<const double> a, std::span<const double> b,
                          std::span<double> out);

namespace scalar {
void circular_correlation(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                          std::span<std::int64_t> out);
void circular_correlation(std::span<const double> a, std::span<const double> b,
                          std::span<double> out);
}  // namespace scalar

#if defined(FMRIDESIGN_HAVE_AVX2)
namespace avx2 {
void circular_correlation(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                          std::span<std::int64_t> out);
void circular_correlation(std::span<const double> a, std::span<const double> b,
                          std::span<double> out);
}  // namespace avx2
#endif

}  // namespace fmridesign::kernels
