#include <atomic>
#include <cstdlib>
#include <string_view>

#include "fmridesign/error.hpp"
#include "fmridesign/kernels.hpp"

namespace fmridesign::kernels {
namespace {

Isa detect() noexcept {
  if (const char* env = std::getenv("FMRIDESIGN_ISA"); env && std::string_view(env) == "scalar") {
    return Isa::scalar;
  }
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& selected() noexcept {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

template <typename A, typename B>
void check_sizes(std::span<A> a, std::span<A> b, std::span<B> out) {
  if (a.size() != b.size()) throw_invalid("circular_correlation: inputs differ in length");
  if (out.size() > a.size()) throw_invalid("circular_correlation: more lags than the period");
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    case Isa::scalar:
      break;
  }
  return "scalar";
}

bool avx2_available() noexcept {
#if defined(FMRIDESIGN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() noexcept { return selected().load(std::memory_order_relaxed); }

void force_isa(Isa isa) noexcept {
  if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
  selected().store(isa, std::memory_order_relaxed);
}

void circular_correlation(std::span<const std::int8_t> a, std::span<const std::int8_t> b,
                          std::span<std::int64_t> out) {
  check_sizes(a, b, out);
#if defined(FMRIDESIGN_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::circular_correlation(a, b, out);
#endif
  scalar::circular_correlation(a, b, out);
}

void circular_correlation(std::span<const double> a, std::span<const double> b,
                          std::span<double> out) {
  check_sizes(a, b, out);
#if defined(FMRIDESIGN_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::circular_correlation(a, b, out);
#endif
  scalar::circular_correlation(a, b, out);
}

}  // namespace fmridesign::kernels
