#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string_view>

#include "ahcrf/error.hpp"
#include "kernels/variants.hpp"

namespace ahcrf::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(AHCRF_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("AHCRF_ISA")) {
    const std::string_view requested(env);
    if (requested == "scalar") return Isa::kScalar;
    if (requested == "avx2" && supported(Isa::kAvx2)) return Isa::kAvx2;
  }
  return detect();
}

std::atomic<Isa>& active_slot() noexcept {
  static std::atomic<Isa> slot{initial_isa()};
  return slot;
}

}  // namespace

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2: {
      static const bool has = cpu_has_avx2();
      return has;
    }
  }
  return false;
}

Isa detect() noexcept { return supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar; }

const KernelTable& table(Isa isa) {
  if (!supported(isa)) throw InvalidInput(std::string("kernel ISA not available: ") + name(isa));
#if defined(AHCRF_HAVE_AVX2_TU)
  if (isa == Isa::kAvx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

Isa active() noexcept { return active_slot().load(std::memory_order_relaxed); }

void set_active(Isa isa) {
  table(isa);  // validates
  active_slot().store(isa, std::memory_order_relaxed);
}

const char* name(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& current() noexcept {
#if defined(AHCRF_HAVE_AVX2_TU)
  if (active() == Isa::kAvx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

double log_sum_exp(std::span<const double> values) noexcept {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

}  // namespace ahcrf::kernels
