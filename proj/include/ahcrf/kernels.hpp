#pragma once

#include <cstddef>
#include <span>

// Dense double-precision kernels used by retrieval, codebook construction,
// unary scoring and gradient accumulation. Each kernel has a scalar
// reference and an AVX2/FMA variant; the variant is picked once at startup
// from cpuid and can be overridden with AHCRF_ISA=scalar|avx2.

namespace ahcrf::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[r] = <m[r, :], x> for a row-major rows x cols matrix
  void (*gemv)(const double* m, std::size_t rows, std::size_t cols, const double* x, double* out);
};

/// Kernels for `isa`. Throws InvalidInput if the ISA is unavailable on
/// this CPU or was not compiled in.
const KernelTable& table(Isa isa);

bool supported(Isa isa) noexcept;

/// Best ISA available on this machine.
Isa detect() noexcept;

Isa active() noexcept;

/// Switch the process-wide kernel set. Not meant to be called while other
/// threads are running inference.
void set_active(Isa isa);

const char* name(Isa isa) noexcept;

const KernelTable& current() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return current().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return current().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  current().axpy(alpha, x.data(), y.data(), x.size());
}

inline void gemv(std::span<const double> m, std::size_t rows, std::span<const double> x,
                 std::span<double> out) {
  current().gemv(m.data(), rows, x.size(), x.data(), out.data());
}

/// log(sum(exp(v))) with the max shifted out; -inf for empty input or when
/// every entry is -inf.
double log_sum_exp(std::span<const double> values) noexcept;

}  // namespace ahcrf::kernels
