#pragma once

// Dense inner-loop kernels used by the reduced-order paths (normal-equation
// accumulation, state reconstruction, norms). Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2/FMA variant. The active
// variant is picked once at startup from CPUID and can be overridden with
// SDROM_ISA=scalar|avx2 or force_isa().

#include <cstddef>
#include <span>
#include <string_view>

namespace sdrom::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// True when the CPU (and the build) can run the given variant.
bool isa_available(Isa isa);

Isa active_isa();

/// Switch the dispatch target. Throws ConfigError if unavailable.
void force_isa(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// sum_i (a_i - b_i)^2
double squared_distance(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define SDROM_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

}  // namespace sdrom::kernels
