#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "sdrom/errors.hpp"
#include "sdrom/kernels.hpp"

namespace sdrom::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(SDROM_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("SDROM_ISA")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && cpu_has_avx2()) return Isa::avx2;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw ConfigError("kernel variant '" + std::string(isa_name(isa)) + "' is not available on this CPU");
  }
  current().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
#ifdef SDROM_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::dot(a.data(), b.data(), a.size());
#endif
  return scalar::dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
#ifdef SDROM_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::axpy(alpha, x.data(), y.data(), x.size());
#endif
  scalar::axpy(alpha, x.data(), y.data(), x.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
#ifdef SDROM_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::squared_distance(a.data(), b.data(), a.size());
#endif
  return scalar::squared_distance(a.data(), b.data(), a.size());
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

}  // namespace sdrom::kernels
