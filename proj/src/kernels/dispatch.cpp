#include <atomic>
#include <cstdlib>
#include <cstring>

#include "powcalc/kernels.hpp"

namespace powcalc::kernels {

namespace {

Isa detect() {
#if defined(POWCALC_BUILD_AVX2)
  if (const char* env = std::getenv("POWCALC_ISA"); env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(POWCALC_BUILD_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(); }

Isa set_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available()) isa = Isa::Scalar;
  return current().exchange(isa);
}

double sampler_log(double u) {
#if defined(POWCALC_BUILD_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::sampler_log(u);
#endif
  return scalar::sampler_log(u);
}

void geometric_rounds(const double* u, std::size_t n, double log_q, double limit, double* out) {
#if defined(POWCALC_BUILD_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::geometric_rounds(u, n, log_q, limit, out);
#endif
  scalar::geometric_rounds(u, n, log_q, limit, out);
}

std::int64_t scan(const ScanJob& job, u128 start, u128 count, int d) {
#if defined(POWCALC_BUILD_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::scan(job, start, count, d);
#endif
  return scalar::scan(job, start, count, d);
}

void sha256d_batch8(const ScanJob& job, u128 start, Digest out[8]) {
#if defined(POWCALC_BUILD_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::sha256d_batch8(job, start, out);
#endif
  scalar::sha256d_batch8(job, start, out);
}

}  // namespace powcalc::kernels
