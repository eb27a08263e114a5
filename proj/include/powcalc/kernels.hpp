#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace powcalc::kernels {

using u128 = unsigned __int128;

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);
bool avx2_available();  // compiled in and supported by this CPU
Isa active_isa();
// Pins dispatch to one implementation (tests, benchmarking); returns the
// previous choice. Requesting Avx2 on a machine without it keeps Scalar.
Isa set_isa(Isa isa);

// ---- geometric sampling ------------------------------------------------

// Natural log used by the sampler. Both implementations evaluate the same
// operation sequence, so their results are bit-identical.
double sampler_log(double u);

// out[i] = floor(log(u[i]) / log_q) if that is < limit, else -1.
// u[i] must lie in (0, 1]; log_q = ln(1 - 2^-d) < 0.
void geometric_rounds(const double* u, std::size_t n, double log_q, double limit, double* out);

namespace scalar {
double sampler_log(double u);
void geometric_rounds(const double* u, std::size_t n, double log_q, double limit, double* out);
}  // namespace scalar

// ---- double SHA-256 nonce scan ------------------------------------------

using Digest = std::array<std::uint8_t, 32>;

void sha256(const std::uint8_t* msg, std::size_t len, std::uint8_t out[32]);
Digest sha256d(const std::uint8_t* msg, std::size_t len);
int leading_zero_bits(const std::uint8_t* digest, std::size_t len = 32);

// Message = prefix || nonce, the nonce written big-endian in nonce_bytes.
struct ScanJob {
  std::vector<std::uint8_t> prefix;
  unsigned nonce_bytes = 16;  // 1..16
};

void encode_nonce(u128 nonce, unsigned nonce_bytes, std::uint8_t* out);

// Offset (from `start`) of the first nonce in [start, start + count) whose
// double SHA-256 has at least d leading zero bits, or -1.
std::int64_t scan(const ScanJob& job, u128 start, u128 count, int d);

// Digests of 8 consecutive nonces starting at `start`.
void sha256d_batch8(const ScanJob& job, u128 start, Digest out[8]);

namespace scalar {
std::int64_t scan(const ScanJob& job, u128 start, u128 count, int d);
void sha256d_batch8(const ScanJob& job, u128 start, Digest out[8]);
}  // namespace scalar

#if defined(POWCALC_BUILD_AVX2)
namespace avx2 {
double sampler_log(double u);
void geometric_rounds(const double* u, std::size_t n, double log_q, double limit, double* out);
std::int64_t scan(const ScanJob& job, u128 start, u128 count, int d);
void sha256d_batch8(const ScanJob& job, u128 start, Digest out[8]);
}  // namespace avx2
#endif

}  // namespace powcalc::kernels
