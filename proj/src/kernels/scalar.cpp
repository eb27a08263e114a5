#include <cmath>
#include <cstring>

#include <openssl/sha.h>

#include "powcalc/kernels.hpp"
#include "constants.hpp"

namespace powcalc::kernels {

void sha256(const std::uint8_t* msg, std::size_t len, std::uint8_t out[32]) { SHA256(msg, len, out); }

Digest sha256d(const std::uint8_t* msg, std::size_t len) {
  std::uint8_t first[32];
  SHA256(msg, len, first);
  Digest out;
  SHA256(first, sizeof first, out.data());
  return out;
}

int leading_zero_bits(const std::uint8_t* digest, std::size_t len) {
  int n = 0;
  for (std::size_t i = 0; i < len; ++i) {
    if (digest[i] == 0) {
      n += 8;
      continue;
    }
    return n + __builtin_clz(static_cast<unsigned>(digest[i])) - 24;
  }
  return n;
}

void encode_nonce(u128 nonce, unsigned nonce_bytes, std::uint8_t* out) {
  for (unsigned i = 0; i < nonce_bytes; ++i) {
    out[nonce_bytes - 1 - i] = static_cast<std::uint8_t>(nonce & 0xff);
    nonce >>= 8;
  }
}

namespace scalar {

double sampler_log(double u) {
  std::uint64_t bits;
  std::memcpy(&bits, &u, sizeof bits);
  const double eb = static_cast<double>((bits >> 52) & 0x7ff);
  const std::uint64_t mbits = (bits & 0x000fffffffffffffULL) | 0x3ff0000000000000ULL;
  double m;
  std::memcpy(&m, &mbits, sizeof m);
  double e = eb - 1023.0;
  if (m > detail::kSqrt2) {
    m = m * 0.5;
    e = e + 1.0;
  }
  const double f = (m - 1.0) / (m + 1.0);
  const double f2 = f * f;
  double p = detail::kLogCoeff[detail::kLogTerms - 1];
  for (int k = detail::kLogTerms - 2; k >= 0; --k) p = p * f2 + detail::kLogCoeff[k];
  const double lm = (2.0 * f) * p;
  return e * detail::kLn2Hi + (lm + e * detail::kLn2Lo);
}

void geometric_rounds(const double* u, std::size_t n, double log_q, double limit, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double k = std::floor(sampler_log(u[i]) / log_q);
    out[i] = k < limit ? k : -1.0;
  }
}

std::int64_t scan(const ScanJob& job, u128 start, u128 count, int d) {
  std::vector<std::uint8_t> msg(job.prefix);
  msg.resize(job.prefix.size() + job.nonce_bytes);
  std::uint8_t* nonce_at = msg.data() + job.prefix.size();
  for (u128 i = 0; i < count; ++i) {
    encode_nonce(start + i, job.nonce_bytes, nonce_at);
    const Digest h = sha256d(msg.data(), msg.size());
    if (leading_zero_bits(h.data()) >= d) return static_cast<std::int64_t>(i);
  }
  return -1;
}

void sha256d_batch8(const ScanJob& job, u128 start, Digest out[8]) {
  std::vector<std::uint8_t> msg(job.prefix);
  msg.resize(job.prefix.size() + job.nonce_bytes);
  for (unsigned i = 0; i < 8; ++i) {
    encode_nonce(start + i, job.nonce_bytes, msg.data() + job.prefix.size());
    out[i] = sha256d(msg.data(), msg.size());
  }
}

}  // namespace scalar
}  // namespace powcalc::kernels
