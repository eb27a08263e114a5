#include <immintrin.h>

#include <cstring>

#include "constants.hpp"
#include "powcalc/kernels.hpp"

namespace powcalc::kernels::avx2 {

namespace {

// ---- log / geometric ----

inline __m256d log4(__m256d u) {
  const __m256i bits = _mm256_castpd_si256(u);
  // biased exponent as double via the 2^52 magic constant
  const __m256i eb_i = _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7ff));
  const __m256d magic = _mm256_castsi256_pd(_mm256_set1_epi64x(0x4330000000000000LL));
  const __m256d eb = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(eb_i, _mm256_castpd_si256(magic))), magic);
  const __m256i mbits = _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
                                        _mm256_set1_epi64x(0x3ff0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mbits);
  __m256d e = _mm256_sub_pd(eb, _mm256_set1_pd(1023.0));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(detail::kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, _mm256_set1_pd(1.0)), big);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d f2 = _mm256_mul_pd(f, f);
  __m256d p = _mm256_set1_pd(detail::kLogCoeff[detail::kLogTerms - 1]);
  for (int k = detail::kLogTerms - 2; k >= 0; --k)
    p = _mm256_add_pd(_mm256_mul_pd(p, f2), _mm256_set1_pd(detail::kLogCoeff[k]));
  const __m256d lm = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), f), p);
  const __m256d hi = _mm256_mul_pd(e, _mm256_set1_pd(detail::kLn2Hi));
  const __m256d lo = _mm256_mul_pd(e, _mm256_set1_pd(detail::kLn2Lo));
  return _mm256_add_pd(hi, _mm256_add_pd(lm, lo));
}

// ---- SHA-256 ----

template <int N>
inline __m256i rotr(__m256i x) {
  return _mm256_or_si256(_mm256_srli_epi32(x, N), _mm256_slli_epi32(x, 32 - N));
}

inline __m256i add(__m256i a, __m256i b) { return _mm256_add_epi32(a, b); }
inline __m256i xor3(__m256i a, __m256i b, __m256i c) { return _mm256_xor_si256(_mm256_xor_si256(a, b), c); }

void compress8(__m256i st[8], const __m256i block[16]) {
  __m256i w[64];
  for (int t = 0; t < 16; ++t) w[t] = block[t];
  for (int t = 16; t < 64; ++t) {
    const __m256i s0 = xor3(rotr<7>(w[t - 15]), rotr<18>(w[t - 15]), _mm256_srli_epi32(w[t - 15], 3));
    const __m256i s1 = xor3(rotr<17>(w[t - 2]), rotr<19>(w[t - 2]), _mm256_srli_epi32(w[t - 2], 10));
    w[t] = add(add(w[t - 16], s0), add(w[t - 7], s1));
  }
  __m256i a = st[0], b = st[1], c = st[2], d = st[3], e = st[4], f = st[5], g = st[6], h = st[7];
  for (int t = 0; t < 64; ++t) {
    const __m256i S1 = xor3(rotr<6>(e), rotr<11>(e), rotr<25>(e));
    const __m256i ch = _mm256_xor_si256(_mm256_and_si256(e, f), _mm256_andnot_si256(e, g));
    const __m256i t1 = add(add(add(h, S1), add(ch, _mm256_set1_epi32(static_cast<int>(detail::kSha256K[t])))), w[t]);
    const __m256i S0 = xor3(rotr<2>(a), rotr<13>(a), rotr<22>(a));
    const __m256i maj = xor3(_mm256_and_si256(a, b), _mm256_and_si256(a, c), _mm256_and_si256(b, c));
    const __m256i t2 = add(S0, maj);
    h = g;
    g = f;
    f = e;
    e = add(d, t1);
    d = c;
    c = b;
    b = a;
    a = add(t1, t2);
  }
  st[0] = add(st[0], a);
  st[1] = add(st[1], b);
  st[2] = add(st[2], c);
  st[3] = add(st[3], d);
  st[4] = add(st[4], e);
  st[5] = add(st[5], f);
  st[6] = add(st[6], g);
  st[7] = add(st[7], h);
}

inline std::uint32_t load_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

inline std::uint32_t rotr32(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

// Single-lane compression, used only to absorb the constant prefix blocks.
void compress1(std::uint32_t st[8], const std::uint8_t* blk) {
  std::uint32_t w[64];
  for (int t = 0; t < 16; ++t) w[t] = load_be32(blk + 4 * t);
  for (int t = 16; t < 64; ++t) {
    const std::uint32_t s0 = rotr32(w[t - 15], 7) ^ rotr32(w[t - 15], 18) ^ (w[t - 15] >> 3);
    const std::uint32_t s1 = rotr32(w[t - 2], 17) ^ rotr32(w[t - 2], 19) ^ (w[t - 2] >> 10);
    w[t] = w[t - 16] + s0 + w[t - 7] + s1;
  }
  std::uint32_t a = st[0], b = st[1], c = st[2], d = st[3], e = st[4], f = st[5], g = st[6], h = st[7];
  for (int t = 0; t < 64; ++t) {
    const std::uint32_t t1 = h + (rotr32(e, 6) ^ rotr32(e, 11) ^ rotr32(e, 25)) + ((e & f) ^ (~e & g)) +
                             detail::kSha256K[t] + w[t];
    const std::uint32_t t2 = (rotr32(a, 2) ^ rotr32(a, 13) ^ rotr32(a, 22)) + ((a & b) ^ (a & c) ^ (b & c));
    h = g;
    g = f;
    f = e;
    e = d + t1;
    d = c;
    c = b;
    b = a;
    a = t1 + t2;
  }
  st[0] += a;
  st[1] += b;
  st[2] += c;
  st[3] += d;
  st[4] += e;
  st[5] += f;
  st[6] += g;
  st[7] += h;
}

// Precomputed state for hashing prefix || nonce over 8 lanes.
class Batch {
 public:
  explicit Batch(const ScanJob& job) : nonce_bytes_(job.nonce_bytes) {
    for (int i = 0; i < 8; ++i) mid_[i] = detail::kSha256Iv[i];
    const std::size_t full = job.prefix.size() / 64;
    for (std::size_t b = 0; b < full; ++b) compress1(mid_, job.prefix.data() + 64 * b);
    tail_len_ = job.prefix.size() - 64 * full;
    const std::size_t total = job.prefix.size() + nonce_bytes_;
    blocks_ = (tail_len_ + nonce_bytes_ + 9 + 63) / 64;
    std::memset(tmpl_, 0, sizeof tmpl_);
    std::memcpy(tmpl_, job.prefix.data() + 64 * full, tail_len_);
    tmpl_[tail_len_ + nonce_bytes_] = 0x80;
    const std::uint64_t bitlen = static_cast<std::uint64_t>(total) * 8;
    for (int i = 0; i < 8; ++i) tmpl_[blocks_ * 64 - 1 - i] = static_cast<std::uint8_t>(bitlen >> (8 * i));
    first_word_ = tail_len_ / 4;
    last_word_ = (tail_len_ + nonce_bytes_ - 1) / 4;
    for (std::size_t w = 0; w < blocks_ * 16; ++w)
      fixed_[w] = _mm256_set1_epi32(static_cast<int>(load_be32(tmpl_ + 4 * w)));
  }

  // Final-state words (8 x 8 lanes) of SHA256d for nonces start..start+7.
  void run(u128 start, __m256i out[8]) const {
    std::uint8_t lanes[8][128];
    __m256i words[32];
    for (std::size_t w = 0; w < blocks_ * 16; ++w) words[w] = fixed_[w];
    for (int i = 0; i < 8; ++i) {
      std::memcpy(lanes[i], tmpl_, blocks_ * 64);
      encode_nonce(start + static_cast<u128>(i), nonce_bytes_, lanes[i] + tail_len_);
    }
    for (std::size_t w = first_word_; w <= last_word_; ++w) {
      alignas(32) std::uint32_t v[8];
      for (int i = 0; i < 8; ++i) v[i] = load_be32(lanes[i] + 4 * w);
      words[w] = _mm256_load_si256(reinterpret_cast<const __m256i*>(v));
    }
    __m256i st[8];
    for (int i = 0; i < 8; ++i) st[i] = _mm256_set1_epi32(static_cast<int>(mid_[i]));
    for (std::size_t b = 0; b < blocks_; ++b) compress8(st, words + 16 * b);

    __m256i blk[16];
    for (int i = 0; i < 8; ++i) blk[i] = st[i];
    blk[8] = _mm256_set1_epi32(static_cast<int>(0x80000000u));
    for (int i = 9; i < 15; ++i) blk[i] = _mm256_setzero_si256();
    blk[15] = _mm256_set1_epi32(256);
    for (int i = 0; i < 8; ++i) out[i] = _mm256_set1_epi32(static_cast<int>(detail::kSha256Iv[i]));
    compress8(out, blk);
  }

 private:
  unsigned nonce_bytes_;
  std::uint32_t mid_[8];
  std::size_t tail_len_ = 0, blocks_ = 1, first_word_ = 0, last_word_ = 0;
  std::uint8_t tmpl_[128];
  __m256i fixed_[32];
};

void lane_digest(const __m256i st[8], int lane, Digest& out) {
  for (int w = 0; w < 8; ++w) {
    alignas(32) std::uint32_t v[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(v), st[w]);
    out[4 * w] = static_cast<std::uint8_t>(v[lane] >> 24);
    out[4 * w + 1] = static_cast<std::uint8_t>(v[lane] >> 16);
    out[4 * w + 2] = static_cast<std::uint8_t>(v[lane] >> 8);
    out[4 * w + 3] = static_cast<std::uint8_t>(v[lane]);
  }
}

}  // namespace

double sampler_log(double u) {
  alignas(32) double v[4] = {u, u, u, u};
  _mm256_store_pd(v, log4(_mm256_load_pd(v)));
  return v[0];
}

void geometric_rounds(const double* u, std::size_t n, double log_q, double limit, double* out) {
  const __m256d lq = _mm256_set1_pd(log_q);
  const __m256d lim = _mm256_set1_pd(limit);
  const __m256d neg1 = _mm256_set1_pd(-1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d k = _mm256_floor_pd(_mm256_div_pd(log4(_mm256_loadu_pd(u + i)), lq));
    const __m256d ok = _mm256_cmp_pd(k, lim, _CMP_LT_OQ);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(neg1, k, ok));
  }
  if (i < n) {
    alignas(32) double tu[4] = {1.0, 1.0, 1.0, 1.0}, tk[4];
    for (std::size_t j = i; j < n; ++j) tu[j - i] = u[j];
    const __m256d k = _mm256_floor_pd(_mm256_div_pd(log4(_mm256_load_pd(tu)), lq));
    _mm256_store_pd(tk, _mm256_blendv_pd(neg1, k, _mm256_cmp_pd(k, lim, _CMP_LT_OQ)));
    for (std::size_t j = i; j < n; ++j) out[j] = tk[j - i];
  }
}

void sha256d_batch8(const ScanJob& job, u128 start, Digest out[8]) {
  const Batch batch(job);
  __m256i st[8];
  batch.run(start, st);
  for (int lane = 0; lane < 8; ++lane) lane_digest(st, lane, out[lane]);
}

std::int64_t scan(const ScanJob& job, u128 start, u128 count, int d) {
  const Batch batch(job);
  // Lanes whose first digest word already has min(d, 32) leading zeros are
  // candidates; they are confirmed on the full digest.
  const std::uint32_t top = d >= 32 ? 0xffffffffu : ~(0xffffffffu >> d);
  const __m256i topmask = _mm256_set1_epi32(static_cast<int>(top));
  __m256i st[8];
  for (u128 base = 0; base < count; base += 8) {
    batch.run(start + base, st);
    const __m256i z = _mm256_cmpeq_epi32(_mm256_and_si256(st[0], topmask), _mm256_setzero_si256());
    unsigned mask = static_cast<unsigned>(_mm256_movemask_ps(_mm256_castsi256_ps(z)));
    while (mask) {
      const int lane = __builtin_ctz(mask);
      mask &= mask - 1;
      if (base + static_cast<u128>(lane) >= count) break;
      Digest dg;
      lane_digest(st, lane, dg);
      if (leading_zero_bits(dg.data()) >= d) return static_cast<std::int64_t>(base + lane);
    }
  }
  return -1;
}

}  // namespace powcalc::kernels::avx2
