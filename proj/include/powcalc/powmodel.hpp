#pragma once

#include <cmath>
#include <type_traits>

#include "powcalc/numerics.hpp"

namespace powcalc {

struct HashSpec {
  int n = 256;  // output bits
  int p = 512;  // input bits
  Rational T = Rational(1, 50'000'000'000LL);

  void validate() const;
};

BigInt lambda(int r, int s);

struct MiningDesign {
  int s = 1;
  int r = 1;
  int d = 1;
  BigInt lam = 2;

  // Throws std::invalid_argument unless s >= 1, 0 < r < p, 0 < d < n.
  static MiningDesign make(int s, int r, int d, const HashSpec& h = {});
  bool consistent() const { return lam == lambda(r, s); }
};

// Result of a constraint-guarded probability: `applicable` is false when
// the guard of the closed form fails, which the optimizer reads as infeasible.
template <class R>
struct Guarded {
  bool applicable = false;
  R value{};
};

namespace model {

// s * ln(1 - 2^-d), the log of y.
template <class Ctx>
typename Ctx::R log_y(const Ctx& c, int s, int d) {
  return c.num(static_cast<double>(s)) * ln_one_minus_pow2(c, d);
}

// y^(lambda+1) = (1 - 2^-d)^(s(lambda+1))
template <class Ctx>
typename Ctx::R failure(const Ctx& c, int s, int d, const BigInt& lam) {
  using std::exp;
  return exp(c.num(BigInt(s * (lam + 1))) * ln_one_minus_pow2(c, d));
}

template <class Ctx>
typename Ctx::R expected_rounds(const Ctx& c, int s, int d, const BigInt& lam) {
  using std::expm1;
  const auto ly = log_y(c, s, d);
  const auto om = -expm1(ly);  // 1 - y
  const auto f = failure(c, s, d, lam);
  const auto l1 = c.num(BigInt(lam + 1));
  return (c.num(1.0) - f - l1 * om * f) / om;
}

// P(T * rounds > th) with cth = ceil(th/T - 1); needs cth < lambda.
template <class Ctx>
Guarded<typename Ctx::R> time_gt(const Ctx& c, int s, int d, const BigInt& lam, const BigInt& cth) {
  using std::exp;
  Guarded<typename Ctx::R> g;
  if (!(cth < lam)) return g;
  const auto ly = log_y(c, s, d);
  g.applicable = true;
  g.value = exp(c.num(BigInt(cth + 1)) * ly) - failure(c, s, d, lam);
  return g;
}

// P(T * rounds < th') with fth = floor(th'/T - 1); needs fth > 0.
template <class Ctx>
Guarded<typename Ctx::R> time_lt(const Ctx& c, int s, int d, const BigInt& fth) {
  using std::expm1;
  Guarded<typename Ctx::R> g;
  if (!(fth > 0)) return g;
  g.applicable = true;
  g.value = -expm1(c.num(BigInt(fth + 1)) * log_y(c, s, d));
  return g;
}

// 1 + (s-1) w^s - s w^(s-1) with w = (1 - 2^-d)^(m+1), m = floor(mu/T).
template <class Ctx>
typename Ctx::R dispute(const Ctx& c, int s, int d, const BigInt& m) {
  using std::exp;
  using std::expm1;
  using R = typename Ctx::R;
  if (s <= 1) return c.num(0.0);
  const R lw = c.num(BigInt(m + 1)) * ln_one_minus_pow2(c, d);
  if constexpr (std::is_same_v<R, double>) {
    // In binary64 the closed form cancels when s(1-w) is small; expand it
    // as its binomial series instead.
    const double q = -std::expm1(lw);
    if (s * q < 1e-4) {
      double sum = 0.0, binom = 1.0;
      for (int k = 1; k <= s; ++k) {
        binom = binom * (s - k + 1) / k;
        if (k >= 2) sum += binom * std::pow(q, k) * std::exp((s - k) * lw);
      }
      return sum;
    }
  }
  const R sm1 = c.num(static_cast<double>(s - 1));
  const R ws = exp(c.num(static_cast<double>(s)) * lw);
  const R ws1 = exp(sm1 * lw);
  return c.num(1.0) + sm1 * ws - c.num(static_cast<double>(s)) * ws1;
}

}  // namespace model

double round_pmf(const BigInt& k, const MiningDesign& m);
double failure_prob(const MiningDesign& m, const PrecisionTier& tier = PrecisionTier::fast());
double expected_rounds(const MiningDesign& m);
double expected_pow_time(const MiningDesign& m, double T);
Guarded<double> prob_time_gt(const MiningDesign& m, const Rational& T, const Rational& th);
Guarded<double> prob_time_lt(const MiningDesign& m, const Rational& T, const Rational& th_prime);
double dispute_prob(const MiningDesign& m, const Rational& T, const Rational& mu);
double dispute_prob(int s, int d, const BigInt& mu_over_T);
double pool_win_prob(int l, int s, int c);
// l^c <= delta3 * s^c, evaluated exactly.
bool pool_bound_holds(int l, int s, int c, const Rational& delta3);

}  // namespace powcalc
