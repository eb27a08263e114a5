#include "powcalc/powmodel.hpp"

#include <stdexcept>
#include <string>

namespace powcalc {

void HashSpec::validate() const {
  if (!(n > 0 && p >= n)) throw std::invalid_argument("hash spec needs p >= n > 0");
  if (!(T > 0)) throw std::invalid_argument("hash spec needs T > 0");
}

BigInt lambda(int r, int s) {
  if (r < 1 || s < 1) throw std::invalid_argument("lambda needs r >= 1 and s >= 1");
  return (BigInt(1) << r) / s;
}

MiningDesign MiningDesign::make(int s, int r, int d, const HashSpec& h) {
  if (s < 1) throw std::invalid_argument("design needs s >= 1, got " + std::to_string(s));
  if (!(0 < r && r < h.p)) throw std::invalid_argument("design needs 0 < r < p, got r=" + std::to_string(r));
  if (!(0 < d && d < h.n)) throw std::invalid_argument("design needs 0 < d < n, got d=" + std::to_string(d));
  MiningDesign m;
  m.s = s;
  m.r = r;
  m.d = d;
  m.lam = lambda(r, s);
  return m;
}

double round_pmf(const BigInt& k, const MiningDesign& m) {
  if (k < 0 || k > m.lam) throw std::out_of_range("round_pmf: k outside [0, lambda]");
  const double ly = model::log_y(FastCtx{}, m.s, m.d);
  return std::exp(k.convert_to<double>() * ly) * -std::expm1(ly);
}

double failure_prob(const MiningDesign& m, const PrecisionTier& tier) {
  return survival_pow(m.d, BigInt(m.s * (m.lam + 1)), tier).value;
}

double expected_rounds(const MiningDesign& m) {
  return model::expected_rounds(FastCtx{}, m.s, m.d, m.lam);
}

double expected_pow_time(const MiningDesign& m, double T) { return T * expected_rounds(m); }

Guarded<double> prob_time_gt(const MiningDesign& m, const Rational& T, const Rational& th) {
  return model::time_gt(FastCtx{}, m.s, m.d, m.lam, ceil_rat(th / T - 1));
}

Guarded<double> prob_time_lt(const MiningDesign& m, const Rational& T, const Rational& th_prime) {
  return model::time_lt(FastCtx{}, m.s, m.d, floor_rat(th_prime / T - 1));
}

double dispute_prob(int s, int d, const BigInt& mu_over_T) {
  if (mu_over_T < 0) throw std::invalid_argument("dispute_prob needs floor(mu/T) >= 0");
  return model::dispute(FastCtx{}, s, d, mu_over_T);
}

double dispute_prob(const MiningDesign& m, const Rational& T, const Rational& mu) {
  return dispute_prob(m.s, m.d, floor_rat(mu / T));
}

double pool_win_prob(int l, int s, int c) {
  if (!(1 <= l && l < s)) throw std::domain_error("pool_win_prob needs 1 <= l < s");
  if (c < 1) throw std::domain_error("pool_win_prob needs c >= 1");
  return std::pow(static_cast<double>(l) / s, c);
}

bool pool_bound_holds(int l, int s, int c, const Rational& delta3) {
  const BigInt lc = boost::multiprecision::pow(BigInt(l), static_cast<unsigned>(c));
  const BigInt sc = boost::multiprecision::pow(BigInt(s), static_cast<unsigned>(c));
  return Rational(lc) <= delta3 * sc;
}

}  // namespace powcalc
