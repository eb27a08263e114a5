#include "powcalc/numerics.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace powcalc {

PrecisionTier PrecisionTier::exact(unsigned digits) {
  if (digits < 30) throw std::invalid_argument("exact tier needs at least 30 mantissa digits");
  PrecisionTier t;
  t.kind = Kind::Exact;
  t.digits = digits;
  return t;
}

std::string PrecisionTier::name() const {
  return is_exact() ? "exact(" + std::to_string(digits) + ")" : "fast";
}

unsigned digits_to_bits(unsigned digits) {
  // log2(10) = 3.3219..., plus guard bits
  return static_cast<unsigned>(std::ceil(digits * 3.3219280948873623)) + 16;
}

BigReal::BigReal(unsigned bits) {
  mpfr_init2(v_, bits);
  mpfr_set_zero(v_, 1);
}

BigReal::BigReal(double v, unsigned bits) {
  mpfr_init2(v_, bits);
  mpfr_set_d(v_, v, MPFR_RNDN);
}

BigReal::BigReal(const BigInt& v, unsigned bits) {
  mpfr_init2(v_, bits);
  mpfr_set_str(v_, v.str().c_str(), 10, MPFR_RNDN);
}

BigReal::BigReal(const Rational& v, unsigned bits) {
  mpfr_init2(v_, bits);
  mpfr_t den;
  mpfr_init2(den, bits);
  mpfr_set_str(v_, boost::multiprecision::numerator(v).str().c_str(), 10, MPFR_RNDN);
  mpfr_set_str(den, boost::multiprecision::denominator(v).str().c_str(), 10, MPFR_RNDN);
  mpfr_div(v_, v_, den, MPFR_RNDN);
  mpfr_clear(den);
}

BigReal::BigReal(const BigReal& o) {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

BigReal::BigReal(BigReal&& o) noexcept {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_swap(v_, o.v_);
}

BigReal& BigReal::operator=(const BigReal& o) {
  if (this != &o) {
    mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  return *this;
}

BigReal& BigReal::operator=(BigReal&& o) noexcept {
  mpfr_swap(v_, o.v_);
  return *this;
}

BigReal::~BigReal() { mpfr_clear(v_); }

std::string BigReal::str(int digits) const {
  char buf[512];
  mpfr_snprintf(buf, sizeof buf, "%.*Rg", digits, v_);
  return buf;
}

namespace {

mpfr_prec_t max_prec(const BigReal& a, const BigReal& b) {
  return std::max(mpfr_get_prec(a.raw()), mpfr_get_prec(b.raw()));
}

}  // namespace

BigReal operator+(const BigReal& a, const BigReal& b) {
  BigReal r(static_cast<unsigned>(max_prec(a, b)));
  mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

BigReal operator-(const BigReal& a, const BigReal& b) {
  BigReal r(static_cast<unsigned>(max_prec(a, b)));
  mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

BigReal operator*(const BigReal& a, const BigReal& b) {
  BigReal r(static_cast<unsigned>(max_prec(a, b)));
  mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

BigReal operator/(const BigReal& a, const BigReal& b) {
  BigReal r(static_cast<unsigned>(max_prec(a, b)));
  mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

BigReal operator-(const BigReal& a) {
  BigReal r(a.bits());
  mpfr_neg(r.v_, a.v_, MPFR_RNDN);
  return r;
}

BigReal exp(const BigReal& x) {
  BigReal r(x.bits());
  mpfr_exp(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

BigReal expm1(const BigReal& x) {
  BigReal r(x.bits());
  mpfr_expm1(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

BigReal log1p(const BigReal& x) {
  BigReal r(x.bits());
  mpfr_log1p(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

BigReal abs(const BigReal& x) {
  BigReal r(x.bits());
  mpfr_abs(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

double ln_one_minus_pow2(int d) {
  if (d <= 0) throw std::domain_error("ln_one_minus_pow2: d must be positive");
  return std::log1p(-std::ldexp(1.0, -d));
}

BigReal ln_one_minus_pow2_exact(int d, unsigned bits) {
  if (d <= 0) throw std::domain_error("ln_one_minus_pow2: d must be positive");
  BigReal x(bits);
  mpfr_set_si_2exp(x.raw(), -1, -d, MPFR_RNDN);
  return log1p(x);
}

BigReal survival_pow_exact(int d, const BigInt& exponent, unsigned digits) {
  const unsigned bits = digits_to_bits(digits);
  return exp(BigReal(exponent, bits) * ln_one_minus_pow2_exact(d, bits));
}

Survival survival_pow(int d, const BigInt& exponent, const PrecisionTier& tier) {
  if (exponent < 0) throw std::domain_error("survival_pow: negative exponent");
  Survival out;
  if (exponent == 0) return out;
  if (!tier.is_exact()) {
    const double lg = exponent.convert_to<double>() * ln_one_minus_pow2(d);
    out.value = std::exp(lg);
    out.underflow = out.value == 0.0;
    return out;
  }
  const BigReal v = survival_pow_exact(d, exponent, tier.digits);
  out.value = v.to_double();
  out.underflow = out.value == 0.0 && !v.is_zero();
  if (v.is_zero()) out.underflow = true;
  return out;
}

bool tiers_agree(int d, const BigInt& exponent, double rel_tol) {
  const Survival f = survival_pow(d, exponent, PrecisionTier::fast());
  const BigReal e = survival_pow_exact(d, exponent, kDefaultExactDigits);
  const double ed = e.to_double();
  if (f.underflow && ed == 0.0) return true;
  if (ed == 0.0) return false;
  return std::abs(f.value - ed) <= rel_tol * std::abs(ed);
}

BigInt floor_rat(const Rational& q) {
  const BigInt n = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  BigInt quo = n / den;
  if (n % den != 0 && n < 0) quo -= 1;
  return quo;
}

BigInt ceil_rat(const Rational& q) { return -floor_rat(-q); }

namespace {

[[noreturn]] void bad_number(const std::string& text) {
  throw std::invalid_argument("malformed number: '" + text + "'");
}

BigInt pow10(unsigned e) {
  BigInt r = 1;
  for (unsigned i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational parse_decimal(const std::string& t) {
  if (t.empty()) bad_number(t);
  std::size_t i = 0;
  bool neg = false;
  if (t[i] == '+' || t[i] == '-') {
    neg = t[i] == '-';
    ++i;
  }
  BigInt mant = 0;
  int frac = 0;
  bool digits = false, dot = false;
  for (; i < t.size(); ++i) {
    const char ch = t[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      mant = mant * 10 + (ch - '0');
      digits = true;
      if (dot) ++frac;
    } else if (ch == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!digits) bad_number(t);
  long exp10 = 0;
  if (i < t.size()) {
    if (t[i] != 'e' && t[i] != 'E') bad_number(t);
    ++i;
    std::size_t used = 0;
    try {
      exp10 = std::stol(t.substr(i), &used);
    } catch (const std::exception&) {
      bad_number(t);
    }
    if (used == 0 || i + used != t.size() || std::abs(exp10) > 4000) bad_number(t);
  }
  exp10 -= frac;
  Rational q = exp10 >= 0 ? Rational(mant * pow10(static_cast<unsigned>(exp10)))
                          : Rational(mant, pow10(static_cast<unsigned>(-exp10)));
  return neg ? Rational(-q) : q;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const std::string t = trim(text);
  if (const auto slash = t.find('/'); slash != std::string::npos) {
    const Rational den = parse_rational(t.substr(slash + 1));
    if (den == 0) bad_number(t);
    return parse_rational(t.substr(0, slash)) / den;
  }
  if (const auto caret = t.find('^'); caret != std::string::npos) {
    const Rational base = parse_decimal(trim(t.substr(0, caret)));
    const std::string es = trim(t.substr(caret + 1));
    long e = 0;
    std::size_t used = 0;
    try {
      e = std::stol(es, &used);
    } catch (const std::exception&) {
      bad_number(t);
    }
    if (used != es.size() || std::abs(e) > 4000 || base == 0) bad_number(t);
    Rational r = 1;
    for (long k = 0; k < std::abs(e); ++k) r *= base;
    return e < 0 ? Rational(1 / r) : r;
  }
  return parse_decimal(t);
}

std::string rational_to_string(const Rational& q) {
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return boost::multiprecision::numerator(q).str();
  // Terminating decimals are rendered as decimals, everything else as a/b.
  BigInt d = den;
  unsigned twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return boost::multiprecision::numerator(q).str() + "/" + den.str();
  const unsigned places = std::max(twos, fives);
  const BigInt scaled = boost::multiprecision::numerator(q) * pow10(places) / den;
  const bool neg = scaled < 0;
  std::string digits = (neg ? BigInt(-scaled) : scaled).str();
  if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
  digits.insert(digits.size() - places, ".");
  while (digits.back() == '0') digits.pop_back();
  if (digits.back() == '.') digits.pop_back();
  return (neg ? "-" : "") + digits;
}

double ceil_decimals(double v, int places) {
  const double scale = std::pow(10.0, places);
  const double scaled = v * scale;
  // guard against representation noise right at a decimal boundary
  const double nearest = std::round(scaled);
  if (std::abs(scaled - nearest) <= 1e-6) return nearest / scale;
  return std::ceil(scaled) / scale;
}

std::string format_ceil(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, ceil_decimals(v, places));
  return buf;
}

}  // namespace powcalc
