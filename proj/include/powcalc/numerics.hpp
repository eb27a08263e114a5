#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>
#include <mpfr.h>

namespace powcalc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr unsigned kDefaultExactDigits = 60;

struct PrecisionTier {
  enum class Kind { Fast, Exact };
  Kind kind = Kind::Fast;
  unsigned digits = 0;  // decimal mantissa digits, Exact only

  static PrecisionTier fast() { return {}; }
  static PrecisionTier exact(unsigned digits = kDefaultExactDigits);

  bool is_exact() const { return kind == Kind::Exact; }
  std::string name() const;
};

// Number of binary digits needed to carry `digits` decimal digits.
unsigned digits_to_bits(unsigned digits);

// RAII handle over an MPFR value. Precision of a result is the larger of
// the operands' precisions.
class BigReal {
 public:
  explicit BigReal(unsigned bits = 200);
  BigReal(double v, unsigned bits);
  BigReal(const BigInt& v, unsigned bits);
  BigReal(const Rational& v, unsigned bits);
  BigReal(const BigReal& o);
  BigReal(BigReal&& o) noexcept;
  BigReal& operator=(const BigReal& o);
  BigReal& operator=(BigReal&& o) noexcept;
  ~BigReal();

  unsigned bits() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  std::string str(int digits = 20) const;

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  friend BigReal operator+(const BigReal& a, const BigReal& b);
  friend BigReal operator-(const BigReal& a, const BigReal& b);
  friend BigReal operator*(const BigReal& a, const BigReal& b);
  friend BigReal operator/(const BigReal& a, const BigReal& b);
  friend BigReal operator-(const BigReal& a);
  friend bool operator<(const BigReal& a, const BigReal& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const BigReal& a, const BigReal& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>(const BigReal& a, const BigReal& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const BigReal& a, const BigReal& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }
  friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

 private:
  mpfr_t v_;
};

BigReal exp(const BigReal& x);
BigReal expm1(const BigReal& x);
BigReal log1p(const BigReal& x);
BigReal abs(const BigReal& x);

// Arithmetic contexts used by the tier-generic formulas in powmodel and
// optimizer. FastCtx works in binary64, ExactCtx in MPFR.
struct FastCtx {
  using R = double;
  R num(double v) const { return v; }
  R num(const BigInt& v) const { return v.convert_to<double>(); }
  R num(const Rational& v) const { return v.convert_to<double>(); }
  PrecisionTier tier() const { return PrecisionTier::fast(); }
};

struct ExactCtx {
  using R = BigReal;
  unsigned bits;
  explicit ExactCtx(unsigned digits) : bits(digits_to_bits(digits)), digits_(digits) {}
  R num(double v) const { return BigReal(v, bits); }
  R num(const BigInt& v) const { return BigReal(v, bits); }
  R num(const Rational& v) const { return BigReal(v, bits); }
  PrecisionTier tier() const { return PrecisionTier::exact(digits_); }

 private:
  unsigned digits_;
};

// ln(1 - 2^-d) for 1 <= d <= 64, via log1p. Throws std::domain_error for d <= 0.
double ln_one_minus_pow2(int d);
BigReal ln_one_minus_pow2_exact(int d, unsigned bits);

inline double ln_one_minus_pow2(const FastCtx&, int d) { return ln_one_minus_pow2(d); }
inline BigReal ln_one_minus_pow2(const ExactCtx& c, int d) { return ln_one_minus_pow2_exact(d, c.bits); }

struct Survival {
  double value = 1.0;
  bool underflow = false;
};

// (1 - 2^-d)^exponent. Fast evaluates exp(exponent * ln(1 - 2^-d)); Exact
// evaluates the same in MPFR and rounds the result to binary64. `underflow`
// is set when the rounded result is zero although the true value is not.
Survival survival_pow(int d, const BigInt& exponent, const PrecisionTier& tier);
BigReal survival_pow_exact(int d, const BigInt& exponent, unsigned digits);

bool tiers_agree(int d, const BigInt& exponent, double rel_tol);

// Floor and ceiling of exact rationals.
BigInt floor_rat(const Rational& q);
BigInt ceil_rat(const Rational& q);

// Exact decimal or fraction parsing: "2e-12", "0.02e-9", "1454/7", "2^-64".
Rational parse_rational(const std::string& text);
std::string rational_to_string(const Rational& q);

// Rounds up at the given number of decimal places ("ceiling" display).
double ceil_decimals(double v, int places);
std::string format_ceil(double v, int places);

}  // namespace powcalc
