#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdlib>
#include <ostream>
#include <string>
#include <utility>

#include "mop/double_double.hpp"
#include "mop/errors.hpp"

namespace mop {

// Arbitrary-precision rational, always held in canonical form (reduced,
// positive denominator).  Arithmetic is exact; division by zero throws
// solver_error(errc::division_by_zero) instead of producing a sentinel.
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(int n) : v_(n) {}
  Rational(long n) : v_(static_cast<signed long>(n)) {}
  Rational(long n, long d) {
    if (d == 0) throw solver_error(errc::division_by_zero, "rational with zero denominator");
    v_ = mpq_class(n, d);
    v_.canonicalize();
  }

  // Exact value of the double (every finite double is dyadic rational).
  explicit Rational(double x) {
    if (!std::isfinite(x))
      throw solver_error(errc::validation, "cannot rationalize a non-finite value");
    v_ = mpq_class(x);
  }

  explicit Rational(const DoubleDouble& x) {
    if (!x.finite())
      throw solver_error(errc::validation, "cannot rationalize a non-finite value");
    v_ = mpq_class(x.hi()) + mpq_class(x.lo());
  }

  // Accepts "n", "n/d", and decimal forms like "-12.75" or "6.02e23".
  explicit Rational(const std::string& s) { parse(s); }

  explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  const mpq_class& value() const { return v_; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational::raw(a.v_ + b.v_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational::raw(a.v_ - b.v_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational::raw(a.v_ * b.v_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.v_ == 0) throw solver_error(errc::division_by_zero, "rational division by zero");
    return Rational::raw(a.v_ / b.v_);
  }
  friend Rational operator-(const Rational& a) { return Rational::raw(-a.v_); }

  Rational& operator+=(const Rational& b) { v_ += b.v_; return *this; }
  Rational& operator-=(const Rational& b) { v_ -= b.v_; return *this; }
  Rational& operator*=(const Rational& b) { v_ *= b.v_; return *this; }
  Rational& operator/=(const Rational& b) { return *this = *this / b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  // Correctly rounded (to nearest) conversion through a 53-bit MPFR stop.
  double to_double() const {
    mpfr_t t;
    mpfr_init2(t, 53);
    mpfr_set_q(t, v_.get_mpq_t(), MPFR_RNDN);
    double d = mpfr_get_d(t, MPFR_RNDN);
    mpfr_clear(t);
    return d;
  }

  // Nearest double, then the nearest double to the exact remainder: the
  // canonical normalized pair for this value.
  DoubleDouble to_double_double() const {
    double hi = to_double();
    if (!std::isfinite(hi)) return DoubleDouble::from_parts(hi, 0.0);
    double lo = (*this - Rational(hi)).to_double();
    return DoubleDouble::from_parts(hi, lo);
  }

  std::string str() const { return v_.get_str(); }

  friend std::ostream& operator<<(std::ostream& os, const Rational& a) {
    return os << a.v_;
  }

 private:
  static Rational raw(mpq_class v) {
    Rational r;
    r.v_ = std::move(v);  // results of mpq arithmetic are already canonical
    return r;
  }

  void parse(const std::string& s) {
    std::string t = s;
    if (t.empty()) throw solver_error(errc::validation, "empty rational literal");
    if (auto slash = t.find('/'); slash != std::string::npos) {
      if (mpq_set_str(v_.get_mpq_t(), t.c_str(), 10) != 0)
        throw solver_error(errc::validation, "bad rational literal '" + s + "'");
      if (v_.get_den() == 0)
        throw solver_error(errc::division_by_zero, "rational literal '" + s + "' has zero denominator");
      v_.canonicalize();
      return;
    }
    // Decimal form: sign, digits, optional fraction, optional exponent.
    std::string digits;
    long exp10 = 0;
    std::size_t i = 0;
    bool neg = false;
    if (t[i] == '+' || t[i] == '-') neg = (t[i++] == '-');
    bool any = false, dot = false;
    for (; i < t.size(); ++i) {
      char c = t[i];
      if (c >= '0' && c <= '9') {
        digits += c;
        if (dot) --exp10;
        any = true;
      } else if (c == '.' && !dot) {
        dot = true;
      } else if ((c == 'e' || c == 'E') && any) {
        exp10 += std::strtol(t.c_str() + i + 1, nullptr, 10);
        break;
      } else {
        throw solver_error(errc::validation, "bad rational literal '" + s + "'");
      }
    }
    if (!any) throw solver_error(errc::validation, "bad rational literal '" + s + "'");
    mpz_class mant(digits.empty() ? "0" : digits);
    if (neg) mant = -mant;
    mpz_class pow;
    mpz_ui_pow_ui(pow.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    v_ = exp10 < 0 ? mpq_class(mant, pow) : mpq_class(mant * pow);
    v_.canonicalize();
  }

  mpq_class v_;
};

inline Rational abs(const Rational& a) { return a < Rational(0) ? -a : a; }

}  // namespace mop
