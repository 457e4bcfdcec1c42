#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>

namespace mop {

// Unevaluated sum of two doubles with |lo| <= 1/2 ulp(hi).  Roughly 106
// significand bits; every operation below keeps the relative error of the
// produced pair under 2^-100.  Division by zero and overflow follow IEEE
// semantics (the pair degenerates to +-inf/NaN in the hi component).
class DoubleDouble {
 public:
  constexpr DoubleDouble() : hi_(0.0), lo_(0.0) {}
  constexpr DoubleDouble(double x) : hi_(x), lo_(0.0) {}
  constexpr DoubleDouble(int x) : hi_(x), lo_(0.0) {}
  constexpr DoubleDouble(long x) : hi_(static_cast<double>(x)), lo_(0.0) {}

  // Raw pair constructor; callers must pass a normalized pair.
  static constexpr DoubleDouble from_parts(double hi, double lo) {
    return DoubleDouble(hi, lo, raw_tag{});
  }

  double hi() const { return hi_; }
  double lo() const { return lo_; }

  // |lo| <= 1/2 ulp(hi) makes hi the double nearest the represented value,
  // so hi + lo rounds back to hi; returning the sum also handles raw pairs.
  double to_double() const { return hi_ + lo_; }

  bool finite() const { return std::isfinite(hi_); }

  // -- error-free transformations ------------------------------------------

  // Sum and exact error, no magnitude precondition (6 flops).
  static DoubleDouble two_sum(double a, double b) {
    double s = a + b;
    double ap = s - b;
    double bp = s - ap;
    double err = (a - ap) + (b - bp);
    return DoubleDouble(s, err, raw_tag{});
  }

  // Sum and exact error assuming |a| >= |b| (3 flops).
  static DoubleDouble fast_two_sum(double a, double b) {
    double s = a + b;
    double z = s - a;
    return DoubleDouble(s, b - z, raw_tag{});
  }

  // Product and exact error via fused multiply-add.
  static DoubleDouble two_prod(double a, double b) {
    double p = a * b;
    return DoubleDouble(p, std::fma(a, b, -p), raw_tag{});
  }

  // -- arithmetic ------------------------------------------------------------

  friend DoubleDouble operator+(const DoubleDouble& x, const DoubleDouble& y) {
    DoubleDouble s = two_sum(x.hi_, y.hi_);
    DoubleDouble t = two_sum(x.lo_, y.lo_);
    double c = s.lo_ + t.hi_;
    DoubleDouble v = fast_two_sum(s.hi_, c);
    double w = t.lo_ + v.lo_;
    return fast_two_sum(v.hi_, w);
  }

  friend DoubleDouble operator-(const DoubleDouble& x, const DoubleDouble& y) {
    return x + (-y);
  }

  friend DoubleDouble operator*(const DoubleDouble& x, const DoubleDouble& y) {
    DoubleDouble c = two_prod(x.hi_, y.hi_);
    double t = std::fma(x.hi_, y.lo_, x.lo_ * y.hi_);
    return fast_two_sum(c.hi_, c.lo_ + t);
  }

  // Long division with two refinement terms; accuracy comfortably below the
  // 2^-100 budget at ~4 divisions' cost, which this project never notices.
  friend DoubleDouble operator/(const DoubleDouble& x, const DoubleDouble& y) {
    double q1 = x.hi_ / y.hi_;
    if (!std::isfinite(q1)) return DoubleDouble(q1, 0.0, raw_tag{});
    DoubleDouble r = x - y * DoubleDouble(q1);
    double q2 = r.hi_ / y.hi_;
    r = r - y * DoubleDouble(q2);
    double q3 = r.hi_ / y.hi_;
    DoubleDouble q = fast_two_sum(q1, q2);
    return q + DoubleDouble(q3);
  }

  friend DoubleDouble operator-(const DoubleDouble& x) {
    return DoubleDouble(-x.hi_, -x.lo_, raw_tag{});
  }

  DoubleDouble& operator+=(const DoubleDouble& y) { return *this = *this + y; }
  DoubleDouble& operator-=(const DoubleDouble& y) { return *this = *this - y; }
  DoubleDouble& operator*=(const DoubleDouble& y) { return *this = *this * y; }
  DoubleDouble& operator/=(const DoubleDouble& y) { return *this = *this / y; }

  // -- comparisons (exact on normalized pairs) -------------------------------

  friend bool operator==(const DoubleDouble& x, const DoubleDouble& y) {
    return x.hi_ == y.hi_ && x.lo_ == y.lo_;
  }
  friend bool operator!=(const DoubleDouble& x, const DoubleDouble& y) {
    return !(x == y);
  }
  friend bool operator<(const DoubleDouble& x, const DoubleDouble& y) {
    return x.hi_ < y.hi_ || (x.hi_ == y.hi_ && x.lo_ < y.lo_);
  }
  friend bool operator>(const DoubleDouble& x, const DoubleDouble& y) { return y < x; }
  friend bool operator<=(const DoubleDouble& x, const DoubleDouble& y) { return !(y < x); }
  friend bool operator>=(const DoubleDouble& x, const DoubleDouble& y) { return !(x < y); }

 private:
  struct raw_tag {};
  constexpr DoubleDouble(double hi, double lo, raw_tag) : hi_(hi), lo_(lo) {}

  double hi_;
  double lo_;
};

inline DoubleDouble abs(const DoubleDouble& x) {
  return x.hi() < 0.0 || (x.hi() == 0.0 && x.lo() < 0.0) ? -x : x;
}

// sqrt(hi) has full double accuracy; one Newton step in the pair format
// doubles the correct bits, reaching the pair's precision.
inline DoubleDouble sqrt(const DoubleDouble& x) {
  if (x.hi() == 0.0 && x.lo() == 0.0) return DoubleDouble();
  if (x.hi() < 0.0) return DoubleDouble(std::numeric_limits<double>::quiet_NaN());
  double s = std::sqrt(x.hi());
  DoubleDouble e = x - DoubleDouble::two_prod(s, s);
  return DoubleDouble::fast_two_sum(s, e.to_double() / (2.0 * s));
}

inline std::ostream& operator<<(std::ostream& os, const DoubleDouble& x) {
  return os << x.hi() << (x.lo() < 0.0 ? "" : "+") << x.lo();
}

}  // namespace mop
