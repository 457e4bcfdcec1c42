#pragma once

#include <cmath>
#include <string>

#include "mop/double_double.hpp"
#include "mop/rational.hpp"

namespace mop {

// Uniform interface over the three scalar kinds.  Exact kinds report a zero
// epsilon, which downstream breakdown tests use to demand exact zeros.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool is_exact = false;
  static constexpr bool has_sqrt = true;
  static double epsilon() { return 0x1p-52; }
  static double from_double(double x) { return x; }
  static double to_double(double x) { return x; }
  static double abs(double x) { return std::fabs(x); }
  static double sqrt(double x) { return std::sqrt(x); }
  static bool finite(double x) { return std::isfinite(x); }
  static std::string name() { return "double"; }
};

template <>
struct scalar_traits<DoubleDouble> {
  static constexpr bool is_exact = false;
  static constexpr bool has_sqrt = true;
  static DoubleDouble epsilon() { return DoubleDouble(0x1p-104); }
  static DoubleDouble from_double(double x) { return DoubleDouble(x); }
  static double to_double(const DoubleDouble& x) { return x.to_double(); }
  static DoubleDouble abs(const DoubleDouble& x) { return mop::abs(x); }
  static DoubleDouble sqrt(const DoubleDouble& x) { return mop::sqrt(x); }
  static bool finite(const DoubleDouble& x) { return x.finite(); }
  static std::string name() { return "extended"; }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool is_exact = true;
  static constexpr bool has_sqrt = false;
  static Rational epsilon() { return Rational(0); }
  static Rational from_double(double x) { return Rational(x); }
  static double to_double(const Rational& x) { return x.to_double(); }
  static Rational abs(const Rational& x) { return mop::abs(x); }
  static bool finite(const Rational&) { return true; }
  static std::string name() { return "rational"; }
};

// Value-preserving conversion between kinds: exact into wider/exact kinds,
// correctly rounded out of Rational.
template <class To, class From>
To scalar_convert(const From& x) {
  if constexpr (std::is_same_v<To, From>) {
    return x;
  } else if constexpr (std::is_same_v<From, double>) {
    return To(x);
  } else if constexpr (std::is_same_v<From, DoubleDouble>) {
    if constexpr (std::is_same_v<To, double>) return x.to_double();
    else return To(x);  // Rational(DoubleDouble) is exact
  } else {  // From == Rational
    if constexpr (std::is_same_v<To, double>) return x.to_double();
    else return x.to_double_double();
  }
}

}  // namespace mop
