#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "cnet/errors.hpp"

namespace cnet {

// Exact rational arithmetic for regime dispatch.  Every finite double is a
// dyadic rational, so converting inputs is lossless; all sign tests on
// polynomial expressions of the inputs are then exact.
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(double x) { return Rational(x); }

inline Rational rat_fraction(long num, long den) {
  if (den == 0) throw validation_error("rational with zero denominator");
  return Rational(num) / Rational(den);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Result of an exact sign test.  `near_boundary` marks values that are
// nonzero but within band*scale of zero: the input was almost certainly
// intended to sit on the boundary and the caller should not dispatch on it.
struct SignTest {
  int sign;            // -1, 0, +1, exact
  bool near_boundary;  // nonzero but suspiciously close to zero
};

inline SignTest test_sign(const Rational& value, const Rational& scale,
                          double band = 1e-12) {
  SignTest t;
  t.sign = value.sign();
  t.near_boundary = false;
  if (t.sign != 0) {
    Rational mag = abs(value);
    Rational limit = rat(band) * (scale < 1 ? Rational(1) : scale);
    if (mag <= limit) t.near_boundary = true;
  }
  return t;
}

// Design weights carried exactly.  Grid sweeps construct these from integer
// fractions so that boundary rows of the regime tables are hit exactly.
struct RationalTheta {
  Rational c, p, m;

  Rational potential_margin() const { return m + p - c; }   // theta_M+theta_P-theta_C
  Rational concavity_margin() const { return 2 * m - c; }   // 2*theta_M-theta_C
  Rational trade_margin() const { return 3 * m - c - p; }   // 3*theta_M-theta_C-theta_P
  Rational sum() const { return c + p + m; }
  Rational max_abs() const {
    Rational s = abs(c);
    if (abs(p) > s) s = abs(p);
    if (abs(m) > s) s = abs(m);
    return s;
  }
};

inline RationalTheta rational_theta(double c, double p, double m) {
  return RationalTheta{rat(c), rat(p), rat(m)};
}

inline RationalTheta rational_theta_grid(long i, long j, long k, long n) {
  return RationalTheta{rat_fraction(i, n), rat_fraction(j, n), rat_fraction(k, n)};
}

}  // namespace cnet
