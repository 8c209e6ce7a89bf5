#pragma once

#include <cmath>

// Minimal double-double arithmetic (~32 significant digits), enough to sum
// alternating series whose intermediate terms exceed the final value by up
// to ~e^33. Error-free transforms follow the classic QD construction; the
// product split relies on fused multiply-add.
namespace epde::detail {

struct dd {
  double hi = 0.0;
  double lo = 0.0;
  dd() = default;
  constexpr dd(double h, double l = 0.0) : hi(h), lo(l) {}
  explicit operator double() const { return hi + lo; }
};

inline dd two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline dd quick_two_sum(double a, double b) {  // requires |a| >= |b|
  const double s = a + b;
  return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline dd add(const dd& a, const dd& b) {
  dd s = two_sum(a.hi, b.hi);
  const dd t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline dd add(const dd& a, double b) {
  dd s = two_sum(a.hi, b);
  s.lo += a.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline dd sub(const dd& a, const dd& b) { return add(a, dd{-b.hi, -b.lo}); }
inline dd neg(const dd& a) { return {-a.hi, -a.lo}; }

inline dd mul(const dd& a, const dd& b) {
  dd p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline dd mul(const dd& a, double b) {
  dd p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return quick_two_sum(p.hi, p.lo);
}

inline dd div(const dd& a, const dd& b) {
  const double q1 = a.hi / b.hi;
  dd r = sub(a, mul(b, q1));
  const double q2 = r.hi / b.hi;
  r = sub(r, mul(b, q2));
  const double q3 = r.hi / b.hi;
  dd q = quick_two_sum(q1, q2);
  return add(q, q3);
}

inline dd div(const dd& a, double b) { return div(a, dd{b}); }

inline dd ldexp(const dd& a, int e) {
  return {std::ldexp(a.hi, e), std::ldexp(a.lo, e)};
}

inline constexpr dd kLn2{0.6931471805599453, 2.3190468138462996e-17};
inline constexpr dd kPi{3.141592653589793, 1.2246467991473532e-16};
inline constexpr dd kHalfLn2Pi{0.9189385332046728, -3.8782941580672414e-17};

// exp(a) for |a| ≤ ~700: argument reduction by ln 2, then a scaled Taylor
// series squared back up 9 times.
inline dd dd_exp(const dd& a) {
  if (a.hi < -745.0) return {0.0, 0.0};
  if (a.hi > 709.0) return {HUGE_VAL, 0.0};
  const double m = std::nearbyint(a.hi / kLn2.hi);
  dd r = sub(a, mul(kLn2, m));
  r = ldexp(r, -9);
  // expm1 Taylor on |r| ≤ 2^-9 ln 2
  dd p = r;
  dd term = r;
  for (int i = 2; i <= 12; ++i) {
    term = div(mul(term, r), static_cast<double>(i));
    p = add(p, term);
    if (std::abs(term.hi) < 1e-40) break;
  }
  for (int i = 0; i < 9; ++i) p = add(ldexp(p, 1), mul(p, p));  // e^{2x}-1
  return ldexp(add(p, 1.0), static_cast<int>(m));
}

// log(a) for a.hi > 0 via two Newton corrections of the double-precision
// logarithm: y ← y + a e^{-y} - 1.
inline dd dd_log(const dd& a) {
  dd y{std::log(a.hi), 0.0};
  for (int i = 0; i < 2; ++i) {
    const dd e = dd_exp(y);
    y = add(y, sub(div(a, e), dd{1.0}));
  }
  return y;
}

// log Γ(x) for x ≥ 1: shift upward past 25, then the Stirling series with
// Bernoulli terms through B_28 (remainder < 1e-33 at x = 25).
inline dd dd_lgamma(dd x) {
  dd shift{0.0, 0.0};
  while (x.hi < 25.0) {
    shift = add(shift, dd_log(x));
    x = add(x, 1.0);
  }
  static const dd coeff[] = {
      // B_{2j} / (2j (2j-1)), j = 1..14
      div(dd{1.0}, dd{12.0}),
      div(dd{-1.0}, dd{360.0}),
      div(dd{1.0}, dd{1260.0}),
      div(dd{-1.0}, dd{1680.0}),
      div(dd{1.0}, dd{1188.0}),
      div(dd{-691.0}, dd{360360.0}),
      div(dd{1.0}, dd{156.0}),
      div(dd{-3617.0}, dd{122400.0}),
      div(dd{43867.0}, dd{244188.0}),
      div(dd{-174611.0}, dd{125400.0}),
      div(dd{77683.0}, dd{5796.0}),
      div(dd{-236364091.0}, dd{1506960.0}),
      div(dd{657931.0}, dd{300.0}),
      div(dd{-3392780147.0}, dd{93960.0}),
  };
  const dd lx = dd_log(x);
  dd s = mul(sub(x, dd{0.5}), lx);
  s = sub(s, x);
  s = add(s, kHalfLn2Pi);
  const dd inv = div(dd{1.0}, x);
  const dd inv2 = mul(inv, inv);
  dd pw = inv;
  for (const dd& c : coeff) {
    s = add(s, mul(c, pw));
    pw = mul(pw, inv2);
  }
  return sub(s, shift);
}

}  // namespace epde::detail
