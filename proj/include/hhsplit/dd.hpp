#pragma once

// Double-double arithmetic: an unevaluated sum of two doubles giving ~32
// significant decimal digits.  Used as the extended-precision scalar for the
// invariant-manifold computations, where the splitting to be resolved sits
// 15-25 orders of magnitude below the orbit scale.
//
// The error-free transformations follow Dekker/Knuth; products use a single
// hardware fma.  Compile with -ffp-contract=off so the compiler cannot merge
// the cancellation steps.

#include <cmath>
#include <cstdint>
#include <limits>

namespace hhsplit {

struct dd {
    double hi = 0.0;
    double lo = 0.0;

    constexpr dd() = default;
    constexpr dd(double h) : hi(h), lo(0.0) {}
    constexpr dd(double h, double l) : hi(h), lo(l) {}
    constexpr dd(int v) : hi(v), lo(0.0) {}

    explicit operator double() const { return hi + lo; }
};

namespace detail {
inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}
inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}
inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}
}  // namespace detail

inline dd operator+(dd a, dd b) {
    dd s = detail::two_sum(a.hi, b.hi);
    dd t = detail::two_sum(a.lo, b.lo);
    double lo = s.lo + t.hi;
    dd r = detail::quick_two_sum(s.hi, lo);
    lo = r.lo + t.lo;
    return detail::quick_two_sum(r.hi, lo);
}
inline dd operator+(dd a, double b) {
    dd s = detail::two_sum(a.hi, b);
    double lo = s.lo + a.lo;
    return detail::quick_two_sum(s.hi, lo);
}
inline dd operator+(double a, dd b) { return b + a; }

inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }
inline dd operator-(dd a, double b) { return a + (-b); }
inline dd operator-(double a, dd b) { return (-b) + a; }

inline dd operator*(dd a, dd b) {
    dd p = detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return detail::quick_two_sum(p.hi, p.lo);
}
inline dd operator*(dd a, double b) {
    dd p = detail::two_prod(a.hi, b);
    p.lo += a.lo * b;
    return detail::quick_two_sum(p.hi, p.lo);
}
inline dd operator*(double a, dd b) { return b * a; }

inline dd operator/(dd a, dd b) {
    double q1 = a.hi / b.hi;
    dd r = a - b * q1;
    double q2 = r.hi / b.hi;
    r = r - b * q2;
    double q3 = r.hi / b.hi;
    dd q = detail::quick_two_sum(q1, q2);
    return q + q3;
}
inline dd operator/(dd a, double b) { return a / dd(b); }
inline dd operator/(double a, dd b) { return dd(a) / b; }

inline dd& operator+=(dd& a, dd b) { a = a + b; return a; }
inline dd& operator-=(dd& a, dd b) { a = a - b; return a; }
inline dd& operator*=(dd& a, dd b) { a = a * b; return a; }
inline dd& operator/=(dd& a, dd b) { a = a / b; return a; }

inline bool operator<(dd a, dd b)  { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(dd a, dd b)  { return b < a; }
inline bool operator<=(dd a, dd b) { return !(b < a); }
inline bool operator>=(dd a, dd b) { return !(a < b); }
inline bool operator==(dd a, dd b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(dd a, dd b) { return !(a == b); }

inline dd fabs(dd a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }

inline dd sqr(dd a) {
    dd p = detail::two_prod(a.hi, a.hi);
    p.lo += 2.0 * a.hi * a.lo;
    return detail::quick_two_sum(p.hi, p.lo);
}

inline dd sqrt(dd a) {
    if (a.hi == 0.0) return dd(0.0);
    double x = std::sqrt(a.hi);
    // one Newton step on x -> (x + a/x)/2 carried in dd
    dd ax = a / dd(x);
    dd s = (ax + x) * 0.5;
    return s;
}

inline dd ldexp(dd a, int e) { return {std::ldexp(a.hi, e), std::ldexp(a.lo, e)}; }

inline double to_double(dd a) { return a.hi + a.lo; }

// pi and 2*pi to dd precision
inline constexpr dd dd_pi{3.141592653589793116e+00, 1.224646799147353207e-16};
inline constexpr dd dd_2pi{6.283185307179586232e+00, 2.449293598294706414e-16};
inline constexpr dd dd_pi_2{1.570796326794896558e+00, 6.123233995736766036e-17};

// sin/cos by argument reduction modulo pi/2 plus a Taylor tail.  Accurate to
// a few ulps of dd for |a| up to ~1e8, which covers every use here (angles
// and slowly accumulated phases are wrapped before the call).
void sincos(dd a, dd& s, dd& c);
inline dd sin(dd a) { dd s, c; sincos(a, s, c); return s; }
inline dd cos(dd a) { dd s, c; sincos(a, s, c); return c; }

// reduce a into [0, 2pi)
dd wrap_2pi(dd a);
// reduce a into [-pi, pi)
dd wrap_pi(dd a);

// exp/cosh/sinh/tanh at dd accuracy (|a| up to ~700)
dd exp(dd a);
dd cosh(dd a);
dd sinh(dd a);
dd tanh(dd a);

}  // namespace hhsplit
