#include "hhsplit/dd.hpp"

namespace hhsplit {

namespace {

// sin/cos on [-pi/4, pi/4] by Taylor series; terms fall below 1e-35 well
// before k = 20.
void sincos_kernel(dd x, dd& s, dd& c) {
    dd x2 = sqr(x);
    dd term = x;
    dd sum_s = x;
    for (int k = 1; k < 20; ++k) {
        term = term * x2 / double((2 * k) * (2 * k + 1));
        term = -term;
        sum_s += term;
        if (std::fabs(term.hi) < 1e-36) break;
    }
    dd term_c(1.0);
    dd sum_c(1.0);
    for (int k = 1; k < 20; ++k) {
        term_c = term_c * x2 / double((2 * k - 1) * (2 * k));
        term_c = -term_c;
        sum_c += term_c;
        if (std::fabs(term_c.hi) < 1e-36) break;
    }
    s = sum_s;
    c = sum_c;
}

}  // namespace

dd wrap_2pi(dd a) {
    double k = std::floor(to_double(a) / to_double(dd_2pi));
    dd r = a - dd_2pi * k;
    while (r.hi < 0.0) r += dd_2pi;
    while (r >= dd_2pi) r -= dd_2pi;
    return r;
}

dd wrap_pi(dd a) {
    dd r = wrap_2pi(a);
    if (r >= dd_pi) r -= dd_2pi;
    return r;
}

namespace {
// ln2 split for exp argument reduction
constexpr dd dd_ln2{6.931471805599452862e-01, 2.319046813846299558e-17};
}  // namespace

dd exp(dd a) {
    if (a.hi > 709.0) return dd(std::numeric_limits<double>::infinity());
    if (a.hi < -745.0) return dd(0.0);
    // a = k ln2 + r, |r| <= ln2/2; e^a = 2^k e^r
    double kd = std::nearbyint(to_double(a) / to_double(dd_ln2));
    dd r = a - dd_ln2 * kd;
    dd term(1.0), sum(1.0);
    for (int n = 1; n < 40; ++n) {
        term = term * r / double(n);
        sum += term;
        if (std::fabs(term.hi) < 1e-35) break;
    }
    return ldexp(sum, (int)kd);
}

dd cosh(dd a) {
    dd e = exp(a);
    return (e + 1.0 / e) * 0.5;
}

dd sinh(dd a) {
    if (std::fabs(a.hi) < 0.5) {
        // series near zero to dodge the cancellation in (e^a - e^-a)/2
        dd a2 = sqr(a), term = a, sum = a;
        for (int n = 1; n < 20; ++n) {
            term = term * a2 / double((2 * n) * (2 * n + 1));
            sum += term;
            if (std::fabs(term.hi) < 1e-35) break;
        }
        return sum;
    }
    dd e = exp(a);
    return (e - 1.0 / e) * 0.5;
}

dd tanh(dd a) { return sinh(a) / cosh(a); }

void sincos(dd a, dd& s, dd& c) {
    // reduce modulo pi/2: a = (pi/2)*q + r, r in [-pi/4, pi/4]
    double qd = std::nearbyint(to_double(a) / to_double(dd_pi_2));
    dd r = a - dd_pi_2 * qd;
    // guard against boundary rounding
    if (r.hi > 0.7853981633974484) { r -= dd_pi_2; qd += 1.0; }
    if (r.hi < -0.7853981633974484) { r += dd_pi_2; qd -= 1.0; }
    dd sk, ck;
    sincos_kernel(r, sk, ck);
    long long q = static_cast<long long>(qd) & 3;
    if (q < 0) q += 4;
    switch (q) {
        case 0: s = sk; c = ck; break;
        case 1: s = ck; c = -sk; break;
        case 2: s = -sk; c = -ck; break;
        default: s = -ck; c = sk; break;
    }
}

}  // namespace hhsplit
