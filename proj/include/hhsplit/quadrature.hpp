#pragma once

// Composite Gauss-Legendre quadrature for even, exponentially decaying
// integrands on the real line.  Shared oracle for the companion computations
// and the recurrence tests: independent of the closed-form I1/I2 path.

#include <cmath>
#include <functional>
#include <stdexcept>

#include "hhsplit/dd.hpp"

namespace hhsplit {

namespace quad_detail {
// 16-point Gauss-Legendre nodes/weights on [-1, 1]
inline constexpr double gl_x[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
inline constexpr double gl_w[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

inline double panel(const std::function<double(double)>& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i)
        acc += gl_w[i] * (f(c + h * gl_x[i]) + f(c - h * gl_x[i]));
    return acc * h;
}
}  // namespace quad_detail

// integral over R of an even integrand decaying like exp(-decay_rate * |t|),
// oscillating no faster than `freq`; panels are refined until two successive
// resolutions agree to rel_tol
inline double integrate_even_decaying(const std::function<double(double)>& f,
                                      double decay_rate, double freq,
                                      double rel_tol = 1e-12) {
    if (!(decay_rate > 0)) throw std::invalid_argument("decay_rate must be > 0");
    double T = (std::log(1.0 / rel_tol) + 40.0) / decay_rate;
    int panels = std::max(16, (int)std::ceil(T * std::max(freq, 1.0) / 2.0));
    double prev = 0.0;
    for (int iter = 0; iter < 12; ++iter) {
        double acc = 0.0;
        double h = T / panels;
        for (int k = 0; k < panels; ++k)
            acc += quad_detail::panel(f, k * h, (k + 1) * h);
        acc *= 2.0;  // even integrand
        if (iter > 0 && std::fabs(acc - prev) <= rel_tol * std::fabs(acc))
            return acc;
        prev = acc;
        panels *= 2;
    }
    return prev;
}

// double-double variant for oracles that must resolve results far below the
// double roundoff floor of an O(1) oscillatory integrand (the exponentially
// small Duffing integrals).  Composite Gauss-Legendre with nodes refined to
// dd by Newton on the Legendre polynomial.
namespace quad_detail {
struct GL16dd {
    dd x[8], w[8];
    GL16dd() {
        for (int i = 0; i < 8; ++i) {
            dd t(gl_x[i]);
            for (int it = 0; it < 3; ++it) {
                // P_16(t), P'_16(t) by the three-term recurrence in dd
                dd p0(1.0), p1 = t;
                for (int n = 2; n <= 16; ++n) {
                    dd p2 = (t * p1 * double(2 * n - 1) - p0 * double(n - 1)) / double(n);
                    p0 = p1;
                    p1 = p2;
                }
                dd dp = (t * p1 - p0) * 16.0 / (sqr(t) - 1.0);
                t = t - p1 / dp;
            }
            x[i] = t;
            dd p0(1.0), p1 = t;
            for (int n = 2; n <= 16; ++n) {
                dd p2 = (t * p1 * double(2 * n - 1) - p0 * double(n - 1)) / double(n);
                p0 = p1;
                p1 = p2;
            }
            dd dp = (t * p1 - p0) * 16.0 / (sqr(t) - 1.0);
            w[i] = 2.0 / ((1.0 - sqr(t)) * sqr(dp));
        }
    }
};
inline dd panel_dd(const std::function<dd(dd)>& f, dd a, dd b) {
    static const GL16dd rule;
    dd c = (a + b) * 0.5, h = (b - a) * 0.5;
    dd acc(0.0);
    for (int i = 0; i < 8; ++i)
        acc += rule.w[i] * (f(c + h * rule.x[i]) + f(c - h * rule.x[i]));
    return acc * h;
}
}  // namespace quad_detail

inline dd integrate_even_decaying_dd(const std::function<dd(dd)>& f,
                                     double decay_rate, double freq,
                                     double rel_tol = 1e-24) {
    if (!(decay_rate > 0)) throw std::invalid_argument("decay_rate must be > 0");
    double T = (std::log(1.0 / rel_tol) + 60.0) / decay_rate;
    int panels = std::max(16, (int)std::ceil(T * std::max(freq, 1.0) / 2.0));
    dd prev(0.0);
    for (int iter = 0; iter < 8; ++iter) {
        dd acc(0.0);
        double h = T / panels;
        for (int k = 0; k < panels; ++k)
            acc += quad_detail::panel_dd(f, dd(k * h), dd((k + 1) * h));
        acc = acc * 2.0;
        if (iter > 0 && std::fabs(to_double(acc - prev)) <=
                            rel_tol * std::fabs(to_double(acc)))
            return acc;
        prev = acc;
        panels *= 2;
    }
    return prev;
}

}  // namespace hhsplit
