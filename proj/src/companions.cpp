#include "hhsplit/companions.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace hhsplit {

namespace {

// Fourier coefficients of cos^a(psi) sin^b(psi) as a Laurent polynomial in
// e^{i psi}: returns coeffs[j + (a+b)] for harmonics j in [-(a+b), a+b]
std::vector<std::complex<double>> trig_fourier(int a, int b) {
    using C = std::complex<double>;
    std::vector<C> poly = {1.0};
    auto convolve = [](const std::vector<C>& u, const C& plus, const C& minus) {
        // multiply by (plus*z + minus*z^{-1}); coefficients widen by one on
        // each side
        std::vector<C> out(u.size() + 2, C(0.0));
        for (size_t k = 0; k < u.size(); ++k) {
            out[k + 2] += u[k] * plus;
            out[k] += u[k] * minus;
        }
        return out;
    };
    for (int i = 0; i < a; ++i) poly = convolve(poly, 0.5, 0.5);
    C half_i(0.0, -0.5);  // (z - z^{-1})/(2i) = -i/2 z + i/2 z^{-1}
    for (int i = 0; i < b; ++i) poly = convolve(poly, -half_i * C(-1.0), half_i * C(-1.0));
    return poly;
}

struct LogTerm {
    double log_mag;
    double coef;  // signed multiplier of exp(log_mag)
};

LogVal sum_log_terms(const std::vector<LogTerm>& terms) {
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms)
        if (t.coef != 0.0) mx = std::max(mx, t.log_mag);
    if (!std::isfinite(mx)) return {mx, 0};
    double acc = 0.0;
    for (const auto& t : terms)
        if (t.coef != 0.0) acc += t.coef * std::exp(t.log_mag - mx);
    if (acc == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    return {mx + std::log(std::fabs(acc)), acc > 0 ? 1 : -1};
}

double binom_d(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * double(n - k + i) / double(i);
    return b;
}

// per-harmonic complex coefficients of M1(psi0) = Re sum_j g_j e^{i j psi0}
std::vector<std::complex<double>> harmonic_coeffs(const Monomial& mono, double nu) {
    using C = std::complex<double>;
    const int m = mono.m(), n = mono.n(), k = mono.k(), l = mono.l();
    const int r = mono.r();
    // trig part: m cos^{m-1} sin^{n+1} - n cos^{m+1} sin^{n-1}
    std::vector<C> trig(2 * (r + 1) + 1, C(0.0));
    auto add = [&](double coef, int a, int b) {
        if (coef == 0.0 || a < 0 || b < 0) return;
        auto f = trig_fourier(a, b);
        int off = (int)(trig.size() - f.size()) / 2;
        for (size_t q = 0; q < f.size(); ++q) trig[q + off] += coef * f[q];
    };
    add(m, m - 1, n + 1);
    add(-n, m + 1, n - 1);
    // hyperbolic part: R1^k R2^l = (-1)^k 2^{(k+l)/2} tanh^k sech^{k+l}
    //                = (-1)^k 2^{r/2} tanh^{k mod 2} sum_p binom(k/2,p)(-1)^p sech^{r+2p}
    const int half = k / 2;
    const int sigma = k % 2;
    std::vector<C> out(trig.size(), C(0.0));
    const int J = r + 1;
    for (int j = -J; j <= J; ++j) {
        C tj = trig[j + J];
        if (std::abs(tj) == 0.0) continue;
        C val(0.0, 0.0);
        for (int p = 0; p <= half; ++p) {
            double cp = binom_d(half, p) * ((p % 2) ? -1.0 : 1.0);
            int Q = r + 2 * p;
            if (sigma == 0) {
                if (j == 0 && Q % 2 == 0) {
                    val += cp * I1_value(0.0, nu, Q);
                    continue;
                }
                val += cp * I1_value(std::fabs((double)j), nu, Q);
            } else {
                // int e^{ijt} tanh sech^Q = i I2(j, nu, Q+1), odd in j
                val += C(0.0, 1.0) * cp * I2_value((double)j, nu, Q + 1);
            }
        }
        double sgn = (k % 2 == 0) ? 1.0 : -1.0;  // R1 = -sqrt2 sech tanh
        out[j + J] = tj * val * sgn * std::pow(2.0, 0.5 * r);
    }
    return out;
}

}  // namespace

LogVal autonomous_melnikov(const Monomial& mono, double nu, double psi0) {
    if (mono.r() < 1) throw std::invalid_argument("monomial degree must be >= 1");
    if (!(nu > 0.0)) throw std::invalid_argument("nu must be > 0");
    auto g = harmonic_coeffs(mono, nu);
    const int J = mono.r() + 1;
    std::vector<LogTerm> terms;
    for (int j = -J; j <= J; ++j) {
        std::complex<double> c = g[j + J];
        double re = c.real() * std::cos(j * psi0) - c.imag() * std::sin(j * psi0);
        if (re == 0.0) continue;
        terms.push_back({std::log(std::fabs(re)), re > 0 ? 1.0 : -1.0});
    }
    return sum_log_terms(terms);
}

std::pair<int, double> autonomous_asymptotic_form(const Monomial& mono) {
    int p = mono.r() + mono.k();
    double mult = (mono.r() % 2 == 1) ? M_PI / 2.0 : M_PI;
    return {p, mult};
}

double autonomous_leading_amplitude(const Monomial& mono, double nu) {
    auto g = harmonic_coeffs(mono, nu);
    const int J = mono.r() + 1;
    int j_dom = (mono.r() % 2 == 1) ? 1 : 2;
    return 2.0 * std::abs(g[j_dom + J]);
}

AutonomousFit autonomous_fit(const std::vector<std::pair<double, double>>& samples,
                             bool freeze_c) {
    if (samples.size() < 6) throw std::invalid_argument("need at least 6 samples");
    // basis: nu, nu log nu, (1), nu^2; response nu*log(A1) (+pi/2 if frozen)
    const int dim = freeze_c ? 3 : 4;
    double A[4][4] = {};
    double rhs[4] = {};
    for (auto [nu, a1] : samples) {
        double y = nu * std::log(a1) + (freeze_c ? M_PI / 2.0 : 0.0);
        double base[4] = {nu, nu * std::log(nu), freeze_c ? nu * nu : 1.0,
                          nu * nu};
        for (int i = 0; i < dim; ++i) {
            rhs[i] += base[i] * y;
            for (int j = 0; j < dim; ++j) A[i][j] += base[i] * base[j];
        }
    }
    // gaussian elimination
    for (int i = 0; i < dim; ++i) {
        int piv = i;
        for (int k = i + 1; k < dim; ++k)
            if (std::fabs(A[k][i]) > std::fabs(A[piv][i])) piv = k;
        std::swap(A[i], A[piv]);
        std::swap(rhs[i], rhs[piv]);
        if (A[i][i] == 0.0) throw std::runtime_error("rank-deficient fit");
        for (int k = i + 1; k < dim; ++k) {
            double f = A[k][i] / A[i][i];
            for (int j = i; j < dim; ++j) A[k][j] -= f * A[i][j];
            rhs[k] -= f * rhs[i];
        }
    }
    double x[4] = {};
    for (int i = dim - 1; i >= 0; --i) {
        double acc = rhs[i];
        for (int j = i + 1; j < dim; ++j) acc -= A[i][j] * x[j];
        x[i] = acc / A[i][i];
    }
    AutonomousFit fit;
    fit.c_frozen = freeze_c;
    if (freeze_c) {
        fit.a = x[0]; fit.b = x[1]; fit.c = -M_PI / 2.0; fit.d = x[2];
    } else {
        fit.a = x[0]; fit.b = x[1]; fit.c = x[2]; fit.d = x[3];
    }
    return fit;
}

double duffing_Ic_residues(double d, double omega) {
    if (!(d > std::sqrt(2.0))) throw std::domain_error("duffing requires d > sqrt(2)");
    if (!(omega > 0.0)) throw std::domain_error("duffing requires omega > 0");
    double s0 = std::acos(std::sqrt(2.0) / d);
    double q = std::sqrt(2.0) * d / std::sqrt(d * d - 2.0);
    // 2 pi i/(1 - e^{-2pi w}) * sum of residues; the residues are purely
    // imaginary, so the result is real
    double sum_im = -q * std::exp(-omega * s0) + q * std::exp(omega * (s0 - 2 * M_PI))
                  + std::sqrt(2.0) * std::exp(-omega * M_PI / 2.0)
                  - std::sqrt(2.0) * std::exp(-3.0 * omega * M_PI / 2.0);
    return -2.0 * M_PI / (1.0 - std::exp(-2.0 * M_PI * omega)) * sum_im;
}

DuffingSeries duffing_Ic_series(double d, double omega, int max_terms) {
    if (!(d > std::sqrt(2.0))) throw std::domain_error("duffing requires d > sqrt(2)");
    std::vector<double> I(max_terms + 1, 0.0);
    I[1] = M_PI / std::cosh(omega * M_PI / 2.0);
    if (max_terms >= 2) I[2] = omega * M_PI / std::sinh(omega * M_PI / 2.0);
    for (int n = 3; n <= max_terms; ++n)
        I[n] = (omega * omega + (n - 2.0) * (n - 2.0)) / ((n - 1.0) * (n - 2.0)) * I[n - 2];
    DuffingSeries out;
    out.value = 0.0;
    out.largest_term_index = 2;
    const double factor = std::sqrt(2.0) / d;
    double pw = d * factor * factor;  // d (sqrt2/d)^k at k = 2
    double largest = 0.0;
    for (int k = 2; k <= max_terms; ++k) {
        double term = pw * I[k];
        out.terms.push_back(term);
        out.value += term;
        if (std::fabs(term) > largest) {
            largest = std::fabs(term);
            out.largest_term_index = k;
        }
        if (k > 4 && std::fabs(term) < 1e-18 * std::fabs(out.value) && term < largest)
            return out;
        pw *= factor;
    }
    throw std::runtime_error("duffing series truncation not convergent");
}

RegularityDominant regularity_dominant(const RegularityMode& mode, double c_small,
                                       double tau, double nu) {
    if (!(tau >= 1.0) || !(nu > 0.0))
        throw std::invalid_argument("regularity_dominant requires tau >= 1, nu > 0");
    RegularityDominant out;
    if (!mode.analytic) {
        if (!(mode.p >= 1.0)) throw std::invalid_argument("C^p case requires p >= 1");
        out.k_M = std::pow(c_small * tau / (nu * mode.p), 1.0 / tau);
        out.log_d_kM = -mode.p * std::log(out.k_M) - c_small / (nu * std::pow(out.k_M, tau));
    } else {
        if (!(mode.rho > 0.0)) throw std::invalid_argument("analytic case requires rho > 0");
        out.k_M = std::pow(c_small * tau * mode.rho / nu, 1.0 / (tau + 1.0));
        out.log_d_kM = -out.k_M / mode.rho - c_small / (nu * std::pow(out.k_M, tau));
    }
    return out;
}

}  // namespace hhsplit
