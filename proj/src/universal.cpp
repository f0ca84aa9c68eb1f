#include "hhsplit/universal.hpp"

#include <algorithm>
#include <cmath>

namespace hhsplit {

PsiEvaluation psi1(double L, const PerturbationParams& p) {
    if (!(L > 0.0)) throw std::domain_error("psi1 requires L > 0");
    if (!(p.d > std::sqrt(2.0))) throw std::domain_error("psi1 requires d > sqrt(2)");
    const double d = p.d;
    const double K = p.K();
    const double A = 2.0 * d * d - 4.0;
    // positive root of (2d^2-4)(I^2+I) - 1 = 1/L^2
    const double I = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * (1.0 + 1.0 / (L * L)) / A));
    const double z = (1.0 + 2.0 * I) * L;
    double p11 = -(K + std::log(L) + PerturbationParams::B / L);
    double p12 = -2.0 * I * std::log(L * d) - (1.0 + I) * std::log1p(I)
               - I * std::log(I) + I * (2.0 - M_LN2)
               + 0.5 * (1.0 + 2.0 * I) * (std::log1p(z * z) - 2.0)
               + std::atan(z) / L;
    PsiEvaluation e;
    e.L = L;
    e.I_star = I;
    double sL = std::sqrt(L);
    e.psi11 = sL * p11;
    e.psi12 = sL * p12;
    e.psi1 = e.psi11 + e.psi12;
    return e;
}

double psi2(double L, int m1, const PerturbationParams& p) {
    if (m1 < 1) throw std::domain_error("psi2 requires m1 >= 1");
    return psi1(L, p).psi2_for(m1);
}

namespace {

// golden-section maximization of f on [a, b]
template <class F>
double golden_max(F&& f, double a, double b, double tol) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 > f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - phi * (b - a); f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + phi * (b - a); f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

template <class F>
double bisect(F&& f, double lo, double hi, int iters = 100) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw std::runtime_error("no change in range");
    for (int i = 0; i < iters; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) { lo = mid; flo = fm; }
        else { hi = mid; fhi = fm; }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

PsiMax psi1_max(const PerturbationParams& p) {
    auto f = [&](double L) { return psi1(L, p).psi1; };
    double L = golden_max(f, 1e-3, 10.0, 1e-6);
    L = golden_max(f, L * 0.8, L * 1.25, 1e-11);
    return {L, f(L)};
}

GoldenChangeConstants golden_change_constants(const PerturbationParams& p) {
    const double g = p.gamma.value_d();
    const double K = p.K();
    GoldenChangeConstants out;
    // prefactor-only closed loop, damped fixed-point iteration
    double L = 0.2;
    for (int i = 0; i < 200; ++i) {
        double next = (M_PI * g / (2.0 * (1.0 + g))) /
                      (2.0 * (1.0 + g) * std::log1p(g) + K * g + g * std::log(L));
        L = 0.5 * (L + next);
    }
    out.L_l_prefactor = L;
    const double cinf = 3.0 + g;
    auto psih = [&](double Lt) { return psi1(Lt * cinf, p).psi1 / std::sqrt(cinf); };
    double r2 = (1.0 + g) * (1.0 + g);
    out.Lt_l_full = bisect([&](double Lt) { return psih(Lt) - psih(Lt * r2); },
                           0.01, 0.0725);
    out.psi_hat_at_change = psih(out.Lt_l_full);
    auto m = psi1_max(p);
    out.Lt_max = m.L_M / cinf;
    out.psi_hat_max = m.Psi_M / std::sqrt(cinf);
    return out;
}

std::vector<ChangePoint> change_points(const Frequency& f, PerturbationParams p,
                                       double nu_lo, double nu_hi, int component,
                                       ChangeMode mode) {
    p.validate();
    if (component != 1 && component != 2)
        throw std::domain_error("component must be 1 or 2");
    // enough approximants that the deepest family is dominant below nu_lo
    auto apps = f.best_approximants(128);
    std::vector<Approximant> fams;
    for (auto& a : apps)
        if (a.N >= 1 && a.N.fits_slong_p()) fams.push_back(a);

    const double K = p.K();
    // score(nu, approximant) in sqrt(nu) log C units (additive constants drop
    // out at equality, modes differ in how much of log C they keep)
    auto score = [&](const Approximant& a, double nu) -> double {
        long long N = a.N.get_si(), D = a.D.get_si();
        double L = a.c_s * nu * (double)N * (double)N;
        switch (mode) {
            case ChangeMode::prefactor_only:
                return -(double)N * (K + std::log(L) + PerturbationParams::B / L);
            case ChangeMode::full_psi:
                return psi1(L, p).psi1 / std::sqrt(a.c_s)
                     - (component == 2 ? std::sqrt(nu) * std::log(L) : 0.0);
            case ChangeMode::melnikov: {
                PerturbationParams q = p;
                q.nu = nu;
                double s = a.s_signed.get_d();
                return harmonic_amplitude_s(N, D, s, q, component).log_amp;
            }
        }
        return 0.0;
    };
    // dominant family at fixed nu
    auto argmax = [&](double nu) {
        size_t best = 0;
        double bv = -std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < fams.size(); ++k) {
            long long N = fams[k].N.get_si();
            double L = fams[k].c_s * nu * (double)N * (double)N;
            if (L < 1e-8 || L > 1e8) continue;
            double v = score(fams[k], nu);
            if (v > bv) { bv = v; best = k; }
        }
        return best;
    };

    std::vector<ChangePoint> out;
    double lnu_hi = std::log(nu_hi), lnu_lo = std::log(nu_lo);
    size_t cur = argmax(nu_hi);
    double edge = lnu_hi;
    while (edge > lnu_lo) {
        // march down in log nu until the dominant family switches
        const double step = 0.05;
        double l = edge;
        size_t nxt = cur;
        while (l > lnu_lo) {
            l = std::max(l - step, lnu_lo);
            nxt = argmax(std::exp(l));
            if (nxt != cur) break;
        }
        if (nxt == cur) break;
        double root = bisect([&](double ln) {
            double nu = std::exp(ln);
            return score(fams[cur], nu) - score(fams[nxt], nu);
        }, l, std::min(l + step, lnu_hi));
        ChangePoint cp;
        cp.from = fams[cur];
        cp.to = fams[nxt];
        cp.nu = std::exp(root);
        cp.component = component;
        long long N = fams[cur].N.get_si();
        cp.L_at_change = fams[cur].c_s * cp.nu * (double)N * (double)N;
        out.push_back(cp);
        cur = nxt;
        edge = root;
    }
    return out;
}

ChangeAsymptotics change_asymptotics(const Frequency& f, PerturbationParams p,
                                     double nu_lo, double nu_hi) {
    auto c1 = change_points(f, p, nu_lo, nu_hi, 1, ChangeMode::melnikov);
    auto c2 = change_points(f, p, nu_lo, nu_hi, 2, ChangeMode::melnikov);
    if (c1.size() < 2) throw std::runtime_error("insufficient change points");
    ChangeAsymptotics out;
    const double g = f.value_d();
    // K_hat from the last changes: nu_j ~ gamma^{2j} K_hat, with j the index
    // of the `from` numerator in the approximant sequence shifted so that the
    // golden case matches the Fibonacci labelling F_1=1, F_2=2, ...
    double acc = 0.0;
    int used = 0;
    for (size_t k = c1.size() >= 6 ? c1.size() - 6 : 0; k < c1.size(); ++k) {
        int j = c1[k].from.n - 1;  // golden: N_n = F_{n-1} with F_1=1, F_2=2
        acc += c1[k].nu * std::pow(g, -2.0 * j);
        ++used;
    }
    out.K_hat = acc / used;
    double rsum = 0.0, gsum = 0.0;
    for (size_t k = 1; k < c1.size(); ++k) {
        rsum += c1[k].nu / c1[k - 1].nu;
        gsum += std::log2(c1[k].nu) - std::log2(c1[k - 1].nu);
    }
    out.ratio = rsum / (double)(c1.size() - 1);
    out.log2_gap = gsum / (double)(c1.size() - 1);
    // pair component-1/component-2 changes with the same `from` approximant
    for (const auto& a : c1) {
        for (const auto& b : c2) {
            if (a.from.n == b.from.n) {
                double nm = 0.5 * (a.nu + b.nu);
                out.coeff.push_back((a.nu - b.nu) / std::pow(nm, 1.5));
            }
        }
    }
    return out;
}

}  // namespace hhsplit
