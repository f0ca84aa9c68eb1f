#include "hhsplit/melnikov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

namespace hhsplit {

namespace {

// log cosh(a) (odd) / log sinh(a) (even), a > 0, full double accuracy
double log_hyp(double a, bool odd) {
    if (a > 20.0) {
        double x = std::exp(-2.0 * a);
        return a - M_LN2 + std::log1p(odd ? x : -x);
    }
    return std::log(odd ? std::cosh(a) : std::sinh(a));
}

double binom_d(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * double(n - k + i) / double(i);
    return b;
}

}  // namespace

double fourier_c(int j, double c) {
    if (!(c > 1.0)) throw std::domain_error("fourier_c requires c > 1");
    if (j < 0) throw std::domain_error("fourier_c requires j >= 0");
    double c0 = 1.0 / std::sqrt(c * c - 1.0);
    if (j == 0) return c0;
    return 2.0 * c0 * std::pow(c + std::sqrt(c * c - 1.0), -j);
}

double taylor_d(int k, double d) {
    if (!(d > std::sqrt(2.0))) throw std::domain_error("taylor_d requires d > sqrt(2)");
    if (k < 0) throw std::domain_error("taylor_d requires k >= 0");
    return (5.0 + k) * std::pow(d, -(k + 1.0));
}

double cos_power_coeff(int m, int i) {
    if (m < 0 || i < 0 || 2 * i > m) throw std::out_of_range("a_{m,i} index");
    if (2 * i == m) return std::ldexp(binom_d(m, i), -m);
    return std::ldexp(binom_d(m, i), 1 - m);
}

double cos_power_sin_coeff(int m, int i) {
    if (m < 0 || i < 0 || 2 * i > m + 1) throw std::out_of_range("b_{m,i} index");
    return double(m + 1 - 2 * i) / (m + 1.0) * std::ldexp(binom_d(m + 1, i), -m);
}

double log_pi_poly(int r, double w) {
    if (r < 1) throw std::domain_error("pi_poly requires r >= 1");
    double lp = 0.0;
    for (int j = r - 2; j > 0; j -= 2) lp += std::log1p(j * w * (j * w));
    return lp;
}

double log_pi_poly_integral(int r, double w) {
    // (k-1)/2 (log(1+(k-1)^2 w^2) - 2) + atan((k-1)w)/w  with k = r
    double z = (r - 1.0) * w;
    return 0.5 * (r - 1.0) * (std::log1p(z * z) - 2.0) + std::atan(z) / w;
}

LogVal I1_log(double s, double nu, int n) {
    if (n < 1) throw std::domain_error("I1 requires n >= 1");
    if (!(nu > 0.0)) throw std::domain_error("I1 requires nu > 0");
    double as = std::fabs(s);
    bool odd = (n % 2 == 1);
    if (as == 0.0) {
        if (odd) {
            // P_{n-1}(0,nu) = ((n-2)!!)^2 nu^{n-1}
            double logP = 0.0;
            for (int j = n - 2; j > 0; j -= 2) logP += 2.0 * std::log(j * nu);
            return {std::log(M_PI) - n * std::log(nu) + logP - std::lgamma((double)n), 1};
        }
        // even n: the 1/sinh pole cancels against P; I1(0,nu,2) = 2/nu
        double lg = std::log(2.0 / nu);
        for (int m = 4; m <= n; m += 2) lg += std::log((m - 2.0) / (m - 1.0));
        return {lg, 1};
    }
    double arg = as * M_PI / (2.0 * nu);
    double logP = (n - 1) * std::log(as) + log_pi_poly(n, nu / as);
    double lg = std::log(M_PI) - n * std::log(nu) + logP - std::lgamma((double)n)
              - log_hyp(arg, odd);
    return {lg, 1};
}

LogVal I2_log(double s, double nu, int n) {
    if (n < 2) throw std::domain_error("I2 requires n >= 2");
    LogVal i1 = I1_log(s, nu, n - 1);
    double as = std::fabs(s);
    if (as == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    return {std::log(as / (nu * (n - 1))) + i1.log_mag, s > 0 ? 1 : -1};
}

double I1_value(double s, double nu, int n) { return I1_log(s, nu, n).value(); }
double I2_value(double s, double nu, int n) { return I2_log(s, nu, n).value(); }

HarmonicTerm harmonic_amplitude(long long m1, long long m2,
                                const PerturbationParams& p, int component) {
    return harmonic_amplitude_s(m1, m2, p.gamma.s_signed(m1, m2), p, component);
}

HarmonicTerm harmonic_amplitude_s(long long m1, long long m2, double s_signed,
                                  const PerturbationParams& p, int component) {
    if (m1 < 1) throw std::domain_error("harmonic requires m1 >= 1");
    if (component != 1 && component != 2) throw std::domain_error("component must be 1 or 2");
    double s = std::fabs(s_signed);
    if (s == 0.0) throw std::domain_error("resonant harmonic");
    const double nu = p.nu, d = p.d;
    const double arg = s * M_PI / (2.0 * nu);
    const double w = nu / s;

    // i-sum S_A via the exact term ratio
    //   A_i/A_{i-1} = (m1+2i)/(2(m1+2i-2)(m1+i)i) (s/(nu d))^2 (1+(m1+2i-2)^2 (nu/s)^2)
    // the sequence rises to a single interior maximum then decays (d > sqrt 2)
    long long i0 = 0;
    while (m1 + 2 * i0 < 5) ++i0;
    long long n0 = m1 + 2 * i0;
    // base term:
    //   2^{(n-2)/2} d_{n-5} b_{n-1,i} I1(s,nu,n), log form
    double base = 0.5 * (n0 - 2) * M_LN2
                + std::log((double)n0) - (n0 - 4) * std::log(d)
                + std::log((double)m1) - (n0 - 1) * M_LN2 - std::log((double)n0)
                + (std::lgamma((double)n0 + 1) - std::lgamma((double)i0 + 1)
                   - std::lgamma((double)(n0 - i0) + 1));
    // I1 with the hyperbolic factor pulled out (common to all i since parity is fixed)
    bool odd = (n0 % 2 == 1);
    double log_hyp_common = log_hyp(arg, odd);
    auto logI1_nohyp = [&](long long n, double logPi) {
        return std::log(M_PI) - n * std::log(nu) + (n - 1) * std::log(s) + logPi
             - std::lgamma((double)n);
    };
    double logPi = log_pi_poly((int)n0, w);
    double term = base + logI1_nohyp(n0, logPi);
    double tmax = term;
    double sum_scaled = 1.0;  // sum of exp(term - tmax)
    long long i = i0;
    bool decreasing = false;
    while (true) {
        ++i;
        long long n = m1 + 2 * i;
        double ratio = (double)n / (2.0 * (double)(n - 2) * (double)(m1 + i) * (double)i)
                     * (s / (nu * d)) * (s / (nu * d))
                     * (1.0 + std::pow((double)(n - 2) * w, 2));
        term += std::log(ratio);
        if (ratio < 1.0) decreasing = true;
        if (term > tmax) {
            sum_scaled = sum_scaled * std::exp(tmax - term) + 1.0;
            tmax = term;
        } else {
            sum_scaled += std::exp(term - tmax);
            if (decreasing && term - tmax < std::log(1e-16)) break;
        }
        if (i > 100000000LL) throw std::runtime_error("S_A sum did not terminate");
    }
    double log_SA_terms = tmax + std::log(sum_scaled);  // includes the base prefactors

    double lc = std::fabs((double)m2) * std::log(p.rho_c());
    double log_cm2 = (m2 == 0)
        ? std::log(fourier_c(0, p.c)) + M_LN2   // both l = +-1 branches coincide
        : std::log(2.0 * fourier_c(0, p.c)) - lc;

    HarmonicTerm t;
    t.m1 = (int)m1;
    t.m2 = m2;
    t.component = component;
    t.s_abs = s;
    t.L = nu * (double)m1 / s;
    t.log_amp = log_cm2 + log_SA_terms - log_hyp_common;
    t.sign = 1;
    if (component == 2) {
        t.log_amp += std::log(s) - std::log(nu) - std::log((double)m1);  // = log(1/L)
        t.sign = (s_signed > 0) ? -1 : 1;
    }
    if (std::isinf(t.log_amp) && t.log_amp > 0)
        throw std::overflow_error("harmonic amplitude overflow in log space");
    return t;
}

SplittingSeries build_series(const PerturbationParams& p, int component,
                             const HarmonicBudget& budget) {
    p.validate();
    const double gamma = p.gamma.value_d();
    // origin bit 1: low-order rectangle; bit 2: best-approximant family
    std::map<std::pair<long long, long long>, int> cand;

    // contiguous rectangle of low-order modes
    const int rect_m1 = budget.max_m1_scan;
    for (int m1 = 1; m1 <= rect_m1; ++m1) {
        long long hi = (long long)std::ceil(m1 / gamma) + budget.m2_margin;
        for (long long m2 = -budget.m2_margin; m2 <= hi; ++m2)
            cand[{m1, m2}] |= 1;
    }
    // best-approximant families: (N, D), low multiples and semiconvergents
    auto quot = p.gamma.quotients(budget.max_approximants + 2);
    auto apps = p.gamma.best_approximants(budget.max_approximants);
    for (size_t n = 1; n < apps.size(); ++n) {
        if (!apps[n].N.fits_slong_p() || !apps[n].D.fits_slong_p()) break;
        long long N = apps[n].N.get_si(), D = apps[n].D.get_si();
        if (N < 1) continue;
        double L = apps[n].c_s * p.nu * (double)N * (double)N;
        if (L < 1e-6 || L > 1e6) continue;
        for (int mult = 1; mult <= 3; ++mult)
            cand[{mult * N, mult * D}] |= 2;
        if (n + 1 < apps.size() && n >= 1) {
            long long Np = apps[n - 1].N.get_si(), Dp = apps[n - 1].D.get_si();
            for (long long k = 1; k < quot[n + 1]; ++k)
                cand[{k * N + Np, k * D + Dp}] |= 2;
        }
    }

    // cheap upper bound on log C used to prune the far-off-resonance bulk of
    // the rectangle: peak i-term estimated from the closed-form maximizer with
    // the integral form of log Pi, padded by its error and a width factor
    auto log_amp_upper = [&](long long m1, double s) {
        const double nu = p.nu, d = p.d;
        double L = nu * (double)m1 / s;
        double A = 2.0 * d * d - 4.0;
        double Istar = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * (1.0 + 1.0 / (L * L)) / A));
        long long i0 = 0;
        while (m1 + 2 * i0 < 5) ++i0;
        long long ipk = std::max(i0, (long long)std::llround(Istar * (double)m1));
        long long n = m1 + 2 * ipk;
        double w = nu / s;
        double logPi = log_pi_poly_integral((int)std::min<long long>(n, 1000000000LL), w);
        logPi += 2.0 + std::fabs(logPi) * 2.0 / (double)n;  // approximation slack
        double lt = 0.5 * (n - 2) * M_LN2 - (n - 4) * std::log(d)
                  + std::log((double)m1) - (n - 1) * M_LN2
                  + std::lgamma((double)n + 1) - std::lgamma((double)ipk + 1)
                  - std::lgamma((double)(n - ipk) + 1)
                  + std::log(M_PI) - n * std::log(nu) + (n - 1) * std::log(s) + logPi
                  - std::lgamma((double)n) - s * M_PI / (2.0 * nu);
        double width = std::log((double)(2 * ipk + 32));
        return lt + width + 4.0;
    };

    struct Tagged { HarmonicTerm t; int origin; };
    std::vector<Tagged> terms;
    double best = -std::numeric_limits<double>::infinity();
    // resonant candidates first so `best` is established before pruning
    std::vector<std::pair<std::pair<long long, long long>, int>> ordered(cand.begin(),
                                                                         cand.end());
    std::stable_sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
        double sa = std::fabs((double)a.first.first - gamma * (double)a.first.second);
        double sb = std::fabs((double)b.first.first - gamma * (double)b.first.second);
        return sa < sb;
    });
    const double log_tol = std::log(budget.rel_tol);
    for (const auto& [key, origin] : ordered) {
        auto [m1, m2] = key;
        if (m1 < 1) continue;
        double s = p.gamma.s_signed(m1, m2);
        if (s == 0.0) continue;
        double sa = std::fabs(s);
        if (std::isfinite(best)) {
            double ub = log_amp_upper(m1, sa) - std::fabs((double)m2) * std::log(p.rho_c())
                      + (component == 2 ? std::fabs(std::log(sa / (p.nu * (double)m1))) : 0.0);
            if (ub < best + log_tol - 8.0) continue;
        }
        HarmonicTerm t = harmonic_amplitude_s(m1, m2, s, p, component);
        best = std::max(best, t.log_amp);
        terms.push_back({t, origin});
    }
    const double cut = best + std::log(budget.rel_tol);
    std::vector<HarmonicTerm> kept;
    for (auto& [t, origin] : terms) {
        if (t.log_amp < cut) continue;
        // a retained rectangle-only mode on the scan boundary means the
        // 1e-10 frontier did not close inside the budget
        if (origin == 1 && t.m1 == rect_m1)
            throw std::runtime_error(
                "harmonic budget exhausted: retained mode at m1 = " +
                std::to_string(t.m1) + " on the scan boundary (log-amp frontier " +
                std::to_string(t.log_amp - best) + ")");
        kept.push_back(t);
    }
    std::sort(kept.begin(), kept.end(), [](const HarmonicTerm& a, const HarmonicTerm& b) {
        if (a.log_amp != b.log_amp) return a.log_amp > b.log_amp;
        if (a.m1 != b.m1) return a.m1 < b.m1;
        return std::llabs(a.m2) < std::llabs(b.m2);
    });
    SplittingSeries s;
    s.component = component;
    s.params = p;
    s.terms = std::move(kept);
    s.truncation_rel_tol = budget.rel_tol;
    return s;
}

double evaluate_scaled(const SplittingSeries& s, double psi0, double theta0,
                       double& log_ref) {
    if (s.terms.empty()) throw std::runtime_error("empty series");
    log_ref = s.terms.front().log_amp;
    double sum = 0.0, comp = 0.0;  // Kahan
    for (const auto& t : s.terms) {
        double v = t.sign * std::exp(t.log_amp - log_ref)
                 * std::sin(t.m1 * psi0 - (double)t.m2 * theta0);
        double y = v - comp;
        double u = sum + y;
        comp = (u - sum) - y;
        sum = u;
    }
    return sum;
}

double evaluate(const SplittingSeries& s, double psi0, double theta0) {
    double log_ref;
    double v = evaluate_scaled(s, psi0, theta0, log_ref);
    return s.params.eps * v * std::exp(log_ref);
}

double amplitude_sup_log(const SplittingSeries& s) {
    if (s.terms.empty()) throw std::runtime_error("empty series");
    double log_ref = s.terms.front().log_amp;
    if (s.terms.size() == 1)
        return std::log(s.params.eps) + log_ref;
    // per-term dominance bound (upper estimate)
    double bound = 0.0;
    for (const auto& t : s.terms) bound += std::exp(t.log_amp - log_ref);
    // 256x256 confirmation grid plus local coordinate-ascent refinement
    const int n = 256;
    double mx = 0.0, bp = 0.0, bt = 0.0;
    for (int i = 0; i < n; ++i) {
        double psi0 = 2.0 * M_PI * i / n;
        for (int j = 0; j < n; ++j) {
            double theta0 = 2.0 * M_PI * j / n;
            double lr;
            double v = std::fabs(evaluate_scaled(s, psi0, theta0, lr));
            if (v > mx) { mx = v; bp = psi0; bt = theta0; }
        }
    }
    double lr;
    double h = 2.0 * M_PI / n;
    for (int it = 0; it < 24 && h > 1e-12; ++it) {
        bool moved = false;
        for (auto [dp, dt] : {std::pair{h, 0.0}, {-h, 0.0}, {0.0, h}, {0.0, -h}}) {
            double v = std::fabs(evaluate_scaled(s, bp + dp, bt + dt, lr));
            if (v > mx) { mx = v; bp += dp; bt += dt; moved = true; }
        }
        if (!moved) h *= 0.5;
    }
    mx = std::min(mx, bound);
    return std::log(s.params.eps) + log_ref + std::log(mx);
}

std::vector<ScanRow> scan_amplitudes(PerturbationParams base, double log2_lo,
                                     double log2_hi, double log2_step,
                                     const HarmonicBudget& budget, int threads) {
    if (log2_step <= 0.0) throw std::invalid_argument("log2_step must be > 0");
    int count = log2_hi < log2_lo ? 0
              : (int)std::floor((log2_hi - log2_lo) / log2_step + 1e-9) + 1;
    std::vector<ScanRow> rows(count);
    // warm the frequency caches before going parallel
    base.gamma.value(320);
    base.gamma.best_approximants(budget.max_approximants);
    auto work = [&](int lo, int hi) {
        for (int k = lo; k < hi; ++k) {
            double l2 = log2_lo + k * log2_step;
            PerturbationParams p = base;
            p.nu = std::exp2(l2);
            ScanRow& r = rows[k];
            r.log2_nu = l2;
            for (int comp = 1; comp <= 2; ++comp) {
                SplittingSeries s = build_series(p, comp, budget);
                r.sqrt_nu_log_amp[comp - 1] =
                    std::sqrt(p.nu) * (amplitude_sup_log(s) - std::log(p.eps));
                r.m1_dom[comp - 1] = s.dominant().m1;
                r.m2_dom[comp - 1] = s.dominant().m2;
                if (comp == 1) r.n_terms = (int)s.terms.size();
            }
        }
    };
    threads = std::max(1, std::min(threads, count == 0 ? 1 : count));
    if (threads == 1) {
        work(0, count);
    } else {
        std::vector<std::thread> pool;
        int chunk = (count + threads - 1) / threads;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(work, t * chunk, std::min(count, (t + 1) * chunk));
        for (auto& th : pool) th.join();
    }
    return rows;
}

}  // namespace hhsplit
