#include "hhsplit/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace hhsplit {

namespace {

// floor((P + sqrt(R))/Q) with R > 0 not a perfect square, exact
mpz_class floor_surd(const mpz_class& P, const mpz_class& R, const mpz_class& Q) {
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), R.get_mpz_t());  // floor(sqrt(R))
    mpz_class q;
    if (Q > 0) {
        mpz_class num = P + r;
        mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), Q.get_mpz_t());
    } else {
        // value = -(P + sqrt(R))/|Q|; floor = -(floor((P+floor sqrt R)/|Q|) + 1)
        mpz_class absQ = -Q;
        mpz_class num = P + r;
        mpz_class f;
        mpz_fdiv_q(f.get_mpz_t(), num.get_mpz_t(), absQ.get_mpz_t());
        q = -(f + 1);
    }
    return q;
}

long long to_ll(const mpz_class& z) {
    if (!z.fits_slong_p())
        throw std::overflow_error("CFE quotient exceeds 64 bits");
    return z.get_si();
}

}  // namespace

Frequency Frequency::quadratic_surd(const mpz_class& p, const mpz_class& q,
                                    const mpz_class& r, const mpz_class& s,
                                    const mpz_class& D, std::string name) {
    // rationalize: (p + q sqrt D)/(r + s sqrt D) = (a + b sqrt D)/c
    mpz_class a = p * r - q * s * D;
    mpz_class b = q * r - p * s;
    mpz_class c = r * r - s * s * D;
    if (c == 0) throw std::invalid_argument("zero denominator in surd");
    if (b == 0) throw std::invalid_argument("rational frequency");
    // to (P + sqrt(R))/Q form: multiply by sign(b) pattern -> P = a*b', ...
    // (a + b sqrt D)/c = (a*k + sqrt(b^2 k^2 D))/(c*k) with k = sign(b)
    int k = sgn(b);
    mpz_class P = a * k;
    mpz_class Q = c * k;
    mpz_class R = b * b * D;
    // enforce Q | (R - P^2)
    mpz_class rem = (R - P * P) % Q;
    if (rem != 0) {
        P *= abs(Q);
        R *= Q * Q;
        Q *= abs(Q);
    }
    Frequency f;
    f.surd_ = Surd{P, Q, R};
    f.name_ = std::move(name);
    return f;
}

Frequency Frequency::explicit_quotients(std::vector<long long> prefix,
                                        std::function<long long(int)> rule,
                                        std::string name) {
    if (prefix.empty() && !rule) throw std::invalid_argument("empty quotient spec");
    Frequency f;
    f.prefix_ = std::move(prefix);
    f.rule_ = std::move(rule);
    f.name_ = std::move(name);
    return f;
}

Frequency Frequency::golden() {
    return quadratic_surd(-1, 1, 2, 0, 5, "golden");
}

Frequency Frequency::case1() {
    // (55(1+b)+34)/(89(1+b)+55), b = (sqrt(122)-10)/11
    return quadratic_surd(429, 55, 694, 89, 122, "case1");
}

Frequency Frequency::case2() {
    // (55(1+b)+34)/(89(1+b)+55), b = (sqrt(140)-10)/20
    return quadratic_surd(1230, 55, 1990, 89, 140, "case2");
}

Frequency Frequency::case3() {
    // [0; 1 x10, 2, 3, 4, ...]
    return explicit_quotients({0}, [](int j) { return j <= 10 ? 1LL : (long long)(j - 9); },
                              "case3");
}

Frequency Frequency::e_minus_2() {
    // [0; 1, 2, 1, 1, 4, 1, 1, 6, ...]: q_j = 2(j+1)/3 when j = 2 (mod 3)
    return explicit_quotients({0}, [](int j) {
        return (j % 3 == 2) ? (long long)(2 * (j + 1) / 3) : 1LL;
    }, "e-minus-2");
}

Frequency Frequency::gamma1() {
    // [0; 1, 2, 3, 4, ...]
    return explicit_quotients({0}, [](int j) { return (long long)j; }, "gamma1");
}

Frequency Frequency::named(const std::string& spec) {
    if (spec == "golden") return golden();
    if (spec == "case1") return case1();
    if (spec == "case2") return case2();
    if (spec == "case3") return case3();
    if (spec == "e-minus-2") return e_minus_2();
    if (spec == "gamma1") return gamma1();
    auto parse_list = [](const std::string& body) {
        std::vector<mpz_class> vals;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) vals.emplace_back(item);
        return vals;
    };
    if (spec.rfind("surd:", 0) == 0) {
        auto v = parse_list(spec.substr(5));
        if (v.size() != 4) throw std::invalid_argument("surd spec needs a,b,c,D");
        return quadratic_surd(v[0], v[1], v[2], 0, v[3], spec);
    }
    if (spec.rfind("quotients:", 0) == 0) {
        auto v = parse_list(spec.substr(10));
        if (v.empty()) throw std::invalid_argument("empty quotient list");
        std::vector<long long> pre;
        for (auto& z : v) pre.push_back(to_ll(z));
        long long last = pre.back();
        // periodic continuation of the final quotient
        return explicit_quotients(pre, [last](int) { return last; }, spec);
    }
    throw std::invalid_argument("unknown frequency spec: " + spec);
}

void Frequency::extend_quotients(int count) const {
    if ((int)cached_quotients_.size() >= count) return;
    if (surd_) {
        // run the exact algorithm from scratch (cheap; quotient state not kept)
        mpz_class P = surd_->P, Q = surd_->Q, R = surd_->R;
        cached_quotients_.clear();
        for (int j = 0; j < count; ++j) {
            mpz_class q = floor_surd(P, R, Q);
            cached_quotients_.push_back(to_ll(q));
            mpz_class Pn = q * Q - P;
            mpz_class Qn = (R - Pn * Pn) / Q;
            if (Qn == 0) throw std::domain_error("rational frequency");
            P = Pn;
            Q = Qn;
        }
    } else {
        for (int j = (int)cached_quotients_.size(); j < count; ++j) {
            long long q = j < (int)prefix_.size() ? prefix_[j] : rule_(j);
            if (j >= 1 && q < 1) throw std::domain_error("rational frequency");
            cached_quotients_.push_back(q);
        }
    }
}

std::vector<long long> Frequency::quotients(int count) const {
    if (count < 1) throw std::invalid_argument("count must be >= 1");
    extend_quotients(count);
    return {cached_quotients_.begin(), cached_quotients_.begin() + count};
}

mpf_class Frequency::value(unsigned bits) const {
    if (cached_bits_ >= bits) return cached_value_;
    mpf_class v(0, bits + 64);
    if (surd_) {
        mpf_class sq(0, bits + 64);
        mpf_class Rf(surd_->R, bits + 64);
        mpf_sqrt(sq.get_mpf_t(), Rf.get_mpf_t());
        v = (mpf_class(surd_->P, bits + 64) + sq) / mpf_class(surd_->Q, bits + 64);
    } else {
        // evaluate a convergent deep enough that the tail is below 2^-(bits+16)
        mpz_class Nm1 = 1, Dm1 = 0, Nc = 0, Dc = 1;
        int j = 0;
        extend_quotients(8);
        Nc = (long)cached_quotients_[0];
        while (true) {
            ++j;
            extend_quotients(j + 1);
            mpz_class q((long)cached_quotients_[j]);
            mpz_class Nn = q * Nc + Nm1, Dn = q * Dc + Dm1;
            Nm1 = Nc; Dm1 = Dc; Nc = Nn; Dc = Dn;
            if (mpz_sizeinbase(Dc.get_mpz_t(), 2) + mpz_sizeinbase(Dm1.get_mpz_t(), 2)
                    > bits + 16)
                break;
            if (j > 100000) throw std::runtime_error("convergents stalled");
        }
        v = mpf_class(Nc, bits + 64) / mpf_class(Dc, bits + 64);
    }
    cached_value_ = v;
    cached_bits_ = bits;
    return v;
}

double Frequency::value_d() const { return value(128).get_d(); }

double Frequency::s_signed(long long m1, long long m2) const {
    if (!g_dd_ready_) {
        mpf_class g = value(160);
        g_hi_ = g.get_d();
        g_lo_ = mpf_class(g - g_hi_).get_d();
        g_dd_ready_ = true;
    }
    // m1 - gamma*m2 in double-double: exact products via fma
    double p = g_hi_ * (double)m2;
    double e = std::fma(g_hi_, (double)m2, -p);
    double hi = (double)m1 - p;
    // |m1 - p| is tiny compared to p for near-resonant pairs: the subtraction
    // is exact by Sterbenz when within a factor of two, and harmless otherwise
    double lo = -e - g_lo_ * (double)m2;
    return hi + lo;
}

std::vector<Approximant> Frequency::best_approximants(int count) const {
    if (count < 1) throw std::invalid_argument("count must be >= 1");
    extend_quotients(count + 1);
    // precision: need gamma accurate beyond 1/(D_{n} D_{n+1})
    mpz_class Nm1 = 1, Dm1 = 0, Nc = 0, Dc = 1;
    std::vector<std::pair<mpz_class, mpz_class>> nd;
    nd.reserve(count);
    for (int n = 0; n < count; ++n) {
        if (n == 0) {
            Nc = (long)cached_quotients_[0];
            Dc = 1;
        } else {
            mpz_class q((long)cached_quotients_[n]);
            mpz_class Nn = q * Nc + Nm1, Dn = q * Dc + Dm1;
            Nm1 = Nc; Dm1 = Dc; Nc = Nn; Dc = Dn;
        }
        nd.emplace_back(Nc, Dc);
    }
    unsigned bits = 2 * (unsigned)mpz_sizeinbase(nd.back().second.get_mpz_t(), 2) + 192;
    mpf_class g = value(bits);
    std::vector<Approximant> out;
    out.reserve(count);
    for (int n = 0; n < count; ++n) {
        Approximant a;
        a.n = n;
        a.N = nd[n].first;
        a.D = nd[n].second;
        mpf_class s(0, bits);
        s = mpf_class(a.N, bits) - g * mpf_class(a.D, bits);
        a.s_signed = s;
        mpf_class as = abs(s);
        if (a.N != 0) a.c_s = mpf_class(1 / (mpf_class(a.N, bits) * as)).get_d();
        a.c_hat = mpf_class(1 / (mpf_class(a.D, bits) * as)).get_d();
        out.push_back(std::move(a));
    }
    return out;
}

double Frequency::q_plus(int n) const {
    // [q_{n+1}; q_{n+2}, ...] from 48 tail quotients, back-substituted
    int depth = 48;
    extend_quotients(n + depth + 2);
    double x = (double)cached_quotients_[n + depth + 1];
    for (int j = n + depth; j >= n + 1; --j)
        x = (double)cached_quotients_[j] + 1.0 / x;
    return x;
}

std::pair<int, int> Frequency::cfe_period() const {
    if (!surd_) throw std::domain_error("limits undefined; use c_s per approximant");
    // rerun the algorithm keeping (P,Q) states; period = first revisit
    mpz_class P = surd_->P, Q = surd_->Q, R = surd_->R;
    std::vector<std::pair<mpz_class, mpz_class>> seen;
    for (int j = 0; j < 4096; ++j) {
        for (int k = 0; k < (int)seen.size(); ++k) {
            if (seen[k].first == P && seen[k].second == Q)
                return {k, j - k};
        }
        seen.emplace_back(P, Q);
        mpz_class q = floor_surd(P, R, Q);
        mpz_class Pn = q * Q - P;
        mpz_class Qn = (R - Pn * Pn) / Q;
        P = Pn;
        Q = Qn;
    }
    throw std::runtime_error("CFE period not found within 4096 quotients");
}

DiophantineProfile diophantine_profile(const Frequency& f, int n_lo, int n_hi) {
    if (n_lo < 2) n_lo = 2;  // phi needs D_n >= 3 and log log D_n > 0
    auto apps = f.best_approximants(n_hi + 1);
    DiophantineProfile prof;
    prof.min_value = std::numeric_limits<double>::infinity();
    for (int n = n_lo; n <= n_hi; ++n) {
        const auto& a = apps[n];
        // q_{-,n} = D_n / D_{n-1}
        mpf_class qm(0, 128);
        qm = mpf_class(a.D, 128) / mpf_class(apps[n - 1].D, 128);
        double chat = f.q_plus(n) + 1.0 / qm.get_d();
        long exp2 = 0;
        double m = mpz_get_d_2exp(&exp2, a.D.get_mpz_t());
        double logD = std::log(m) + (double)exp2 * std::log(2.0);
        double pi_n = (logD / std::log(logD)) / chat;
        prof.values.emplace_back(n, pi_n);
        if (pi_n < prof.min_value) {
            prof.min_value = pi_n;
            prof.argmin = n;
        }
    }
    return prof;
}

CsLimits c_s_limits(const Frequency& f, int horizon) {
    auto [pre, period] = f.cfe_period();  // throws for non-quadratic
    if (horizon < pre + 6 * period) horizon = pre + 6 * period;
    auto apps = f.best_approximants(horizon + 1);
    CsLimits out;
    out.period = period;
    out.limits.assign(period, 0.0);
    out.residue_of.assign(period, 0);
    for (int r = 0; r < period; ++r) {
        int n = horizon - (horizon - r) % period;          // largest n = r (mod period)
        double v1 = apps[n].c_s;
        double v0 = apps[n - period].c_s;
        if (std::fabs(v1 - v0) > 1e-8 * std::max(1.0, std::fabs(v1)))
            throw std::runtime_error("c_s limits not converged at requested horizon");
        out.limits[r] = v1;
        out.residue_of[r] = n;
    }
    return out;
}

double dominance_scale_from_physical(double nu, double rho1, double rho2, double gamma) {
    double rho = rho1 + rho2 / gamma;
    return nu * rho / ((M_PI / 2.0) * gamma);
}

DominanceReport dominance_analysis(const Frequency& f, double nu_lo, double nu_hi,
                                   int max_order) {
    if (!(nu_lo > 0.0) || !(nu_hi > nu_lo) || nu_hi >= 1.0)
        throw std::invalid_argument("nu range must satisfy 0 < lo < hi < 1");
    auto apps = f.best_approximants(max_order + 1);
    DominanceReport rep;
    struct Tn { int n; double N; double invNc; };  // T_n(nu) = N + invNc/nu
    std::vector<Tn> ts;
    for (const auto& a : apps) {
        if (a.N < 1) continue;
        double N = a.N.get_d();
        ts.push_back({a.n, N, 1.0 / (N * a.c_hat)});
        rep.considered.push_back(a);
    }
    auto argmin = [&](double nu) {
        int best = 0;
        double bv = ts[0].N + ts[0].invNc / nu;
        for (int k = 1; k < (int)ts.size(); ++k) {
            double v = ts[k].N + ts[k].invNc / nu;
            if (v < bv) { bv = v; best = k; }
        }
        return best;
    };
    // coverage check: the envelope minimizer at nu_lo must not be the deepest
    // approximant available, otherwise the scan is not covered
    if (argmin(nu_lo) == (int)ts.size() - 1)
        throw std::runtime_error("max_order too small: envelope not covered below nu = " +
                                 std::to_string(nu_lo));
    // walk the full lower envelope downward from nu = infinity (minimizer:
    // smallest N) until the scan floor; an approximant is hidden when it never
    // appears on the envelope at all
    std::vector<int> env_idx;
    std::vector<std::pair<double, double>> env_iv;  // (lo, hi) of dominance
    int cur = 0;
    for (int k = 1; k < (int)ts.size(); ++k)
        if (ts[k].N < ts[cur].N) cur = k;
    double hi_edge = std::numeric_limits<double>::infinity();
    double nu = 1.0;
    while (true) {
        double best_cross = 0.0;
        int nxt = -1;
        for (int j = 0; j < (int)ts.size(); ++j) {
            if (j == cur || ts[j].N <= ts[cur].N) continue;  // moves to larger N
            double cross = (ts[cur].invNc - ts[j].invNc) / (ts[j].N - ts[cur].N);
            if (cross > 0.0 && cross < hi_edge && cross > best_cross) {
                best_cross = cross;
                nxt = j;
            }
        }
        if (nxt < 0 || best_cross <= nu_lo * 1e-3) {
            env_idx.push_back(cur);
            env_iv.emplace_back(0.0, hi_edge);
            break;
        }
        env_idx.push_back(cur);
        env_iv.emplace_back(best_cross, hi_edge);
        rep.crossings.push_back({ts[cur].n, ts[nxt].n, best_cross});
        hi_edge = best_cross;
        cur = nxt;
        nu = best_cross;
    }
    (void)nu;
    std::vector<char> on_scan(ts.size(), 0);
    for (size_t k = 0; k < env_idx.size(); ++k) {
        double lo = env_iv[k].first, hi = env_iv[k].second;
        if (lo < nu_hi && hi > nu_lo) {
            on_scan[env_idx[k]] = 1;
            DominanceReport::Entry e;
            e.app = apps[ts[env_idx[k]].n];
            e.nu_lo = std::max(lo, nu_lo);
            e.nu_hi = std::min(hi, nu_hi);
            rep.visible.push_back(std::move(e));
        }
    }
    for (int k = 0; k < (int)ts.size(); ++k)
        if (!on_scan[k]) rep.hidden.push_back(apps[ts[k].n]);
    // report visible entries ordered by decreasing nu
    std::sort(rep.visible.begin(), rep.visible.end(),
              [](const auto& a, const auto& b) { return a.nu_hi > b.nu_hi; });
    return rep;
}

}  // namespace hhsplit
