#pragma once

// Exact continued-fraction machinery for the forcing frequency gamma.
//
// A Frequency is either a quadratic surd (p + q*sqrt(D))/(r + s*sqrt(D)),
// whose CFE quotients are produced by the classical exact integer algorithm,
// or an explicit quotient rule (e-2, [0;1,2,3,4,...], ...).  Quotients are
// never extracted through floating point.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace hhsplit {

struct Approximant {
    int n = 0;              // order of the convergent N_n/D_n
    mpz_class N;
    mpz_class D;
    mpf_class s_signed;     // N_n - gamma*D_n, at working precision
    double c_s = 0.0;       // 1/(N |D gamma - N|)
    double c_hat = 0.0;     // q_{+,n} + 1/q_{-,n} = 1/(D |D gamma - N|)
};

class Frequency {
  public:
    // (p + q*sqrt(D)) / (r + s*sqrt(D)), D > 0 not a perfect square
    static Frequency quadratic_surd(const mpz_class& p, const mpz_class& q,
                                    const mpz_class& r, const mpz_class& s,
                                    const mpz_class& D, std::string name = "surd");
    // quotient rule: q_0 = prefix[0], ...; rule(j) supplies quotients past the prefix
    static Frequency explicit_quotients(std::vector<long long> prefix,
                                        std::function<long long(int)> rule,
                                        std::string name = "quotients");

    static Frequency golden();
    static Frequency case1();
    static Frequency case2();
    static Frequency case3();
    static Frequency e_minus_2();
    static Frequency gamma1();
    // parse "golden", "case1", ..., "surd:a,b,c,D", "quotients:q0,q1,..."
    static Frequency named(const std::string& spec);

    const std::string& name() const { return name_; }
    bool is_quadratic() const { return surd_.has_value(); }

    // first `count` CFE quotients [q0; q1, ...], exact
    std::vector<long long> quotients(int count) const;

    // gamma at `bits` of precision
    mpf_class value(unsigned bits) const;
    double value_d() const;

    // m1 - gamma*m2 in double, with gamma carried at high precision so the
    // cancellation for near-resonant pairs is exact to double
    double s_signed(long long m1, long long m2) const;

    // convergents of orders 0..count-1 with exact N, D and high-precision tails
    std::vector<Approximant> best_approximants(int count) const;

    // q_{+,n} = [q_{n+1}; q_{n+2}, ...] evaluated to double precision
    double q_plus(int n) const;

    // (preperiod, period) of the quotient sequence; quadratic surds only
    std::pair<int, int> cfe_period() const;

  private:
    Frequency() = default;

    struct Surd {
        mpz_class P, Q, R;  // x = (P + sqrt(R))/Q, Q | (R - P^2)
    };

    std::optional<Surd> surd_;
    std::function<long long(int)> rule_;
    std::vector<long long> prefix_;
    std::string name_;
    mutable std::vector<long long> cached_quotients_;
    mutable mpf_class cached_value_;
    mutable unsigned cached_bits_ = 0;
    mutable double g_hi_ = 0.0, g_lo_ = 0.0;  // gamma as a double-double
    mutable bool g_dd_ready_ = false;

    void extend_quotients(int count) const;
};

// phi(q) = q log(q)/log(log(q)) profile values Pi_n = phi(D_n)|D_n gamma - N_n|,
// computed through the exact identity (D_n |D_n gamma - N_n|)^{-1} = q_{+,n} + 1/q_{-,n}
// so that no extended-precision subtraction is needed even for n ~ 1000.
struct DiophantineProfile {
    std::vector<std::pair<int, double>> values;  // (n, Pi_n)
    int argmin = 0;
    double min_value = 0.0;
};
DiophantineProfile diophantine_profile(const Frequency& f, int n_lo, int n_hi);

// asymptotic limits of c_{s,n} along residue classes of the CFE period
struct CsLimits {
    int period = 1;
    std::vector<double> limits;       // indexed by n mod period
    std::vector<int> residue_of;      // representative n for each class
};
CsLimits c_s_limits(const Frequency& f, int horizon);

// Appendix-F dominance analysis on T_n(nu) = N_n + 1/(nu N_n chat_n).
// The scan variable is the scaled parameter nuhat of the dominance functions;
// scale_from_physical() maps a physical nu to it for given decay rates.
struct DominanceReport {
    struct Entry {
        Approximant app;
        double nu_lo = 0.0, nu_hi = 0.0;  // dominance interval clipped to the scan
    };
    std::vector<Approximant> considered;
    std::vector<Entry> visible;
    std::vector<Approximant> hidden;
    struct Crossing { int i, j; double nu; };
    std::vector<Crossing> crossings;  // pairwise crossings on the lower envelope
};
DominanceReport dominance_analysis(const Frequency& f, double nu_lo, double nu_hi,
                                   int max_order);
double dominance_scale_from_physical(double nu, double rho1, double rho2, double gamma);

}  // namespace hhsplit
