#pragma once

// First-order Poincare-Melnikov engine for the periodically forced
// Hamiltonian-Hopf normal form: closed-form I1/I2 integrals, per-harmonic
// log-amplitudes of the two splitting components, and truncated splitting
// series with dominant-harmonic extraction.
//
// Amplitudes are carried as (sign, natural-log magnitude): the scans reach
// |C| ~ 1e-3000 where plain doubles are useless.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hhsplit/frequency.hpp"

namespace hhsplit {

struct PerturbationParams {
    double nu = 0.0625;     // hyperbolicity parameter
    double eps = 1e-3;      // perturbation size
    double c = 5.0;         // time-singularity parameter, > 1
    double d = 7.0;         // space-singularity parameter, > sqrt(2)
    Frequency gamma = Frequency::golden();

    double rho_c() const { return c + std::sqrt(c * c - 1.0); }
    double K() const {
        return std::log(d) + 0.5 * std::log(2.0) +
               std::log(rho_c()) / gamma.value_d() - 1.0;
    }
    static constexpr double B = M_PI / 2.0;

    void validate() const {
        if (!(c > 1.0)) throw std::domain_error("c must be > 1");
        if (!(d > std::sqrt(2.0))) throw std::domain_error("d must be > sqrt(2)");
        if (!(nu > 0.0 && nu < 1.0)) throw std::domain_error("nu must be in (0,1)");
        if (!(eps > 0.0)) throw std::domain_error("eps must be > 0");
    }
};

// sign/log-magnitude value
struct LogVal {
    double log_mag = -std::numeric_limits<double>::infinity();
    int sign = 0;
    double value() const { return sign * std::exp(log_mag); }
};

// Fourier coefficients of 1/(c - cos(theta)):  c_0 = 1/sqrt(c^2-1), c_j = 2 c_0 / rho_c^j
double fourier_c(int j, double c);
// Taylor coefficients of g'(y) = sum d_k y^{4+k}:  d_k = (5+k) d^{-k-1}
double taylor_d(int k, double d);

// cos^m = sum a_{m,i} cos((m-2i) psi):        0 <= i <= floor(m/2)
double cos_power_coeff(int m, int i);
// cos^m sin = sum b_{m,i} sin((m+1-2i) psi):  0 <= i <= floor((m+1)/2)
double cos_power_sin_coeff(int m, int i);

// I1(s,nu,n) = int cos(st) sech^n(nu t) dt          (n >= 1)
// I2(s,nu,n) = int sinh(nu t) sin(st) sech^n(nu t) dt  (n >= 2)
// evaluated from the closed forms / two-step recurrence, in log space.
LogVal I1_log(double s, double nu, int n);
LogVal I2_log(double s, double nu, int n);
double I1_value(double s, double nu, int n);
double I2_value(double s, double nu, int n);

// log Pi_r(w), Pi_1 = Pi_2 = 1, Pi_r = (1 + (r-2)^2 w^2) Pi_{r-2}
double log_pi_poly(int r, double w);
// integral approximation of log Pi_r(w) (valid for large r)
double log_pi_poly_integral(int r, double w);

struct HarmonicTerm {
    int m1 = 0;
    long long m2 = 0;
    double log_amp = -std::numeric_limits<double>::infinity();  // log C^{(i)}_{m1,m2}
    int sign = 1;          // sign of hat C
    int component = 1;
    double s_abs = 0.0;    // |m1 - gamma m2|
    double L = 0.0;        // c_s nu m1^2 = nu m1 / s_abs
};

// full i-sum amplitude of one Fourier mode of component 1 or 2
HarmonicTerm harmonic_amplitude(long long m1, long long m2,
                                const PerturbationParams& p, int component);
// same, with s = m1 - gamma*m2 already computed
HarmonicTerm harmonic_amplitude_s(long long m1, long long m2, double s_signed,
                                  const PerturbationParams& p, int component);

struct HarmonicBudget {
    int max_m1_scan = 72;        // contiguous (m1, m2) rectangle bound
    int m2_margin = 10;          // m2 swept over [-margin, m1/gamma + margin]
    int max_approximants = 64;   // best-approximant families added beyond the rectangle
    double rel_tol = 1e-10;      // retention threshold relative to the max amplitude
};

struct SplittingSeries {
    int component = 1;
    PerturbationParams params;
    std::vector<HarmonicTerm> terms;   // sorted by descending log_amp
    double truncation_rel_tol = 1e-10;

    const HarmonicTerm& dominant() const {
        if (terms.empty()) throw std::runtime_error("empty series");
        return terms.front();
    }
};

// every harmonic whose amplitude is >= rel_tol * max over the candidate set:
// a contiguous low-order rectangle plus best-approximant families (with low
// multiples and semiconvergents) for small-s modes beyond it
SplittingSeries build_series(const PerturbationParams& p, int component,
                             const HarmonicBudget& budget = {});

// eps * sum hatC sin(m1 psi0 - m2 theta0), compensated, descending magnitude
double evaluate(const SplittingSeries& s, double psi0, double theta0);
// sum relative to the dominant amplitude; exact up to the common factor
// eps*exp(log_ref), returned in log_ref
double evaluate_scaled(const SplittingSeries& s, double psi0, double theta0,
                       double& log_ref);

// log of sup |series| over the torus (including eps), 256x256 confirmation grid
double amplitude_sup_log(const SplittingSeries& s);

// scan row per nu: the Fig-style outputs
struct ScanRow {
    double log2_nu;
    double sqrt_nu_log_amp[2];   // sqrt(nu) * log(sup/eps) per component
    int m1_dom[2];
    long long m2_dom[2];
    int n_terms;                 // retained terms in component 1
};
std::vector<ScanRow> scan_amplitudes(PerturbationParams base, double log2_lo,
                                     double log2_hi, double log2_step,
                                     const HarmonicBudget& budget = {},
                                     int threads = 1);

}  // namespace hhsplit
