#pragma once

// Self-contained companion computations: autonomous-perturbation Melnikov
// asymptotics for a monomial x1^k1 x2^k2 y1^l1 y2^l2, the Duffing
// residue-vs-series comparison, and the regularity-dependent dominant-term
// scaling.

#include <array>
#include <vector>

#include "hhsplit/melnikov.hpp"

namespace hhsplit {

struct Monomial {
    int k1 = 0, k2 = 0, l1 = 0, l2 = 0;
    int r() const { return k1 + k2 + l1 + l2; }
    int k() const { return k1 + k2; }
    int l() const { return l1 + l2; }
    int m() const { return k1 + l1; }
    int n() const { return k2 + l2; }
};

// M1(psi0) for the autonomous perturbation H1 = the monomial, via exact
// Fourier x hyperbolic reduction to I1/I2
LogVal autonomous_melnikov(const Monomial& mono, double nu, double psi0);

// asymptotic form M1 ~ A exp(-C/nu)/nu^p: returns (p, C) = (r+k, pi/2) for
// r odd and (r+k, pi) for r even
std::pair<int, double> autonomous_asymptotic_form(const Monomial& mono);

// leading-harmonic amplitude A_1(nu) of M1 for the monomial (the |sin psi0| /
// |cos psi0| coefficient of the first harmonic)
double autonomous_leading_amplitude(const Monomial& mono, double nu);

// least-squares fit of nu*log A1 ~ a nu + b nu log nu + c + d nu^2
struct AutonomousFit {
    double a, b, c, d;
    bool c_frozen;
};
AutonomousFit autonomous_fit(const std::vector<std::pair<double, double>>& samples,
                             bool freeze_c_at_minus_pi_2);

// Duffing I_c = int x^2(t) cos(w t)/(d - x(t)) dt on x(t) = sqrt(2)/cosh(t)
double duffing_Ic_residues(double d, double omega);
struct DuffingSeries {
    double value;
    std::vector<double> terms;   // d (sqrt(2)/d)^k I_k contributions, k >= 2
    int largest_term_index;
};
DuffingSeries duffing_Ic_series(double d, double omega, int max_terms = 400);

// Appendix-C dominant-term maximizer
struct RegularityMode {
    bool analytic = false;
    double p = 0.0;    // C^p case
    double rho = 0.0;  // analytic case
};
struct RegularityDominant {
    double k_M;
    double log_d_kM;
};
RegularityDominant regularity_dominant(const RegularityMode& mode, double c_small,
                                       double tau, double nu);

}  // namespace hhsplit
