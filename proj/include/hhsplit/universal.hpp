#pragma once

// The universal splitting functions Psi_1(L), Psi_2(L), their maxima, and the
// dominant-harmonic change points nu_j.
//
// Psi_1(L) = sqrt(L) * (Psi_{1,1} + Psi_{1,2}) approximates
// sqrt(c_s nu) log C^{(1)} along best-approximant families; it depends on the
// frequency only through the constant K.

#include <vector>

#include "hhsplit/melnikov.hpp"

namespace hhsplit {

struct PsiEvaluation {
    double L = 0.0;
    double I_star = 0.0;   // maximizing index ratio of the S_A sum
    double psi11 = 0.0;    // sqrt(L) * prefactor part
    double psi12 = 0.0;    // sqrt(L) * S_A-maximum part
    double psi1 = 0.0;     // psi11 + psi12
    double psi2_for(int m1) const { return psi1 - std::sqrt(L) * std::log(L) / m1; }
};

PsiEvaluation psi1(double L, const PerturbationParams& p);
double psi2(double L, int m1, const PerturbationParams& p);

// interior maximum of Psi_1, golden-section refined to |dL| < 1e-10
struct PsiMax { double L_M; double Psi_M; };
PsiMax psi1_max(const PerturbationParams& p);

// asymptotic golden-mean change constants
// prefactor-only:  L = (pi gamma/(2(1+gamma))) / (2(1+gamma)log(1+gamma) + K gamma + gamma log L)
// full-Psi:        Psihat_1(Lt) = Psihat_1(Lt (1+gamma)^2), Psihat_1 = Psi_1(Lt c_inf)/sqrt(c_inf)
struct GoldenChangeConstants {
    double L_l_prefactor;     // ~0.1690224
    double Lt_l_full;         // ~0.044524
    double psi_hat_at_change; // ~-2.652115
    double Lt_max;            // ~0.072529
    double psi_hat_max;       // ~-2.555210
};
GoldenChangeConstants golden_change_constants(const PerturbationParams& p);

enum class ChangeMode {
    prefactor_only,   // log P_F equality
    full_psi,         // Psi_i(L)/sqrt(c_s) equality (default per the ledger)
    melnikov,         // full amplitude log C^{(i)} equality (table-grade)
};

struct ChangePoint {
    Approximant from;   // dominant above nu
    Approximant to;     // dominant below nu
    double nu = 0.0;
    int component = 1;
    double L_at_change = 0.0;  // L of the `from` harmonic at nu
};

// change points between consecutive visible best approximants covering
// [nu_lo, nu_hi]; solved to relative tolerance ~1e-12 by bisection
std::vector<ChangePoint> change_points(const Frequency& f, PerturbationParams p,
                                       double nu_lo, double nu_hi, int component,
                                       ChangeMode mode = ChangeMode::full_psi);

struct ChangeAsymptotics {
    double K_hat = 0.0;           // nu_j gamma^{-2j} limit (quadratic freq)
    double ratio = 0.0;           // mean nu_{j+1}/nu_j over the last orders
    std::vector<double> coeff;    // (nu^{(1)} - nu^{(2)})/nu_m^{3/2} per change
    double log2_gap = 0.0;        // mean log2 nu_{j+1} - log2 nu_j
};
ChangeAsymptotics change_asymptotics(const Frequency& f, PerturbationParams p,
                                     double nu_lo, double nu_hi);

}  // namespace hhsplit
