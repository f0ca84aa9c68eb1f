#pragma once

// Direct computation of W^u(0), W^s(0) for the forced system via a high-order
// Taylor integrator, Poincare-section reduction at max{y1^2+y2^2}, and Newton
// refinement of seed angles so section images land on a prescribed
// (psi0, theta0) mesh.
//
// The scalar type is a policy: dd (double-double, ~32 digits) for production
// grids, plain double for smoke tests.

#include <functional>
#include <string>
#include <vector>

#include "hhsplit/dd.hpp"
#include "hhsplit/melnikov.hpp"

namespace hhsplit {

template <class R>
struct State4 {
    R x1{}, x2{}, y1{}, y2{};
    R t{};       // trajectory time
    R theta0{};  // forcing phase at t = 0
};

struct IntegratorOptions {
    int order = 20;
    double tol = 1e-30;       // per-step truncation tolerance (relative)
    double t_max_factor = 80; // section search limit: t_max = factor/nu
    double max_step = 1.5;
};

// parameters lowered to the numeric scalar; gamma carried as dd so the
// forcing phase stays accurate over flight times ~1e3
struct FieldParams {
    double nu = 0.0625, eps = 1e-3, c = 5.0, d = 7.0;
    dd gamma{};
    static FieldParams from(const PerturbationParams& p) {
        FieldParams f;
        f.nu = p.nu; f.eps = p.eps; f.c = p.c; f.d = p.d;
        mpf_class g = p.gamma.value(160);
        double hi = g.get_d();
        f.gamma = dd(hi, mpf_class(g - hi).get_d());
        return f;
    }
};

// right-hand side at a point (reference semantics for tests; the integrator
// itself propagates jets)
template <class R>
State4<R> vector_field(const State4<R>& s, const FieldParams& p);

// seeds on the local manifolds at radius R2 (default 1e-12)
template <class R>
State4<R> seed_unstable(R psi0, R theta0, const FieldParams& p, double R2 = 1e-12);
template <class R>
State4<R> seed_stable(R psi0, R theta0, const FieldParams& p, double R2 = 1e-12);

template <class R>
struct SectionPoint {
    State4<R> state;   // on max{y1^2+y2^2}
    R psi_arr{};       // atan2(y2, y1), coarse (double accuracy)
    R F1{}, F2{};      // first integrals G1, G2 at the section
    int steps = 0;
};

template <class R>
class TaylorIntegrator {
  public:
    TaylorIntegrator(const FieldParams& p, const IntegratorOptions& opt = {});

    // one accepted Taylor step in the given time direction (+1/-1);
    // returns the step actually taken
    R step(State4<R>& s, int direction);

    // integrate until the first section crossing with y1^2+y2^2 > 1
    SectionPoint<R> to_section(State4<R> s, int direction);

    // integrate to exactly t = t_target (either direction)
    State4<R> integrate_to(State4<R> s, R t_target);

    const FieldParams& params() const { return p_; }
    const IntegratorOptions& options() const { return opt_; }

  private:
    FieldParams p_;
    IntegratorOptions opt_;
    std::vector<std::vector<R>> jets_;  // workspace, expansion at the last step start

    void build_jets(const State4<R>& s);
    R locate_section(State4<R>& s, R h);  // Newton on d(y^2)/dt = 0 in [0, h]
};

struct GridNode {
    double psi0 = 0.0, theta0 = 0.0;
    dd F1u{}, F2u{}, F1s{}, F2s{};
    dd dF1{}, dF2{};
    int newton_iters_u = 0, newton_iters_s = 0;
};

struct NumericSplittingGrid {
    double nu = 0.0, eps = 0.0;
    int n_psi = 0, n_theta = 0;
    std::vector<GridNode> nodes;  // row-major, psi index major

    const GridNode& at(int i, int j) const { return nodes[i * n_theta + j]; }
    double sup_dF(int component) const;
    // dominant Fourier mode over a candidate set of modes
    std::pair<int, long long> dominant_mode(int component) const;
};

struct GridOptions {
    IntegratorOptions integ{};
    double newton_tol = 1e-13;
    int newton_max_iters = 25;
    int threads = 1;
    std::function<void(int, int)> progress;  // (done, total) per node batch
};

// Newton-refined mesh of both manifolds at equispaced section coordinates
NumericSplittingGrid splitting_grid(const PerturbationParams& p, int n_psi,
                                    int n_theta, const GridOptions& opt = {});

// same machinery in plain double (smoke tests, quick looks)
NumericSplittingGrid splitting_grid_double(const PerturbationParams& p, int n_psi,
                                           int n_theta, const GridOptions& opt = {});

struct MelnikovComparison {
    double sqrt_nu_log_grid[2];    // sqrt(nu) log(sup|dF_i|/eps)
    double sqrt_nu_log_series[2];
    double gap[2];
    std::pair<int, long long> grid_mode[2];
    std::pair<int, long long> series_mode[2];
};
MelnikovComparison compare_melnikov(const NumericSplittingGrid& grid,
                                    const SplittingSeries& s1,
                                    const SplittingSeries& s2);

}  // namespace hhsplit
