#include "hhsplit/manifold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace hhsplit {

namespace {

// scalar shims so the integrator template works for double and dd alike
template <class R> struct num;
template <> struct num<double> {
    static void sincos(double a, double& s, double& c) { s = std::sin(a); c = std::cos(a); }
    static double wrap_pi(double a) {
        double r = std::remainder(a, 2.0 * M_PI);
        return r;
    }
    static double abs(double a) { return std::fabs(a); }
    static double sqrt(double a) { return std::sqrt(a); }
    static double hi(double a) { return a; }
    static double from(double a) { return a; }
};
template <> struct num<dd> {
    static void sincos(dd a, dd& s, dd& c) { hhsplit::sincos(a, s, c); }
    static dd wrap_pi(dd a) { return hhsplit::wrap_pi(a); }
    static dd abs(dd a) { return hhsplit::fabs(a); }
    static dd sqrt(dd a) { return hhsplit::sqrt(a); }
    static double hi(dd a) { return a.hi; }
    static dd from(double a) { return dd(a); }
};

// truncated-power-series coefficient of a product at order n
template <class R>
inline R conv_at(const std::vector<R>& a, const std::vector<R>& b, int n) {
    R acc{};
    for (int k = 0; k <= n; ++k) acc += a[k] * b[n - k];
    return acc;
}

}  // namespace

template <class R>
State4<R> vector_field(const State4<R>& s, const FieldParams& p) {
    R Pm = s.y1 * s.y1 + s.y2 * s.y2 - R(1.0);
    R th;
    if constexpr (std::is_same_v<R, dd>) th = p.gamma * s.t + s.theta0;
    else th = p.gamma.hi * s.t + s.theta0;
    R sn, cn;
    num<R>::sincos(th, sn, cn);
    R w = R(1.0) / (R(p.d) - s.y1);
    R z = R(1.0) / (R(p.c) - cn);
    R y1sq = s.y1 * s.y1;
    R gp = (R(5.0 * p.d) * y1sq * y1sq - R(4.0) * y1sq * y1sq * s.y1) * w * w;
    State4<R> f;
    f.x1 = -s.x2 + R(p.nu) * s.y1 * Pm + R(p.eps) * gp * z;
    f.x2 = s.x1 + R(p.nu) * s.y2 * Pm;
    f.y1 = -s.y2 - R(p.nu) * s.x1;
    f.y2 = s.y1 - R(p.nu) * s.x2;
    f.t = R(1.0);
    f.theta0 = R(0.0);
    return f;
}

template <class R>
State4<R> seed_unstable(R psi0, R theta0, const FieldParams& p, double R2) {
    (void)p;
    R c, s;
    num<R>::sincos(psi0, s, c);
    R r2 = num<R>::from(R2);
    R r1 = r2 * (R(1.0) - r2 * r2 * 0.5);
    State4<R> st;
    // W^u leaves the origin with x antiparallel to y (eigensolution e^{nu t})
    st.x1 = -r1 * c; st.x2 = -r1 * s;
    st.y1 = r2 * c;  st.y2 = r2 * s;
    st.t = R(0.0);
    st.theta0 = theta0;
    return st;
}

template <class R>
State4<R> seed_stable(R psi0, R theta0, const FieldParams& p, double R2) {
    State4<R> st = seed_unstable(psi0, theta0, p, R2);
    st.x1 = -st.x1;
    st.x2 = -st.x2;
    return st;
}

// jet slots
enum : int { jX1, jX2, jY1, jY2, jC1, jS1, jA, jP, jQ1, jQ2, jW, jU, jB4, jV5,
             jGP, jZ, jF, jCOUNT };

template <class R>
TaylorIntegrator<R>::TaylorIntegrator(const FieldParams& p, const IntegratorOptions& opt)
    : p_(p), opt_(opt) {
    if (opt_.order < 8) throw std::invalid_argument("Taylor order must be >= 8");
    if (!(opt_.tol > 0)) throw std::invalid_argument("tolerance must be > 0");
    jets_.assign(jCOUNT, std::vector<R>(opt_.order + 1, R(0.0)));
}

template <class R>
void TaylorIntegrator<R>::build_jets(const State4<R>& s) {
    const int N = opt_.order;
    auto& J = jets_;
    for (auto& v : J) std::fill(v.begin(), v.end(), R(0.0));
    J[jX1][0] = s.x1; J[jX2][0] = s.x2; J[jY1][0] = s.y1; J[jY2][0] = s.y2;
    // forcing phase jets: theta(tau) = gamma*(t0+tau)+theta0
    R th;
    if constexpr (std::is_same_v<R, dd>) th = wrap_2pi(p_.gamma * s.t + s.theta0);
    else th = std::remainder(p_.gamma.hi * s.t + s.theta0, 2.0 * M_PI);
    R sn, cn;
    num<R>::sincos(th, sn, cn);
    J[jC1][0] = cn; J[jS1][0] = sn;
    const R g = [&] { if constexpr (std::is_same_v<R, dd>) return R(p_.gamma);
                      else return R(p_.gamma.hi); }();
    for (int n = 0; n < N; ++n) J[jC1][n + 1] = -g * J[jS1][n] / double(n + 1),
                                J[jS1][n + 1] = g * J[jC1][n] / double(n + 1);
    const R d0 = R(p_.d) - s.y1;
    const R z0 = R(p_.c) - cn;
    // the perturbation enters through eps g'(y1) f(theta) ~ eps r^4: inside
    // r < 1e-4 its accumulated effect on the section integrals is below
    // 1e-21, far under the splitting resolution, so the g'/f jet chain can
    // be skipped there
    const double r2 = num<R>::hi(s.y1) * num<R>::hi(s.y1) +
                      num<R>::hi(s.y2) * num<R>::hi(s.y2);
    const bool with_pert = p_.eps != 0.0 && r2 > 1e-8;
    for (int n = 0; n < N; ++n) {
        // auxiliary jets at order n
        J[jA][n] = conv_at(J[jY1], J[jY1], n);
        J[jP][n] = J[jA][n] + conv_at(J[jY2], J[jY2], n);
        // q1 = y1*(P-1), q2 = y2*(P-1): fold the -1 into the order-0 term
        {
            R q1 = conv_at(J[jY1], J[jP], n) - J[jY1][n];
            R q2 = conv_at(J[jY2], J[jP], n) - J[jY2][n];
            J[jQ1][n] = q1;
            J[jQ2][n] = q2;
        }
        if (with_pert) {
            // w = 1/(d - y1)
            if (n == 0) J[jW][0] = R(1.0) / d0;
            else {
                R acc{};
                for (int k = 0; k < n; ++k) acc += J[jW][k] * J[jY1][n - k];
                J[jW][n] = acc / d0;
            }
            J[jU][n] = conv_at(J[jW], J[jW], n);
            J[jB4][n] = conv_at(J[jA], J[jA], n);
            J[jV5][n] = conv_at(J[jB4], J[jY1], n);
            // gp = (5 d y1^4 - 4 y1^5) w^2
            {
                R acc{};
                for (int k = 0; k <= n; ++k) {
                    R poly = R(5.0 * p_.d) * J[jB4][k] - R(4.0) * J[jV5][k];
                    acc += poly * J[jU][n - k];
                }
                J[jGP][n] = acc;
            }
            // z = 1/(c - cos theta)
            if (n == 0) J[jZ][0] = R(1.0) / z0;
            else {
                R acc{};
                for (int k = 0; k < n; ++k) acc += J[jZ][k] * J[jC1][n - k];
                J[jZ][n] = acc / z0;
            }
            J[jF][n] = conv_at(J[jGP], J[jZ], n);
        }
        // state advance; divide by the exact integer so the coefficients keep
        // full dd precision
        const double np1 = double(n + 1);
        J[jX1][n + 1] = (-J[jX2][n] + R(p_.nu) * J[jQ1][n]
                         + (with_pert ? R(p_.eps) * J[jF][n] : R(0.0))) / np1;
        J[jX2][n + 1] = (J[jX1][n] + R(p_.nu) * J[jQ2][n]) / np1;
        J[jY1][n + 1] = (-J[jY2][n] - R(p_.nu) * J[jX1][n]) / np1;
        J[jY2][n + 1] = (J[jY1][n] - R(p_.nu) * J[jX2][n]) / np1;
    }
}

namespace {

template <class R>
R horner(const std::vector<R>& c, int N, R h) {
    R acc = c[N];
    for (int k = N - 1; k >= 0; --k) acc = acc * h + c[k];
    return acc;
}

}  // namespace

template <class R>
R TaylorIntegrator<R>::step(State4<R>& s, int direction) {
    build_jets(s);
    const int N = opt_.order;
    auto& J = jets_;
    // tolerance is relative to the state scale: near the 1e-12 seeds an
    // absolute tolerance would be amplified by the unstable flow into the
    // section-level first integrals
    double scale = std::max({std::fabs(num<R>::hi(s.x1)), std::fabs(num<R>::hi(s.x2)),
                             std::fabs(num<R>::hi(s.y1)), std::fabs(num<R>::hi(s.y2))});
    scale = std::max(scale, 1e-260);
    auto norm_at = [&](int n) {
        return std::max({std::fabs(num<R>::hi(J[jX1][n])), std::fabs(num<R>::hi(J[jX2][n])),
                         std::fabs(num<R>::hi(J[jY1][n])), std::fabs(num<R>::hi(J[jY2][n]))});
    };
    double hN = 1.5, hM = 1.5;
    double nN = norm_at(N), nM = norm_at(N - 1);
    if (nN > 0) hN = std::pow(opt_.tol * scale / nN, 1.0 / N);
    if (nM > 0) hM = std::pow(opt_.tol * scale / nM, 1.0 / (N - 1));
    double h = 0.9 * std::min(hN, hM);
    h = std::min(h, opt_.max_step);
    if (h < 1e-20) throw std::runtime_error("Taylor step underflow (stiffness)");
    R hr = num<R>::from(direction < 0 ? -h : h);
    State4<R> out;
    out.x1 = horner(J[jX1], N, hr);
    out.x2 = horner(J[jX2], N, hr);
    out.y1 = horner(J[jY1], N, hr);
    out.y2 = horner(J[jY2], N, hr);
    out.t = s.t + hr;
    out.theta0 = s.theta0;
    s = out;
    return hr;
}

template <class R>
R TaylorIntegrator<R>::locate_section(State4<R>& s, R h) {
    // jets_ hold the expansion at s; the event d(y1^2+y2^2)/dt = 0 lies in
    // [0, h] (forward) or [h, 0] (backward)
    const int N = opt_.order;
    std::vector<R> m(N + 1, R(0.0)), e(N + 1, R(0.0));
    for (int n = 0; n <= N; ++n)
        m[n] = conv_at(jets_[jY1], jets_[jY1], n) + conv_at(jets_[jY2], jets_[jY2], n);
    for (int n = 0; n < N; ++n) e[n] = m[n + 1] * double(n + 1);
    e[N] = R(0.0);
    R lo = R(0.0), hi = h;
    if (num<R>::hi(h) < 0) std::swap(lo, hi);
    R elo = horner(e, N, lo);
    R tau = (lo + hi) * 0.5;
    for (int it = 0; it < 30; ++it) {
        R em = horner(e, N, tau);
        if ((num<R>::hi(em) < 0) == (num<R>::hi(elo) < 0)) { lo = tau; elo = em; }
        else hi = tau;
        tau = (lo + hi) * 0.5;
    }
    for (int it = 0; it < 8; ++it) {
        R ev = horner(e, N, tau);
        if (std::fabs(num<R>::hi(ev)) < 1e-28) break;
        R der{};
        for (int k = N; k >= 1; --k) der = der * tau + e[k] * double(k);
        if (num<R>::hi(der) == 0.0) break;
        tau = tau - ev / der;
    }
    State4<R> out;
    out.x1 = horner(jets_[jX1], N, tau);
    out.x2 = horner(jets_[jX2], N, tau);
    out.y1 = horner(jets_[jY1], N, tau);
    out.y2 = horner(jets_[jY2], N, tau);
    out.t = s.t + tau;
    out.theta0 = s.theta0;
    s = out;
    return tau;
}

template <class R>
SectionPoint<R> TaylorIntegrator<R>::to_section(State4<R> s, int direction) {
    const double t_cap = opt_.t_max_factor / p_.nu;
    double m_prev = num<R>::hi(s.y1 * s.y1 + s.y2 * s.y2);
    State4<R> prev_start = s;
    R h_prev{};
    int steps = 0;
    while (true) {
        State4<R> before = s;
        R h = step(s, direction);
        ++steps;
        double m_now = num<R>::hi(s.y1 * s.y1 + s.y2 * s.y2);
        if (m_prev > 1.0 && m_now < m_prev) {
            // the maximum lies in this step unless it straddles the previous
            // step's end (endpoint comparison can lag by one step)
            const int N = opt_.order;
            build_jets(before);
            std::vector<R> mm(N + 1, R(0.0));
            for (int n = 0; n <= N; ++n)
                mm[n] = conv_at(jets_[jY1], jets_[jY1], n)
                      + conv_at(jets_[jY2], jets_[jY2], n);
            double slope0 = num<R>::hi(mm[1]);
            State4<R> at = before;
            if (slope0 * direction > 0.0) {
                locate_section(at, h);
            } else if (steps > 1) {
                build_jets(prev_start);
                at = prev_start;
                locate_section(at, h_prev);
            } else {
                throw std::runtime_error("grazing section event");
            }
            SectionPoint<R> sp;
            sp.state = at;
            sp.psi_arr = num<R>::from(std::atan2(num<R>::hi(at.y2), num<R>::hi(at.y1)));
            sp.F1 = at.x1 * at.y2 - at.x2 * at.y1;
            R G2 = (at.x1 * at.x1 + at.x2 * at.x2) * 0.5;
            R G3 = (at.y1 * at.y1 + at.y2 * at.y2) * 0.5;
            sp.F2 = G2 - G3 + G3 * G3;
            sp.steps = steps;
            return sp;
        }
        m_prev = m_now;
        prev_start = before;
        h_prev = h;
        if (std::fabs(num<R>::hi(s.t)) > t_cap)
            throw std::runtime_error("no section crossing within t_max");
    }
}

template State4<double> vector_field(const State4<double>&, const FieldParams&);
template State4<dd> vector_field(const State4<dd>&, const FieldParams&);
template State4<double> seed_unstable(double, double, const FieldParams&, double);
template State4<dd> seed_unstable(dd, dd, const FieldParams&, double);
template State4<double> seed_stable(double, double, const FieldParams&, double);
template State4<dd> seed_stable(dd, dd, const FieldParams&, double);

template <class R>
State4<R> TaylorIntegrator<R>::integrate_to(State4<R> s, R t_target) {
    int direction = num<R>::hi(t_target - s.t) >= 0 ? +1 : -1;
    const int N = opt_.order;
    for (int it = 0; it < 2000000; ++it) {
        R remain = t_target - s.t;
        if (std::fabs(num<R>::hi(remain)) < 1e-30) return s;
        State4<R> before = s;
        R h = step(s, direction);
        if (std::fabs(num<R>::hi(h)) >= std::fabs(num<R>::hi(remain))) {
            // jets_ still hold the expansion at `before`: land exactly
            State4<R> out;
            out.x1 = horner(jets_[jX1], N, remain);
            out.x2 = horner(jets_[jX2], N, remain);
            out.y1 = horner(jets_[jY1], N, remain);
            out.y2 = horner(jets_[jY2], N, remain);
            out.t = t_target;
            out.theta0 = before.theta0;
            return out;
        }
    }
    throw std::runtime_error("integrate_to exceeded the step budget");
}

template class TaylorIntegrator<double>;
template class TaylorIntegrator<dd>;

// ---------------------------------------------------------------------------
// shooting grids

namespace {

template <class R>
struct Shooter {
    TaylorIntegrator<R> integ;
    bool stable;

    Shooter(const FieldParams& p, const IntegratorOptions& o, bool stable_)
        : integ(p, o), stable(stable_) {}

    // residual of (arrival angle - psi_t, arrival phase - theta_t); also
    // returns the section point for bookkeeping
    void residual(double u_psi, double u_theta, double psi_t, double theta_t,
                  double r[2], SectionPoint<R>& sp) {
        State4<R> seed = stable
            ? seed_stable<R>(num<R>::from(u_psi), num<R>::from(u_theta), integ.params())
            : seed_unstable<R>(num<R>::from(u_psi), num<R>::from(u_theta), integ.params());
        sp = integ.to_section(seed, stable ? -1 : +1);
        const State4<R>& s = sp.state;
        // r1 ~ psi_arr - psi_t, accurate near zero without atan2
        double coarse = std::remainder(
            std::atan2(num<R>::hi(s.y2), num<R>::hi(s.y1)) - psi_t, 2.0 * M_PI);
        if (std::fabs(coarse) > 0.3) {
            r[0] = coarse;
        } else {
            R st, ct;
            num<R>::sincos(num<R>::from(psi_t), st, ct);
            R rr = num<R>::sqrt(s.y1 * s.y1 + s.y2 * s.y2);
            R wv = (s.y2 * ct - s.y1 * st) / rr;  // sin(psi_arr - psi_t)
            R r1 = wv + wv * wv * wv / 6.0;
            if constexpr (std::is_same_v<R, dd>) r[0] = to_double(r1);
            else r[0] = r1;
        }
        if constexpr (std::is_same_v<R, dd>) {
            dd phase = wrap_pi(integ.params().gamma * s.t + s.theta0 - dd(theta_t));
            r[1] = to_double(phase);
        } else {
            r[1] = std::remainder(integ.params().gamma.hi * s.t + s.theta0 - theta_t,
                                  2.0 * M_PI);
        }
    }
};

template <class R>
NumericSplittingGrid run_grid(const PerturbationParams& p, int n_psi, int n_theta,
                              const GridOptions& opt) {
    if (n_psi < 8 || n_theta < 8) throw std::invalid_argument("grid sizes must be >= 8");
    p.validate();
    FieldParams fp = FieldParams::from(p);
    NumericSplittingGrid grid;
    grid.nu = p.nu;
    grid.eps = p.eps;
    grid.n_psi = n_psi;
    grid.n_theta = n_theta;
    grid.nodes.assign((size_t)n_psi * n_theta, GridNode{});
    for (int i = 0; i < n_psi; ++i)
        for (int j = 0; j < n_theta; ++j) {
            grid.nodes[(size_t)i * n_theta + j].psi0 = 2.0 * M_PI * i / n_psi;
            grid.nodes[(size_t)i * n_theta + j].theta0 = 2.0 * M_PI * j / n_theta;
        }

    // probe flight from (0,0) gives the rigid translation of the section map
    // and a frozen finite-difference Jacobian shared by all nodes
    struct Setup { double dpsi, dtheta, J[2][2], Jinv[2][2]; };
    auto make_setup = [&](bool stable) {
        Shooter<R> sh(fp, opt.integ, stable);
        SectionPoint<R> sp;
        double r0[2];
        sh.residual(0.0, 0.0, 0.0, 0.0, r0, sp);
        Setup su;
        su.dpsi = r0[0];
        su.dtheta = r0[1];
        const double h = 1e-7;
        double rp[2], rt[2];
        sh.residual(h, 0.0, 0.0, 0.0, rp, sp);
        sh.residual(0.0, h, 0.0, 0.0, rt, sp);
        auto wrapd = [](double a) { return std::remainder(a, 2.0 * M_PI); };
        su.J[0][0] = wrapd(rp[0] - r0[0]) / h;
        su.J[1][0] = wrapd(rp[1] - r0[1]) / h;
        su.J[0][1] = wrapd(rt[0] - r0[0]) / h;
        su.J[1][1] = wrapd(rt[1] - r0[1]) / h;
        double det = su.J[0][0] * su.J[1][1] - su.J[0][1] * su.J[1][0];
        su.Jinv[0][0] = su.J[1][1] / det;
        su.Jinv[0][1] = -su.J[0][1] / det;
        su.Jinv[1][0] = -su.J[1][0] / det;
        su.Jinv[1][1] = su.J[0][0] / det;
        return su;
    };
    Setup setup_u = make_setup(false);
    Setup setup_s = make_setup(true);

    std::atomic<int> done{0};
    // quasi-Newton with Broyden updates: the section-map Jacobian drifts
    // across the torus by much more than O(eps), so a frozen probe Jacobian
    // converges slowly; the secant updates ride along the mesh for free
    struct Jac {
        double J[2][2];
        void solve(const double r[2], double d[2]) const {
            double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
            d[0] = (J[1][1] * r[0] - J[0][1] * r[1]) / det;
            d[1] = (-J[1][0] * r[0] + J[0][0] * r[1]) / det;
        }
        void broyden(const double du[2], const double dr[2]) {
            double ss = du[0] * du[0] + du[1] * du[1];
            if (ss <= 0.0) return;
            double e0 = dr[0] - (J[0][0] * du[0] + J[0][1] * du[1]);
            double e1 = dr[1] - (J[1][0] * du[0] + J[1][1] * du[1]);
            J[0][0] += e0 * du[0] / ss;
            J[0][1] += e0 * du[1] / ss;
            J[1][0] += e1 * du[0] / ss;
            J[1][1] += e1 * du[1] / ss;
        }
    };
    auto solve_node = [&](Shooter<R>& sh, Jac& jac, double psi_t, double theta_t,
                          double& u_psi, double& u_theta, SectionPoint<R>& sp) {
        double r[2];
        sh.residual(u_psi, u_theta, psi_t, theta_t, r, sp);
        for (int it = 0; it < opt.newton_max_iters; ++it) {
            if (std::fabs(r[0]) < opt.newton_tol && std::fabs(r[1]) < opt.newton_tol)
                return it + 1;
            double d[2];
            jac.solve(r, d);
            u_psi -= d[0];
            u_theta -= d[1];
            double r_new[2];
            sh.residual(u_psi, u_theta, psi_t, theta_t, r_new, sp);
            double du[2] = {-d[0], -d[1]};
            double dr[2] = {r_new[0] - r[0], r_new[1] - r[1]};
            jac.broyden(du, dr);
            r[0] = r_new[0];
            r[1] = r_new[1];
        }
        throw std::runtime_error("node Newton did not converge");
    };

    auto work = [&](int row_lo, int row_hi) {
        Shooter<R> sh_u(fp, opt.integ, false);
        Shooter<R> sh_s(fp, opt.integ, true);
        Jac jac_u{{{setup_u.J[0][0], setup_u.J[0][1]}, {setup_u.J[1][0], setup_u.J[1][1]}}};
        Jac jac_s{{{setup_s.J[0][0], setup_s.J[0][1]}, {setup_s.J[1][0], setup_s.J[1][1]}}};
        bool have_prev_row = false;
        double row0_u[2] = {0, 0}, row0_s[2] = {0, 0};
        for (int i = row_lo; i < row_hi; ++i) {
            double psi_t = 2.0 * M_PI * i / n_psi;
            double du = 2.0 * M_PI / n_psi;
            double uu_psi, uu_theta, us_psi, us_theta;
            if (have_prev_row) {
                uu_psi = row0_u[0] + du; uu_theta = row0_u[1];
                us_psi = row0_s[0] + du; us_theta = row0_s[1];
            } else {
                uu_psi = psi_t - setup_u.dpsi; uu_theta = 0.0 - setup_u.dtheta;
                us_psi = psi_t - setup_s.dpsi; us_theta = 0.0 - setup_s.dtheta;
            }
            for (int j = 0; j < n_theta; ++j) {
                double theta_t = 2.0 * M_PI * j / n_theta;
                GridNode& node = grid.nodes[(size_t)i * n_theta + j];
                SectionPoint<R> sp_u, sp_s;
                node.newton_iters_u = solve_node(sh_u, jac_u, psi_t, theta_t,
                                                 uu_psi, uu_theta, sp_u);
                node.newton_iters_s = solve_node(sh_s, jac_s, psi_t, theta_t,
                                                 us_psi, us_theta, sp_s);
                if (j == 0) {
                    row0_u[0] = uu_psi; row0_u[1] = uu_theta;
                    row0_s[0] = us_psi; row0_s[1] = us_theta;
                    have_prev_row = true;
                }
                auto to_dd = [](R v) {
                    if constexpr (std::is_same_v<R, dd>) return v;
                    else return dd(v);
                };
                node.F1u = to_dd(sp_u.F1); node.F2u = to_dd(sp_u.F2);
                node.F1s = to_dd(sp_s.F1); node.F2s = to_dd(sp_s.F2);
                node.dF1 = node.F1u - node.F1s;
                node.dF2 = node.F2u - node.F2s;
                // warm start for the next column
                double dthet = 2.0 * M_PI / n_theta;
                uu_theta += dthet;
                us_theta += dthet;
                int d = ++done;
                if (opt.progress && d % 64 == 0) opt.progress(d, 2 * n_psi * n_theta);
            }
        }
    };
    int threads = std::max(1, opt.threads);
    threads = std::min(threads, n_psi);
    if (threads == 1) {
        work(0, n_psi);
    } else {
        std::vector<std::thread> pool;
        int chunk = (n_psi + threads - 1) / threads;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(work, t * chunk, std::min(n_psi, (t + 1) * chunk));
        for (auto& th : pool) th.join();
    }
    return grid;
}

}  // namespace

NumericSplittingGrid splitting_grid(const PerturbationParams& p, int n_psi,
                                    int n_theta, const GridOptions& opt) {
    return run_grid<dd>(p, n_psi, n_theta, opt);
}

NumericSplittingGrid splitting_grid_double(const PerturbationParams& p, int n_psi,
                                           int n_theta, const GridOptions& opt) {
    return run_grid<double>(p, n_psi, n_theta, opt);
}

double NumericSplittingGrid::sup_dF(int component) const {
    double mx = 0.0;
    for (const auto& n : nodes)
        mx = std::max(mx, std::fabs(to_double(component == 1 ? n.dF1 : n.dF2)));
    return mx;
}

std::pair<int, long long> NumericSplittingGrid::dominant_mode(int component) const {
    double best = -1.0;
    std::pair<int, long long> mode{0, 0};
    // candidates stay below the grid Nyquist limit so aliases cannot shadow
    // the true mode
    int m1_cap = std::min(10, n_psi / 2 - 1);
    long long m2_cap = std::min<long long>(17, n_theta / 2 - 1);
    for (int m1 = 1; m1 <= m1_cap; ++m1) {
        for (long long m2 = std::max(-4LL, -m2_cap); m2 <= m2_cap; ++m2) {
            double as = 0.0, ac = 0.0;
            for (int i = 0; i < n_psi; ++i) {
                for (int j = 0; j < n_theta; ++j) {
                    const auto& nd = nodes[(size_t)i * n_theta + j];
                    double v = to_double(component == 1 ? nd.dF1 : nd.dF2);
                    double ph = m1 * nd.psi0 - (double)m2 * nd.theta0;
                    as += v * std::sin(ph);
                    ac += v * std::cos(ph);
                }
            }
            double amp = std::hypot(as, ac);
            if (amp > best) { best = amp; mode = {m1, m2}; }
        }
    }
    return mode;
}

MelnikovComparison compare_melnikov(const NumericSplittingGrid& grid,
                                    const SplittingSeries& s1,
                                    const SplittingSeries& s2) {
    MelnikovComparison cmp;
    const SplittingSeries* ss[2] = {&s1, &s2};
    for (int c = 0; c < 2; ++c) {
        double sn = std::sqrt(grid.nu);
        cmp.sqrt_nu_log_grid[c] = sn * std::log(grid.sup_dF(c + 1) / grid.eps);
        cmp.sqrt_nu_log_series[c] =
            sn * (amplitude_sup_log(*ss[c]) - std::log(ss[c]->params.eps));
        cmp.gap[c] = std::fabs(cmp.sqrt_nu_log_grid[c] - cmp.sqrt_nu_log_series[c]);
        cmp.grid_mode[c] = grid.dominant_mode(c + 1);
        cmp.series_mode[c] = {ss[c]->dominant().m1, ss[c]->dominant().m2};
    }
    return cmp;
}

}  // namespace hhsplit
