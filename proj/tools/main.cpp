// hhsplit: scans, tables and grids for the separatrix-splitting analysis of
// the periodically forced Hamiltonian-Hopf normal form.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "csv_out.hpp"
#include "hhsplit/companions.hpp"
#include "hhsplit/geometry.hpp"
#include "hhsplit/manifold.hpp"
#include "hhsplit/universal.hpp"

using namespace hhsplit;
using cli::CsvFile;
using cli::fmt17;
using cli::fmt_dd;

namespace {

struct Common {
    std::string freq = "golden";
    double eps = 1e-3, c = 5.0, d = 7.0;
    std::string out = "-";
    int threads = 1;

    PerturbationParams params(double nu = 0.0625) const {
        PerturbationParams p;
        p.nu = nu;
        p.eps = eps;
        p.c = c;
        p.d = d;
        p.gamma = Frequency::named(freq);
        return p;
    }
    int effective_threads() const {
        if (const char* env = std::getenv("HHSPLIT_THREADS")) {
            int t = std::atoi(env);
            if (t > 0) return t;
        }
        return threads;
    }
    void meta(CsvFile& f, const std::string& cmd) const {
        f.comment("hhsplit " + cmd);
        f.comment("freq=" + freq + " eps=" + fmt17(eps) + " c=" + fmt17(c) +
                  " d=" + fmt17(d));
    }
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--freq", c.freq,
                    "frequency: golden|case1|case2|case3|e-minus-2|gamma1|"
                    "surd:a,b,c,D|quotients:q0,q1,...");
    app->add_option("--eps", c.eps, "perturbation size");
    app->add_option("--c", c.c, "time-singularity parameter");
    app->add_option("--d", c.d, "space-singularity parameter");
    app->add_option("--out", c.out, "output CSV path ('-' for stdout)");
    app->add_option("--threads", c.threads,
                    "worker threads (env HHSPLIT_THREADS overrides)");
}

int cmd_scan(const Common& co, double from, double to, double step,
             double rel_tol) {
    CsvFile f(co.out);
    co.meta(f, "scan");
    f.header({"log2_nu", "sqrt_nu_log_amp_1", "sqrt_nu_log_amp_2", "m1_dom_1",
              "m2_dom_1", "m1_dom_2", "m2_dom_2", "n_terms"});
    HarmonicBudget budget;
    budget.rel_tol = rel_tol;
    auto rows = scan_amplitudes(co.params(), from, to, step, budget,
                                co.effective_threads());
    for (const auto& r : rows)
        f.row({fmt17(r.log2_nu), fmt17(r.sqrt_nu_log_amp[0]),
               fmt17(r.sqrt_nu_log_amp[1]), std::to_string(r.m1_dom[0]),
               std::to_string(r.m2_dom[0]), std::to_string(r.m1_dom[1]),
               std::to_string(r.m2_dom[1]), std::to_string(r.n_terms)});
    f.complete();
    return 0;
}

int cmd_changes(const Common& co, double from, double to, const std::string& mode_s,
                bool asymptotics) {
    ChangeMode mode = ChangeMode::melnikov;
    if (mode_s == "prefactor") mode = ChangeMode::prefactor_only;
    else if (mode_s == "psi") mode = ChangeMode::full_psi;
    else if (mode_s != "melnikov")
        throw CLI::ValidationError("--mode must be melnikov|psi|prefactor");
    CsvFile f(co.out);
    co.meta(f, "changes");
    auto p = co.params();
    f.header({"from_N", "to_N", "component", "log2_nu", "L_at_change"});
    for (int comp : {1, 2}) {
        auto cps = change_points(p.gamma, p, std::exp2(from), std::exp2(to), comp, mode);
        for (const auto& cp : cps)
            f.row({cp.from.N.get_str(), cp.to.N.get_str(), std::to_string(comp),
                   fmt17(std::log2(cp.nu)), fmt17(cp.L_at_change)});
    }
    if (asymptotics) {
        auto a = change_asymptotics(p.gamma, p, std::exp2(from), std::exp2(to));
        f.comment("K_hat=" + fmt17(a.K_hat) + " mean_ratio=" + fmt17(a.ratio) +
                  " mean_log2_gap=" + fmt17(a.log2_gap));
        std::string cs;
        for (double v : a.coeff) cs += fmt17(v) + " ";
        f.comment("coeff=" + cs);
    }
    f.complete();
    return 0;
}

int cmd_psi(const Common& co, double L_from, double L_to, int count, int m1,
            bool log_spaced, bool constants) {
    CsvFile f(co.out);
    co.meta(f, "psi");
    auto p = co.params();
    if (constants) {
        auto m = psi1_max(p);
        f.comment("L_M=" + fmt17(m.L_M) + " Psi_M=" + fmt17(m.Psi_M));
        if (co.freq == "golden") {
            auto gc = golden_change_constants(p);
            f.comment("L_l_prefactor=" + fmt17(gc.L_l_prefactor) +
                      " Lt_l_full=" + fmt17(gc.Lt_l_full) +
                      " psi_hat_at_change=" + fmt17(gc.psi_hat_at_change) +
                      " Lt_max=" + fmt17(gc.Lt_max) +
                      " psi_hat_max=" + fmt17(gc.psi_hat_max));
        }
    }
    f.header({"L", "psi1", "psi2", "I_star"});
    for (int k = 0; k < count; ++k) {
        double t = count == 1 ? 0.0 : (double)k / (count - 1);
        double L = log_spaced ? L_from * std::pow(L_to / L_from, t)
                              : L_from + (L_to - L_from) * t;
        auto e = psi1(L, p);
        f.row({fmt17(L), fmt17(e.psi1), fmt17(e.psi2_for(m1)), fmt17(e.I_star)});
    }
    f.complete();
    return 0;
}

int cmd_freq(const Common& co, int quotients, int approximants, bool cs_limits_flag,
             int dio_lo, int dio_hi, double dom_lo, double dom_hi, int max_order) {
    CsvFile f(co.out);
    co.meta(f, "freq");
    Frequency fr = Frequency::named(co.freq);
    if (quotients > 0) {
        auto q = fr.quotients(quotients);
        std::string line;
        for (auto v : q) line += std::to_string(v) + " ";
        f.comment("quotients=" + line);
    }
    if (approximants > 0) {
        f.header({"n", "N", "D", "s_signed", "c_s", "c_hat"});
        for (const auto& a : fr.best_approximants(approximants))
            f.row({std::to_string(a.n), a.N.get_str(), a.D.get_str(),
                   fmt17(a.s_signed.get_d()), fmt17(a.c_s), fmt17(a.c_hat)});
    }
    if (cs_limits_flag) {
        auto lim = c_s_limits(fr, 64);
        std::string line;
        for (double v : lim.limits) line += fmt17(v) + " ";
        f.comment("cs_period=" + std::to_string(lim.period) + " cs_limits=" + line);
    }
    if (dio_hi > 0) {
        f.header({"n", "Pi_n"});
        auto prof = diophantine_profile(fr, dio_lo, dio_hi);
        for (auto [n, v] : prof.values) f.row({std::to_string(n), fmt17(v)});
        f.comment("argmin_n=" + std::to_string(prof.argmin) +
                  " min=" + fmt17(prof.min_value));
    }
    if (dom_hi > 0) {
        auto rep = dominance_analysis(fr, dom_lo, dom_hi, max_order);
        f.header({"kind", "n", "N", "nu_lo", "nu_hi"});
        for (const auto& e : rep.visible)
            f.row({"visible", std::to_string(e.app.n), e.app.N.get_str(),
                   fmt17(e.nu_lo), fmt17(e.nu_hi)});
        for (const auto& h : rep.hidden)
            f.row({"hidden", std::to_string(h.n), h.N.get_str(), "", ""});
        for (const auto& cr : rep.crossings)
            f.comment("crossing n=" + std::to_string(cr.i) + "->" +
                      std::to_string(cr.j) + " nu=" + fmt17(cr.nu));
    }
    f.complete();
    return 0;
}

int cmd_manifold(const Common& co, double nu, int n_psi, int n_theta,
                 const std::string& precision, bool compare, bool long_run,
                 int order, double tol) {
    if ((n_psi > 128 || n_theta > 128 || nu < std::exp2(-7.0)) && !long_run)
        throw CLI::ValidationError(
            "grids beyond 128x128 or nu < 2^-7 require --long");
    GridOptions opt;
    opt.threads = co.effective_threads();
    opt.integ.order = order;
    opt.integ.tol = tol;
    auto p = co.params(nu);
    opt.progress = [](int done, int total) {
        std::cerr << "\r" << done << "/" << total << std::flush;
    };
    NumericSplittingGrid grid = precision == "double"
        ? splitting_grid_double(p, n_psi, n_theta, opt)
        : splitting_grid(p, n_psi, n_theta, opt);
    std::cerr << "\n";
    CsvFile f(co.out);
    co.meta(f, "manifold");
    f.comment("nu=" + fmt17(nu) + " grid=" + std::to_string(n_psi) + "x" +
              std::to_string(n_theta) + " precision=" + precision);
    f.header({"psi0", "theta0", "F1u", "F2u", "F1s", "F2s", "dF1", "dF2"});
    for (const auto& n : grid.nodes)
        f.row({fmt17(n.psi0), fmt17(n.theta0), fmt_dd(n.F1u), fmt_dd(n.F2u),
               fmt_dd(n.F1s), fmt_dd(n.F2s), fmt_dd(n.dF1), fmt_dd(n.dF2)});
    if (compare) {
        auto s1 = build_series(p, 1);
        auto s2 = build_series(p, 2);
        auto cmp = compare_melnikov(grid, s1, s2);
        for (int c2 = 0; c2 < 2; ++c2) {
            f.comment("component " + std::to_string(c2 + 1) +
                      ": sqrt_nu_log grid=" + fmt17(cmp.sqrt_nu_log_grid[c2]) +
                      " series=" + fmt17(cmp.sqrt_nu_log_series[c2]) +
                      " gap=" + fmt17(cmp.gap[c2]) + " grid_mode=(" +
                      std::to_string(cmp.grid_mode[c2].first) + "," +
                      std::to_string(cmp.grid_mode[c2].second) + ")");
        }
    }
    f.complete();
    return 0;
}

int cmd_nodal(const Common& co, double nu, int component, int resolution,
              double scan_from, double scan_to, double scan_step) {
    CsvFile f(co.out);
    co.meta(f, "nodal");
    auto p = co.params(nu);
    if (scan_to != 0.0) {
        f.header({"log2_nu1", "log2_nu2", "m1_before", "m2_before", "m1_after",
                  "m2_after"});
        auto chs = topology_change_scan(p, component, scan_from, scan_to, scan_step,
                                        {}, resolution);
        for (const auto& tc : chs)
            f.row({fmt17(std::log2(tc.nu1)), fmt17(std::log2(tc.nu2)),
                   std::to_string(tc.before.first), std::to_string(tc.before.second),
                   std::to_string(tc.after.first), std::to_string(tc.after.second)});
    } else {
        auto s = build_series(p, component);
        auto nl = nodal_lines(s, resolution);
        f.header({"chain_id", "psi0", "theta0"});
        for (size_t k = 0; k < nl.polylines.size(); ++k)
            for (auto [psi, th] : nl.polylines[k])
                f.row({std::to_string(k), fmt17(psi), fmt17(th)});
    }
    f.complete();
    return 0;
}

int cmd_volume(const Common& co, double from, double to, double step) {
    CsvFile f(co.out);
    co.meta(f, "volume");
    f.header({"log2_nu", "sign", "log10_absV"});
    PerturbationParams p = co.params();
    for (double l2 = to; l2 >= from - 1e-12; l2 -= step) {
        p.nu = std::exp2(l2);
        auto v = splitting_volume(build_series(p, 1), build_series(p, 2));
        f.row({fmt17(l2), std::to_string(v.V.sign),
               fmt17(v.V.log_mag / std::log(10.0))});
    }
    f.complete();
    return 0;
}

int cmd_appendix(const Common& co, const std::string& which, int k1, int k2, int l1,
                 int l2, double omega, double nu_from, double nu_to, int samples,
                 double tau, double preg, double rho) {
    CsvFile f(co.out);
    co.meta(f, "appendix-" + which);
    if (which == "a") {
        Monomial mo{k1, k2, l1, l2};
        auto form = autonomous_asymptotic_form(mo);
        f.comment("power=" + std::to_string(form.first) +
                  " exponent_multiplier=" + fmt17(form.second));
        f.header({"nu", "A1", "nu_log_A1"});
        std::vector<std::pair<double, double>> pts;
        for (int k = 0; k < samples; ++k) {
            double nu = nu_from + (nu_to - nu_from) * k / std::max(1, samples - 1);
            double a1 = autonomous_leading_amplitude(mo, nu);
            pts.push_back({nu, a1});
            f.row({fmt17(nu), fmt17(a1), fmt17(nu * std::log(a1))});
        }
        if ((int)pts.size() >= 6) {
            auto fit = autonomous_fit(pts, true);
            f.comment("frozen_c_fit a=" + fmt17(fit.a) + " b=" + fmt17(fit.b) +
                      " d=" + fmt17(fit.d));
            auto fr = autonomous_fit(pts, false);
            f.comment("free_fit a=" + fmt17(fr.a) + " b=" + fmt17(fr.b) + " c=" +
                      fmt17(fr.c) + " d=" + fmt17(fr.d));
        }
    } else if (which == "b") {
        f.header({"k", "term"});
        double res = duffing_Ic_residues(co.d, omega);
        auto ser = duffing_Ic_series(co.d, omega);
        for (size_t k = 0; k < ser.terms.size(); ++k)
            f.row({std::to_string(k + 2), fmt17(ser.terms[k])});
        f.comment("residues=" + fmt17(res) + " series=" + fmt17(ser.value) +
                  " largest_term_k=" + std::to_string(ser.largest_term_index));
    } else if (which == "c") {
        f.header({"nu", "k_M", "log_d_kM"});
        RegularityMode mode;
        mode.analytic = preg <= 0.0;
        mode.p = preg;
        mode.rho = rho;
        for (int k = 0; k < samples; ++k) {
            double nu = nu_from * std::pow(nu_to / nu_from,
                                           (double)k / std::max(1, samples - 1));
            auto rd = regularity_dominant(mode, 0.7, tau, nu);
            f.row({fmt17(nu), fmt17(rd.k_M), fmt17(rd.log_d_kM)});
        }
    } else {
        throw CLI::ValidationError("--which must be a|b|c");
    }
    f.complete();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"separatrix splitting of the forced Hamiltonian-Hopf normal form"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file (flags override)");

    Common co;
    double from = -24.0, to = -2.0, step = 0.05, rel_tol = 1e-10;
    std::string mode = "melnikov", precision = "extended", which = "a";
    bool asym = false, constants = false, log_spaced = false, compare = false,
         long_run = false, cs_limits_flag = false;
    double nu = 0.0625, L_from = 0.01, L_to = 10.0, omega = 5.0;
    int count = 200, m1 = 1, quotients = 0, approximants = 0, dio_lo = 2,
        dio_hi = 0, max_order = 40, n_psi = 64, n_theta = 64, component = 1,
        resolution = 256, order = 20, samples = 25;
    double dom_lo = 0.0, dom_hi = 0.0, scan_from = 0.0, scan_to = 0.0,
           scan_step = 1e-3, tol = 1e-30, nu_from = 0.05, nu_to = 0.2, tau = 1.0,
           preg = 0.0, rho = 1.0;
    int k1 = 0, k2 = 0, l1 = 5, l2v = 0;

    auto* scan = app.add_subcommand("scan", "amplitude/dominant-harmonic scan over nu");
    add_common(scan, co);
    scan->add_option("--from-log2nu", from);
    scan->add_option("--to-log2nu", to);
    scan->add_option("--step", step);
    scan->add_option("--rel-tol", rel_tol, "series truncation (default 1e-10)");

    auto* changes = app.add_subcommand("changes", "dominant-harmonic change points");
    add_common(changes, co);
    changes->add_option("--from-log2nu", from);
    changes->add_option("--to-log2nu", to);
    changes->add_option("--mode", mode, "melnikov|psi|prefactor");
    changes->add_flag("--asymptotics", asym, "append K_hat/Coeff fits");

    auto* psi = app.add_subcommand("psi", "universal function tables and maxima");
    add_common(psi, co);
    psi->add_option("--from-L", L_from);
    psi->add_option("--to-L", L_to);
    psi->add_option("--count", count);
    psi->add_option("--m1", m1, "m1 for psi2");
    psi->add_flag("--log", log_spaced, "log-spaced L grid");
    psi->add_flag("--constants", constants, "emit maxima and change constants");

    auto* freq = app.add_subcommand("freq", "CFE, approximants, profiles, dominance");
    add_common(freq, co);
    freq->add_option("--quotients", quotients);
    freq->add_option("--approximants", approximants);
    freq->add_flag("--cs-limits", cs_limits_flag);
    freq->add_option("--diophantine-from", dio_lo);
    freq->add_option("--diophantine-to", dio_hi);
    freq->add_option("--dominance-lo", dom_lo, "scaled nu, lower end");
    freq->add_option("--dominance-hi", dom_hi, "scaled nu, upper end");
    freq->add_option("--max-order", max_order);

    auto* manifold = app.add_subcommand("manifold", "direct W^u/W^s splitting grid");
    add_common(manifold, co);
    manifold->add_option("--nu", nu);
    manifold->add_option("--n-psi", n_psi);
    manifold->add_option("--n-theta", n_theta);
    manifold->add_option("--precision", precision, "double|extended");
    manifold->add_option("--order", order, "Taylor order");
    manifold->add_option("--tol", tol, "Taylor tolerance");
    manifold->add_flag("--compare", compare, "append Melnikov comparison lines");
    manifold->add_flag("--long", long_run, "allow production-size runs");

    auto* nodal = app.add_subcommand("nodal", "nodal polylines / topology scan");
    add_common(nodal, co);
    nodal->add_option("--nu", nu);
    nodal->add_option("--component", component);
    nodal->add_option("--resolution", resolution);
    nodal->add_option("--scan-from-log2nu", scan_from);
    nodal->add_option("--scan-to-log2nu", scan_to);
    nodal->add_option("--scan-step", scan_step);

    auto* volume = app.add_subcommand("volume", "splitting-volume scan");
    add_common(volume, co);
    volume->add_option("--from-log2nu", from);
    volume->add_option("--to-log2nu", to);
    volume->add_option("--step", step);

    auto* appendix = app.add_subcommand("appendix", "companion computations");
    add_common(appendix, co);
    appendix->add_option("--which", which, "a|b|c");
    appendix->add_option("--k1", k1);
    appendix->add_option("--k2", k2);
    appendix->add_option("--l1", l1);
    appendix->add_option("--l2", l2v);
    appendix->add_option("--omega", omega);
    appendix->add_option("--nu-from", nu_from);
    appendix->add_option("--nu-to", nu_to);
    appendix->add_option("--samples", samples);
    appendix->add_option("--tau", tau);
    appendix->add_option("--p", preg, "C^p regularity (0 = analytic mode)");
    appendix->add_option("--rho", rho, "analyticity width for the analytic mode");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scan->parsed()) return cmd_scan(co, from, to, step, rel_tol);
        if (changes->parsed()) return cmd_changes(co, from, to, mode, asym);
        if (psi->parsed())
            return cmd_psi(co, L_from, L_to, count, m1, log_spaced, constants);
        if (freq->parsed())
            return cmd_freq(co, quotients, approximants, cs_limits_flag, dio_lo, dio_hi,
                            dom_lo, dom_hi, max_order);
        if (manifold->parsed())
            return cmd_manifold(co, nu, n_psi, n_theta, precision, compare, long_run,
                                order, tol);
        if (nodal->parsed())
            return cmd_nodal(co, nu, component, resolution, scan_from, scan_to,
                             scan_step);
        if (volume->parsed()) return cmd_volume(co, from, to, step);
        if (appendix->parsed())
            return cmd_appendix(co, which, k1, k2, l1, l2v, omega, nu_from, nu_to,
                                samples, tau, preg, rho);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
