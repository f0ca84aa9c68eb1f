#include "doctest.h"

#include <cmath>

#include "hhsplit/geometry.hpp"

using namespace hhsplit;

namespace {
SplittingSeries single_mode(int m1, long long m2, int component = 1) {
    SplittingSeries s;
    s.component = component;
    s.params.nu = 0.05;
    HarmonicTerm t;
    t.m1 = m1;
    t.m2 = m2;
    t.log_amp = 0.0;
    t.sign = 1;
    t.component = component;
    s.terms.push_back(t);
    return s;
}
}  // namespace

TEST_CASE("single-mode nodal lines: closed geodesics of slope m1/m2") {
    // the zero set m1 psi - m2 theta in pi Z stitches into two closed torus
    // geodesics for coprime (m1, m2) (the level sets of 0 and pi); each winds
    // m2 times in psi and m1 times in theta, so a chain carries about
    // (m1 + m2) * resolution / 2 vertices
    for (auto [m1, m2] : {std::pair{1, 1LL}, {1, 2LL}, {2, 3LL}}) {
        auto s = single_mode(m1, m2);
        auto nl = nodal_lines(s, 128);
        CHECK((long long)nl.polylines.size() == 2);
        for (const auto& chain : nl.polylines) {
            CHECK((long long)chain.size() >= (m1 + m2) * 128 / 2 - 4);
            // closed on the torus: endpoints coincide modulo 2 pi
            double dx = std::remainder(chain.front().first - chain.back().first,
                                       2 * M_PI);
            double dy = std::remainder(chain.front().second - chain.back().second,
                                       2 * M_PI);
            CHECK(std::fabs(dx) + std::fabs(dy) < 1e-6);
            for (auto [p, t] : chain)
                CHECK(std::fabs(std::sin(m1 * p - (double)m2 * t)) < 1e-2);
        }
    }
}

TEST_CASE("marching squares vertices sit on the zero set at 512 resolution") {
    auto s = single_mode(1, 1);
    auto nl = nodal_lines(s, 512);
    double sup = 1.0;  // amplitude of the scaled single mode
    for (const auto& chain : nl.polylines)
        for (auto [p, t] : chain)
            CHECK(std::fabs(std::sin(p - t)) < 1e-3 * sup);
}

TEST_CASE("identically zero field is rejected") {
    CHECK_THROWS(nodal_lines([](double, double) { return 0.0; }, 1, 0.1, 64));
}

TEST_CASE("component nodal sets intersect at homoclinic points") {
    PerturbationParams p;
    p.nu = std::exp2(-4.0);
    auto s1 = build_series(p, 1);
    auto s2 = build_series(p, 2);
    // (0,0) is a common zero of both sine series
    double lr;
    CHECK(evaluate_scaled(s1, 0.0, 0.0, lr) == 0.0);
    CHECK(evaluate_scaled(s2, 0.0, 0.0, lr) == 0.0);
}

TEST_CASE("topology scan finds the (1,1) -> (1,2) change of component 1") {
    PerturbationParams p;
    auto ch = topology_change_scan(p, 1, -4.3, -4.0, 1e-2);
    REQUIRE(ch.size() == 1);
    CHECK(ch[0].before == std::pair{1, 1LL});
    CHECK(ch[0].after == std::pair{1, 2LL});
    // the change sits inside the direct-computation bracket (-4.113, -4.112)
    CHECK(std::log2(ch[0].nu1) <= -4.105);
    CHECK(std::log2(ch[0].nu2) >= -4.120);
}

TEST_CASE("volume: proportional series give V = 0 exactly") {
    auto s1 = single_mode(5, 8, 1);
    auto s2 = single_mode(5, 8, 2);
    s2.terms[0].log_amp = -1.3;  // proportional, different scale
    auto v = splitting_volume(s1, s2);
    CHECK(v.V.sign == 0);
}

TEST_CASE("volume antisymmetry and agreement with finite differences") {
    PerturbationParams p;
    p.nu = std::exp2(-9.0);
    auto s1 = build_series(p, 1);
    auto s2 = build_series(p, 2);
    auto v12 = splitting_volume(s1, s2);
    auto v21 = splitting_volume(s2, s1);
    CHECK(v12.V.sign == -v21.V.sign);
    CHECK(v12.V.log_mag == doctest::Approx(v21.V.log_mag).epsilon(1e-12));

    // central finite differences of the scaled evaluations
    const double h = 1e-6;
    double lr1, lr2;
    auto num_a = [&](const SplittingSeries& s, double& lr) {
        return (evaluate_scaled(s, h, 0.0, lr) - evaluate_scaled(s, -h, 0.0, lr)) /
               (2 * h);
    };
    auto num_b = [&](const SplittingSeries& s, double& lr) {
        return (evaluate_scaled(s, 0.0, h, lr) - evaluate_scaled(s, 0.0, -h, lr)) /
               (2 * h);
    };
    double a1 = num_a(s1, lr1), b1 = num_b(s1, lr1);
    double a2 = num_a(s2, lr2), b2 = num_b(s2, lr2);
    double det_fd = a1 * b2 - b1 * a2;
    double det_series = v12.a1 * v12.b2 - v12.b1 * v12.a2;
    CHECK(det_series == doctest::Approx(det_fd).epsilon(1e-8));
}

TEST_CASE("volume scan: |V| dips at the paper's three locations") {
    PerturbationParams p;
    double prev = 0.0;
    std::vector<std::pair<double, double>> prof;  // (log2nu, log10|V|)
    for (double l2 = -7.8; l2 >= -12.2; l2 -= 0.02) {
        p.nu = std::exp2(l2);
        auto v = splitting_volume(build_series(p, 1), build_series(p, 2));
        // remove the exponential per-component envelope: the dips live in the
        // normalized determinant a1 b2 - b1 a2
        double det = std::fabs(v.a1 * v.b2 - v.b1 * v.a2);
        prof.push_back({l2, std::log10(det)});
        (void)prev;
    }
    auto local_min_near = [&](double center, double window) {
        double best = 1e300, at = 0;
        for (auto [l2, lv] : prof)
            if (std::fabs(l2 - center) < window && lv < best) { best = lv; at = l2; }
        // confirm it is interior: strictly larger values at the window edges
        double edge = -1e300;
        for (auto [l2, lv] : prof)
            if (std::fabs(std::fabs(l2 - center) - window) < 0.011)
                edge = std::max(edge, lv);
        CHECK(edge > best + 0.5);
        return at;
    };
    CHECK(local_min_near(-8.40, 0.35) == doctest::Approx(-8.40).epsilon(0.05 / 8.4));
    CHECK(local_min_near(-9.83, 0.35) == doctest::Approx(-9.83).epsilon(0.05 / 9.8));
    CHECK(local_min_near(-11.20, 0.35) == doctest::Approx(-11.20).epsilon(0.05 / 11.2));
}
