#include "doctest.h"

#include <cmath>

#include "hhsplit/frequency.hpp"

using namespace hhsplit;

TEST_CASE("golden mean quotients are all ones") {
    auto q = Frequency::golden().quotients(6);
    CHECK(q[0] == 0);
    for (int j = 1; j < 6; ++j) CHECK(q[j] == 1);
}

TEST_CASE("e-2 quotient pattern") {
    auto q = Frequency::e_minus_2().quotients(11);
    std::vector<long long> expect = {0, 1, 2, 1, 1, 4, 1, 1, 6, 1, 1};
    CHECK(q == expect);
}

TEST_CASE("case1 surd quotients: ten ones then 1,10,1,1,10,1") {
    auto q = Frequency::case1().quotients(17);
    for (int j = 1; j <= 10; ++j) CHECK(q[j] == 1);
    std::vector<long long> tail(q.begin() + 11, q.begin() + 17);
    CHECK(tail == std::vector<long long>{1, 10, 1, 1, 10, 1});
}

TEST_CASE("case2 surd quotients alternate 1,10 after the prefix") {
    auto q = Frequency::case2().quotients(18);
    for (int j = 1; j <= 11; ++j) CHECK(q[j] == 1);
    std::vector<long long> tail(q.begin() + 12, q.begin() + 18);
    CHECK(tail == std::vector<long long>{10, 1, 10, 1, 10, 1});
}

TEST_CASE("best approximants of e-2") {
    auto apps = Frequency::e_minus_2().best_approximants(11);
    // orders 1..10 (order 0 is 0/1)
    long long N[] = {1, 2, 3, 5, 23, 28, 51, 334, 385, 719};
    long long D[] = {1, 3, 4, 7, 32, 39, 71, 465, 536, 1001};
    CHECK(apps[0].N.get_si() == 0);
    CHECK(apps[0].D.get_si() == 1);
    for (int n = 1; n <= 10; ++n) {
        CHECK(apps[n].N.get_si() == N[n - 1]);
        CHECK(apps[n].D.get_si() == D[n - 1]);
    }
}

TEST_CASE("golden numerators are the Fibonacci sequence") {
    auto apps = Frequency::golden().best_approximants(12);
    long long fib[] = {1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
    for (int n = 1; n <= 11; ++n) CHECK(apps[n].N.get_si() == fib[n - 1]);
}

TEST_CASE("determinant identity D_n N_{n-1} - D_{n-1} N_n = +-1, all cases, n <= 50") {
    for (auto f : {Frequency::golden(), Frequency::case1(), Frequency::case2(),
                   Frequency::case3(), Frequency::e_minus_2(), Frequency::gamma1()}) {
        auto apps = f.best_approximants(51);
        for (size_t n = 1; n < apps.size(); ++n) {
            mpz_class det = apps[n].D * apps[n - 1].N - apps[n - 1].D * apps[n].N;
            CHECK(mpz_class(abs(det)).get_si() == 1);
        }
        // signs of s alternate
        for (size_t n = 2; n < apps.size(); ++n)
            CHECK(sgn(apps[n].s_signed) == -sgn(apps[n - 1].s_signed));
    }
}

TEST_CASE("approximant-distance lemma: 1/(D|Dg-N|) = q_plus + 1/q_minus to 1e-12") {
    for (auto f : {Frequency::golden(), Frequency::case1(), Frequency::case2(),
                   Frequency::case3()}) {
        auto apps = f.best_approximants(51);
        for (int n = 2; n <= 50; ++n) {
            double lhs = apps[n].c_hat;
            mpf_class qm(0, 192);
            qm = mpf_class(apps[n].D, 192) / mpf_class(apps[n - 1].D, 192);
            double rhs = f.q_plus(n) + 1.0 / qm.get_d();
            CHECK(std::fabs(lhs - rhs) < 1e-12 * std::fabs(lhs));
        }
    }
}

TEST_CASE("c_s approximation error scales like D_n^-2") {
    auto f = Frequency::golden();
    double g = f.value_d();
    auto apps = f.best_approximants(41);
    double bound = 0.0;
    for (int n = 3; n <= 40; ++n) {
        mpf_class qm(0, 192);
        qm = mpf_class(apps[n].D, 192) / mpf_class(apps[n - 1].D, 192);
        double approx = (f.q_plus(n) + 1.0 / qm.get_d()) / g;  // Lemma's csn form
        double rel = std::fabs(approx - apps[n].c_s) / apps[n].c_s;
        double Dn = apps[n].D.get_d();
        bound = std::max(bound, rel * Dn * Dn);
    }
    CHECK(bound < 10.0);   // bounded, order-of-magnitude check
    CHECK(bound > 1e-4);   // and not vacuously zero
}

TEST_CASE("gamma1 denominators: D_n/n! tends to 2.2796") {
    // r_n = D_n/n! satisfies r_n = r_{n-1} + r_{n-2}/(n(n-1)): the exact
    // big-integer ratio at n = 200 must match the double recurrence, and the
    // recurrence limit (convergence like 1/n) is the paper's constant
    auto f = Frequency::gamma1();
    auto apps = f.best_approximants(201);
    mpf_class fact(1.0, 2048);
    for (int k = 1; k <= 200; ++k) fact *= k;
    mpf_class ratio(0, 2048);
    ratio = mpf_class(apps[200].D, 2048) / fact;
    double r_pp = 0.0, r_p = 1.0, r200 = 0.0;  // r_0 = D_0/0! = 1, r_{-1} slot
    double r = 1.0;
    r_pp = 0.0;  // D_{-1}/(-1)! treated through the n = 1 start below
    r_p = 1.0;   // r_0 = 1
    r = 1.0;     // r_1 = D_1/1! = 1
    for (int n = 2; n <= 1000000; ++n) {
        double rn = r + r_p / ((double)n * (n - 1.0));
        r_p = r;
        r = rn;
        if (n == 200) r200 = rn;
    }
    CHECK(ratio.get_d() == doctest::Approx(r200).epsilon(1e-12));
    CHECK(r == doctest::Approx(2.2796).epsilon(1e-3 / 2.2796));
}

TEST_CASE("c_s limits: golden, case1, case2") {
    auto g = c_s_limits(Frequency::golden(), 40);
    REQUIRE(g.period == 1);
    CHECK(g.limits[0] == doctest::Approx(3.61803398).epsilon(1e-6));

    auto c1 = c_s_limits(Frequency::case1(), 60);
    REQUIRE(c1.period == 3);
    std::vector<double> v1 = c1.limits;
    std::sort(v1.begin(), v1.end());
    CHECK(v1[0] == doctest::Approx(3.249322).epsilon(1e-5));
    CHECK(v1[1] == doctest::Approx(3.249322).epsilon(1e-5));
    CHECK(v1[2] == doctest::Approx(17.871271).epsilon(1e-5));

    auto c2 = c_s_limits(Frequency::case2(), 60);
    REQUIRE(c2.period == 2);
    std::vector<double> v2 = c2.limits;
    std::sort(v2.begin(), v2.end());
    CHECK(v2[0] == doctest::Approx(1.91442978).epsilon(1e-6));
    CHECK(v2[1] == doctest::Approx(19.1442978).epsilon(1e-6));

    CHECK_THROWS_AS((void)c_s_limits(Frequency::e_minus_2(), 40), std::domain_error);
}

TEST_CASE("diophantine profile of gamma1") {
    auto prof = diophantine_profile(Frequency::gamma1(), 2, 1000);
    double pi6 = 0.0, pi1000 = 0.0;
    for (auto [n, v] : prof.values) {
        if (n == 6) pi6 = v;
        if (n == 1000) pi1000 = v;
    }
    CHECK(pi6 == doctest::Approx(0.50201173).epsilon(1e-6 / 0.5));
    CHECK(pi1000 == doctest::Approx(0.68014970).epsilon(1e-5 / 0.68));
    CHECK(prof.argmin == 6);
    // N6/D6 = 972/1393
    auto apps = Frequency::gamma1().best_approximants(7);
    CHECK(apps[6].N.get_si() == 972);
    CHECK(apps[6].D.get_si() == 1393);
}

TEST_CASE("e-2 profile: local minima at n = 1 (mod 3) approach a positive constant") {
    auto prof = diophantine_profile(Frequency::e_minus_2(), 2, 400);
    // collect the n = 1 (mod 3) subsequence: it carries the minima
    std::vector<double> minima;
    for (auto [n, v] : prof.values)
        if (n % 3 == 1) minima.push_back(v);
    for (size_t k = 1; k < minima.size(); ++k) CHECK(minima[k] > 0.1);
    // and they settle: last two agree to 1%
    double a = minima[minima.size() - 2], b = minima.back();
    CHECK(std::fabs(a - b) < 0.01 * b);
}

TEST_CASE("dominance: golden makes every Fibonacci numerator visible") {
    auto rep = dominance_analysis(Frequency::golden(), std::exp2(-30.0),
                                  std::exp2(-8.0), 40);
    REQUIRE(rep.visible.size() >= 10);
    // consecutive visible numerators are consecutive Fibonacci numbers
    for (size_t k = 1; k < rep.visible.size(); ++k) {
        CHECK(rep.visible[k].app.n == rep.visible[k - 1].app.n + 1);
    }
    // nothing interleaved is hidden: hidden approximants lie outside the
    // visible order range entirely
    int n_lo = rep.visible.front().app.n, n_hi = rep.visible.back().app.n;
    for (const auto& h : rep.hidden)
        CHECK((h.n < n_lo || h.n > n_hi));
    // intervals are disjoint and ordered decreasingly
    for (size_t k = 1; k < rep.visible.size(); ++k)
        CHECK(rep.visible[k].nu_hi <= rep.visible[k - 1].nu_lo + 1e-18);
}

TEST_CASE("dominance: case 2 hides the small-c_hat approximants") {
    auto rep = dominance_analysis(Frequency::case2(), std::exp2(-34.0),
                                  std::exp2(-10.0), 20);
    std::vector<long long> vis;
    for (auto& e : rep.visible) vis.push_back(e.app.N.get_si());
    // 55, 945, 11285 never dominate: they sit in the hidden list
    std::vector<long long> hid;
    for (auto& a : rep.hidden) hid.push_back(a.N.get_si());
    for (long long h : {55LL, 945LL, 11285LL})
        CHECK(std::find(hid.begin(), hid.end(), h) != hid.end());
    for (long long v : {21LL, 34LL, 89LL, 1034LL, 12319LL})
        CHECK(std::find(vis.begin(), vis.end(), v) != vis.end());
}

TEST_CASE("dominance crossings sit on the envelope: |T_i - T_j| < 1e-12 T_i") {
    auto rep = dominance_analysis(Frequency::case2(), std::exp2(-34.0),
                                  std::exp2(-10.0), 20);
    auto T = [&](const Approximant& a, double nu) {
        double N = a.N.get_d();
        return N + 1.0 / (nu * N * a.c_hat);
    };
    auto find_app = [&](int n) -> const Approximant& {
        for (auto& a : rep.considered)
            if (a.n == n) return a;
        throw std::runtime_error("missing approximant");
    };
    REQUIRE(!rep.crossings.empty());
    for (auto& c : rep.crossings) {
        double ti = T(find_app(c.i), c.nu), tj = T(find_app(c.j), c.nu);
        CHECK(std::fabs(ti - tj) < 1e-12 * ti);
    }
}

TEST_CASE("appendix-F synthetic block q3=q4=1 between large q2, q5") {
    // gamma = [0; 5, 40, 1, 1, 70, 5, 5, 5, ...]: N2 visible, N3 hidden,
    // and the scaled crossings obey the displayed ordering
    std::vector<long long> pre = {0, 5, 40, 1, 1, 70};
    auto f = Frequency::explicit_quotients(pre, [](int) { return 5LL; }, "synthetic");
    auto apps = f.best_approximants(7);
    auto inv = [&](int n) {
        return 1.0 / (apps[n].N.get_d() * apps[n].c_hat);
    };
    auto cross = [&](int i, int j) {
        return (inv(i) - inv(j)) / (apps[j].N.get_d() - apps[i].N.get_d());
    };
    double n12 = cross(1, 2), n13 = cross(1, 3), n14 = cross(1, 4);
    double n24 = cross(2, 4), n34 = cross(3, 4);
    CHECK(std::max(n24, n34) < n14);
    CHECK(n14 < std::min(n12, n13));
    // q2 = 40 << q5 = 70: N2 dominates in a range, N3 stays hidden
    auto rep = dominance_analysis(f, 1e-9, 0.5, 8);
    std::vector<int> vis_orders;
    for (auto& e : rep.visible) vis_orders.push_back(e.app.n);
    CHECK(std::find(vis_orders.begin(), vis_orders.end(), 2) != vis_orders.end());
    bool n3_hidden = true;
    for (auto& e : rep.visible) n3_hidden = n3_hidden && (e.app.n != 3);
    CHECK(n3_hidden);
}

TEST_CASE("rational input raises") {
    CHECK_THROWS((void)Frequency::quadratic_surd(1, 0, 3, 0, 5, "rational"));
}
