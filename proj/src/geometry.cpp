#include "hhsplit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace hhsplit {

namespace {

// edge key for vertex deduplication: (cell edge id) -> polyline joining
struct Seg { double x0, y0, x1, y1; };

}  // namespace

NodalLineSet nodal_lines(const std::function<double(double, double)>& field,
                         int component, double nu, int resolution) {
    if (resolution < 8) throw std::invalid_argument("resolution must be >= 8");
    const int n = resolution;
    const double h = 2.0 * M_PI / n;
    std::vector<double> vals((size_t)n * n);
    double sup = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = field(i * h, j * h);
            vals[(size_t)i * n + j] = v;
            sup = std::max(sup, std::fabs(v));
        }
    if (sup == 0.0) throw std::runtime_error("identically zero field has no nodal lines");
    // nudge exact grid-node zeros off zero so contours cross cell edges
    // transversally instead of through corners
    for (auto& v : vals)
        if (v == 0.0) v = 1e-13 * sup;

    auto at = [&](int i, int j) { return vals[(size_t)(i % n) * n + (j % n)]; };
    // marching squares with linear interpolation; collect segments then chain
    std::vector<Seg> segs;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double v00 = at(i, j), v10 = at(i + 1, j), v01 = at(i, j + 1),
                   v11 = at(i + 1, j + 1);
            int c = (v00 > 0) | ((v10 > 0) << 1) | ((v11 > 0) << 2) | ((v01 > 0) << 3);
            if (c == 0 || c == 15) continue;
            double x = i * h, y = j * h;
            auto lerp = [](double a, double b) { return a / (a - b); };
            // edge points: bottom(e0: v00-v10), right(e1: v10-v11),
            // top(e2: v01-v11), left(e3: v00-v01)
            double ex[4] = {x + h * lerp(v00, v10), x + h, x + h * lerp(v01, v11), x};
            double ey[4] = {y, y + h * lerp(v10, v11), y + h, y + h * lerp(v00, v01)};
            auto emit = [&](int a, int b) {
                // degenerate corner-touching segments contribute nothing
                if (std::fabs(ex[a] - ex[b]) + std::fabs(ey[a] - ey[b]) < h * 1e-6)
                    return;
                segs.push_back({ex[a], ey[a], ex[b], ey[b]});
            };
            switch (c) {
                case 1: case 14: emit(3, 0); break;
                case 2: case 13: emit(0, 1); break;
                case 3: case 12: emit(3, 1); break;
                case 4: case 11: emit(1, 2); break;
                case 6: case 9:  emit(0, 2); break;
                case 7: case 8:  emit(3, 2); break;
                case 5: case 10:
                    // saddle: resolve by the cell-center sign
                    if ((field(x + h / 2, y + h / 2) > 0) == (c == 5)) { emit(3, 0); emit(1, 2); }
                    else { emit(0, 1); emit(3, 2); }
                    break;
            }
        }
    }
    // chain segments into polylines by matching endpoints on a snapped lattice;
    // indices are taken modulo the lattice period so the torus seam closes
    const double snap = h * 1e-7;
    const long long period = std::llround(2.0 * M_PI / snap);
    auto key = [&](double x, double y) {
        auto idx = [&](double v) {
            v = std::fmod(v, 2.0 * M_PI);
            if (v < 0) v += 2.0 * M_PI;
            long long k = std::llround(v / snap);
            return k >= period ? k - period : k;
        };
        return std::make_pair(idx(x), idx(y));
    };
    std::multimap<std::pair<long long, long long>, int> ends;
    for (int k = 0; k < (int)segs.size(); ++k) {
        ends.insert({key(segs[k].x0, segs[k].y0), k});
        ends.insert({key(segs[k].x1, segs[k].y1), k});
    }
    std::vector<char> used(segs.size(), 0);
    NodalLineSet out;
    out.component = component;
    out.nu = nu;
    for (int k0 = 0; k0 < (int)segs.size(); ++k0) {
        if (used[k0]) continue;
        std::deque<std::pair<double, double>> chain;
        used[k0] = 1;
        chain.emplace_back(segs[k0].x0, segs[k0].y0);
        chain.emplace_back(segs[k0].x1, segs[k0].y1);
        // grow in both directions until no unused segment continues the chain
        for (int dir = 0; dir < 2; ++dir) {
            bool extended = true;
            while (extended) {
                extended = false;
                auto [ex, ey] = dir == 0 ? chain.back() : chain.front();
                auto range = ends.equal_range(key(ex, ey));
                for (auto it = range.first; it != range.second; ++it) {
                    int k = it->second;
                    if (used[k]) continue;
                    used[k] = 1;
                    bool match_start = key(segs[k].x0, segs[k].y0) == key(ex, ey);
                    auto next = match_start ? std::pair{segs[k].x1, segs[k].y1}
                                            : std::pair{segs[k].x0, segs[k].y0};
                    if (dir == 0) chain.push_back(next);
                    else chain.push_front(next);
                    extended = true;
                    break;
                }
            }
        }
        out.polylines.emplace_back(chain.begin(), chain.end());
    }
    return out;
}

NodalLineSet nodal_lines(const SplittingSeries& s, int resolution) {
    double lr;
    auto f = [&s, &lr](double p, double t) mutable {
        double ref;
        return evaluate_scaled(s, p, t, ref);
    };
    (void)lr;
    return nodal_lines(f, s.component, s.params.nu, resolution);
}

std::pair<int, long long> TopologyClass::label() const {
    if (windings.size() < 1) return {0, 0};
    for (const auto& w : windings)
        if (w != windings.front()) return {0, 0};
    return {windings.front().second, windings.front().first};
}

TopologyClass nodal_topology(const SplittingSeries& s, int resolution) {
    auto nl = nodal_lines(s, resolution);
    TopologyClass cls;
    for (const auto& ch : nl.polylines) {
        double wp = 0.0, wt = 0.0;
        for (size_t k = 1; k < ch.size(); ++k) {
            wp += std::remainder(ch[k].first - ch[k - 1].first, 2 * M_PI);
            wt += std::remainder(ch[k].second - ch[k - 1].second, 2 * M_PI);
        }
        wp += std::remainder(ch.front().first - ch.back().first, 2 * M_PI);
        wt += std::remainder(ch.front().second - ch.back().second, 2 * M_PI);
        int ip = (int)std::lround(wp / (2 * M_PI));
        int it = (int)std::lround(wt / (2 * M_PI));
        // contractible loops appear and vanish around reconnections; the
        // topology label is carried by the winding chains
        if (ip == 0 && it == 0) continue;
        cls.windings.push_back({std::abs(ip), std::abs(it)});
    }
    std::sort(cls.windings.begin(), cls.windings.end());
    return cls;
}

std::vector<TopologyChange> topology_change_scan(const PerturbationParams& base,
                                                 int component, double log2_lo,
                                                 double log2_hi, double log2_step,
                                                 const HarmonicBudget& budget,
                                                 int resolution) {
    std::vector<TopologyChange> out;
    PerturbationParams p = base;
    auto class_at = [&](double l2) {
        p.nu = std::exp2(l2);
        return nodal_topology(build_series(p, component, budget), resolution);
    };
    double l2 = log2_hi;
    auto prev = class_at(l2);
    while (l2 - log2_step >= log2_lo - 1e-12) {
        l2 -= log2_step;
        auto cur = class_at(l2);
        if (cur != prev) {
            TopologyChange tc;
            tc.nu1 = std::exp2(l2);
            tc.nu2 = std::exp2(l2 + log2_step);
            tc.before = prev.label();
            tc.after = cur.label();
            out.push_back(tc);
        }
        prev = cur;
    }
    return out;
}

VolumeSample splitting_volume(const SplittingSeries& s1, const SplittingSeries& s2,
                              double psi0, double theta0) {
    // derivative sums a_i = sum C m1 cos(..), b_i = -sum C m2 cos(..), scaled
    // per component by its dominant amplitude
    const SplittingSeries* ss[2] = {&s1, &s2};
    double a[2], b[2], ls[2];
    for (int c = 0; c < 2; ++c) {
        if (ss[c]->terms.empty()) throw std::runtime_error("empty series");
        double ref = ss[c]->terms.front().log_amp;
        double sa = 0.0, sb = 0.0;
        double val = 0.0;
        for (const auto& t : ss[c]->terms) {
            double amp = t.sign * std::exp(t.log_amp - ref);
            double ph = t.m1 * psi0 - (double)t.m2 * theta0;
            val += amp * std::sin(ph);
            sa += amp * t.m1 * std::cos(ph);
            sb += -amp * (double)t.m2 * std::cos(ph);
        }
        if (std::fabs(val) > 1e-6)
            throw std::runtime_error("(psi0, theta0) is not a homoclinic point");
        a[c] = sa;
        b[c] = sb;
        ls[c] = std::log(ss[c]->params.eps) + ref;
    }
    double det = a[0] * b[1] - b[0] * a[1];
    VolumeSample v;
    v.nu = s1.params.nu;
    v.a1 = a[0]; v.a2 = a[1]; v.b1 = b[0]; v.b2 = b[1];
    v.log_scale1 = ls[0];
    v.log_scale2 = ls[1];
    v.V.sign = det > 0 ? 1 : (det < 0 ? -1 : 0);
    v.V.log_mag = det == 0.0 ? -std::numeric_limits<double>::infinity()
                             : std::log(std::fabs(det)) + ls[0] + ls[1];
    return v;
}

}  // namespace hhsplit
