#pragma once

// Nodal lines of the splitting components on the (psi0, theta0) torus,
// dominant-mode topology changes in nu, and the Appendix-D splitting volume
// V = a1 b2 - b1 a2 at the homoclinic point (0,0).

#include <functional>
#include <vector>

#include "hhsplit/melnikov.hpp"

namespace hhsplit {

struct NodalLineSet {
    int component = 1;
    double nu = 0.0;
    // point chains on [0, 2pi)^2; chains are closed on the torus
    std::vector<std::vector<std::pair<double, double>>> polylines;
};

// marching squares on a resolution^2 grid of the scaled field, with periodic
// stitching across the torus edges
NodalLineSet nodal_lines(const std::function<double(double, double)>& field,
                         int component, double nu, int resolution);
NodalLineSet nodal_lines(const SplittingSeries& s, int resolution);

// topology of the nodal set as the multiset of absolute winding vectors
// (|w_psi|, |w_theta|) of its chains; the mode-(m1, m2) field has class
// {(m2, m1), (m2, m1)}
struct TopologyClass {
    std::vector<std::pair<int, int>> windings;  // sorted
    bool operator==(const TopologyClass& o) const { return windings == o.windings; }
    bool operator!=(const TopologyClass& o) const { return !(*this == o); }
    // (m1, m2) when the class is two equal winding vectors, else (0, 0)
    std::pair<int, long long> label() const;
};
TopologyClass nodal_topology(const SplittingSeries& s, int resolution = 128);

struct TopologyChange {
    double nu1 = 0.0, nu2 = 0.0;  // bracket, nu1 < nu2
    std::pair<int, long long> before, after;  // topology labels at nu2 / nu1
};

// nodal-topology changes of one component over [lo, hi] at the given
// resolution in log2(nu).  The winding class, not the amplitude argmax,
// decides: near a change several harmonics are comparable and the topology
// flip lags the Fourier-dominance switch.
std::vector<TopologyChange> topology_change_scan(const PerturbationParams& base,
                                                 int component, double log2_lo,
                                                 double log2_hi,
                                                 double log2_step = 1e-3,
                                                 const HarmonicBudget& budget = {},
                                                 int resolution = 128);

struct VolumeSample {
    double nu = 0.0;
    LogVal V;                       // log-magnitude + sign
    double a1, a2, b1, b2;          // scaled partial differences (common factor removed)
    double log_scale1, log_scale2;  // per-component log of the removed factor (incl. eps)
};

// series-based splitting volume at the homoclinic point; (psi0, theta0)
// defaults to (0,0), which is a zero of both sine series identically
VolumeSample splitting_volume(const SplittingSeries& s1, const SplittingSeries& s2,
                              double psi0 = 0.0, double theta0 = 0.0);

}  // namespace hhsplit
