#pragma once

#include "bsq/cycles.hpp"
#include "bsq/surface.hpp"

#include <complex>
#include <vector>

namespace bsq {

// Holonomy of the prequantum connection around a closed cycle, reported
// through the level-scaled action integral: value = exp(2 pi i action).
struct HolonomyResult {
    std::complex<double> value;
    double action;    // reduced mod 1 to [0,1)
    double bs_defect; // distance from action to the nearest integer
};

// Level-scaled action integral (signed symplectic area for contractible
// cycles) by exact per-segment integration of a chart primitive of the
// area form.
//
// Torus gauge: A = -k y dx on the fundamental domain, evaluated on the
// continuous lift; segment integrals are exact (the integrand is linear).
// Sphere: A = k/(2 pi) (u dv - v du)/(1+r^2) per chart; chart-1 hosted
// segments pick up the transition term -(k/2 pi) * (segment angle change),
// which continues the chart-0 primitive across the overlap.
double action_integral(const Surface& s, const DiscretizedCycle& c);

// Cumulative action from node 0 to node j (alpha_0 = 0, size N+1 with the
// closing total in the last slot). Used by the flat-section transport.
std::vector<double> partial_actions(const Surface& s, const DiscretizedCycle& c);

HolonomyResult holonomy(const Surface& s, const DiscretizedCycle& c);

// true iff the distance from the level-scaled action to the nearest
// integer is at most tol; tol must lie in (0, 1/2).
std::pair<bool, double> is_bohr_sommerfeld(const Surface& s, const DiscretizedCycle& c,
                                           double tol);

// Signed enclosed symplectic area (the same line integral, with the
// self-intersection guard demanded of the public operation).
double enclosed_area(const Surface& s, const DiscretizedCycle& c);

// Alternate-gauge action (torus: A' = +k x dy; sphere: chart-1 primitive).
// Used by the gauge/chart independence tests.
double action_integral_alternate(const Surface& s, const DiscretizedCycle& c);

// Latitude circle whose discrete action equals `target` (bisection on the
// chart radius to 1e-12); target must lie in (0, k).
DiscretizedCycle bs_latitude(const Surface& s, double target_action, std::size_t n);

} // namespace bsq
