#pragma once

#include "bsq/cycles.hpp"
#include "bsq/moduli.hpp"

#include <string>
#include <vector>

namespace bsq {

// Built-in integrable structures with connected regular level sets.
enum class Fibration { TorusY, SphereZ };

ScalarField fibration_field(const Surface& s, Fibration fib);

// One Bohr-Sommerfeld fiber: the cycle, its level-scaled action (integral
// to enumeration tolerance) and the two invariant half weights.
struct FiberRecord {
    double action = 0.0;       // level_action / k
    double level_action = 0.0; // integer-valued enclosed action
    double coordinate = 0.0;   // y0 on the torus, z height on the sphere
    int l_index = 0;
    DiscretizedCycle cycle;
    HalfWeightedCycle theta_plus;
    HalfWeightedCycle theta_minus;
};

// All regular fibers with integral level-scaled action, by monotone action
// scan plus bisection to `action_tol`. Degenerate fibers (sphere poles) are
// excluded. Throws if the scan resolution cannot isolate the roots.
std::vector<FiberRecord> enumerate_bs_fibers(const Surface& s, Fibration fib,
                                             int scan_resolution, std::size_t n,
                                             double action_tol = 1e-10);

// The two invariant half weights (+theta, -theta) on a regular fiber:
// node density proportional to 1 / |tangential speed of W_f|.
std::pair<HalfWeightedCycle, HalfWeightedCycle> invariant_half_weight(
    const Surface& s, Fibration fib, const DiscretizedCycle& fiber);

// Dimension of the kernel of psi -> a * (d psi / ds) on the de-aliased
// trigonometric subspace (modes 0 .. N/2-1). One-dimensional exactly when
// the only invariant functions are the constants.
int invariance_kernel_dimension(const Surface& s, Fibration fib, const DiscretizedCycle& fiber,
                                double rel_tol = 1e-8);

struct RealHilbert {
    std::vector<FiberRecord> fibers;
    int dimension = 0; // l: one basis ray per fiber
};

// Enumerates fibers, attaches both invariant weights, verifies each of the
// 2l points against the criticality residuals, and reports dim H = l.
RealHilbert build_real_hilbert(const Surface& s, Fibration fib, std::size_t n,
                               int scan_resolution = 0, double residual_tol = 1e-8);

// CSV table: action, level_action, coordinate, l_index.
std::string fiber_table_csv(const std::vector<FiberRecord>& fibers);

} // namespace bsq
