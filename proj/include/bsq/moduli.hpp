#pragma once

#include "bsq/cycles.hpp"
#include "bsq/fields.hpp"
#include "bsq/prequantum.hpp"

#include <string>
#include <utility>
#include <vector>

namespace bsq {

// Configuration for the moduli-space calculus. tau defaults to 1/(2k),
// matching the normalization under which the bracket identity carries the
// factor 2 tau and the projection to holomorphic sections is scale-correct.
struct ModuliConfig {
    double tau = 0.5;
    double identity_tol = 1e-8;
    double criticality_tol = 1e-6;
    WeightTolerances weight_tol{};

    // Damped-descent controls for the critical-point search.
    int descent_mode_cutoff = 4;
    int descent_max_iter = 10000;
    double descent_tol = 1e-6;
    double descent_initial_step = 0.05;
};

ModuliConfig default_moduli_config(const Surface& s);

// F_f(S, theta) = tau * sum f(p_j) mu_j / N.
double special_value(const ScalarField& f, const HalfWeightedCycle& hw, const ModuliConfig& cfg);

// Omega((a,b),(c,d)) = sum (a_j d_j - b_j c_j) mu_j / N.
double omega_form(const HalfWeightedCycle& hw, const TangentPair& pa, const TangentPair& pb);

// dF_f evaluated on a tangent pair (alpha, beta):
//   2 tau sum f beta mu / N + tau sum (d alpha/ds) a mu / N,
// a_j the tangential component of X_f in the (t,n) frame.
double differential_pairing(const ScalarField& f, const HalfWeightedCycle& hw,
                            const TangentPair& pair, const ModuliConfig& cfg);

// Components of the moduli vector induced by the Hamiltonian flow of f:
//   psi1 = f|_S - c,  psi2 = (d/ds (a mu)) / (2 mu).
TangentPair theta_bs_components(const ScalarField& f, const HalfWeightedCycle& hw);

// The Omega-Hamiltonian pair of F_f, by the explicit conversion
//   psi1' = 2 tau (f|_S - c),  psi2' = tau (d/ds (a mu)) / mu,
// so that omega_form(X, Q) = differential_pairing(Q) for every test pair Q.
TangentPair moduli_ham_field(const ScalarField& f, const HalfWeightedCycle& hw,
                             const ModuliConfig& cfg);

// {F_f, F_g}_Omega at hw.
double moduli_bracket(const ScalarField& f, const ScalarField& g, const HalfWeightedCycle& hw,
                      const ModuliConfig& cfg);

// (stddev of f|_S under mu, sup |(a mu)'/(2 mu)|): both vanish exactly at
// critical points of F_f.
std::pair<double, double> criticality_residual(const ScalarField& f,
                                               const HalfWeightedCycle& hw);
// Same residuals for a cycle with explicit (normalized) weights; used by
// scans whose members are not Bohr-Sommerfeld.
std::pair<double, double> criticality_residual_raw(const ScalarField& f,
                                                   const DiscretizedCycle& cycle,
                                                   const std::vector<double>& mu);

// true iff both Lie derivatives of the pair along W_f vanish to tolerance.
// Requires hw itself to be critical for F_f.
bool critical_tangent_test(const ScalarField& f, const HalfWeightedCycle& hw,
                           const TangentPair& pair, const ModuliConfig& cfg);

struct DescentResult {
    HalfWeightedCycle point;
    bool converged = false;
    int iterations = 0;
    std::pair<double, double> residual{0.0, 0.0};
    std::vector<double> trace; // residual norm per accepted iteration
    std::string message;
};

// Damped descent on the squared criticality residual through repeated
// deform_step, searching the truncated Fourier deformation space
// (modes 1..descent_mode_cutoff). Non-convergence is reported, not thrown.
DescentResult find_critical_point(const ScalarField& f, const HalfWeightedCycle& seed,
                                  const ModuliConfig& cfg);

// One row of the boundary contraction scan: a latitude with the given
// enclosed action carrying the fixed generic weight profile.
struct ScanRow {
    double parameter = 0.0;        // enclosed action of the latitude
    double value = 0.0;            // F_{f_Y}
    double residual_constancy = 0.0;
    double residual_weight = 0.0;
    bool level_set_coincidence = false;
};

struct ContractionScan {
    std::vector<ScanRow> rows;
    bool strictly_monotone = false;
    double min_interior_residual = 0.0; // min over rows of max(r1, r2)
};

// Latitude-family scan of F_{f_Y} for f_Y = ((1-z)/2)^k, zero divisor k
// times the north pole. Latitudes sweep enclosed actions [area_lo,
// area_hi]; each row carries the weight profile 1 + 0.3 cos(2 pi s).
ContractionScan boundary_contraction_scan(const Surface& s, double area_lo, double area_hi,
                                          int count, std::size_t n, const ModuliConfig& cfg);

} // namespace bsq
