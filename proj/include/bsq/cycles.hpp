#pragma once

#include "bsq/fields.hpp"
#include "bsq/spectral.hpp"
#include "bsq/surface.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bsq {

// Closed oriented polyline with N uniform parameter samples s_j = j/N.
// Coordinates are stored as a continuous lift: on the torus the lift
// unwraps seam crossings (winding recorded separately), on the sphere all
// nodes live in a single host chart. N must be even and >= 16.
class DiscretizedCycle {
  public:
    DiscretizedCycle(Surface surface, int chart, std::vector<double> lift_u,
                     std::vector<double> lift_v, bool waive_self_intersection = false);

    const Surface& surface() const { return surface_; }
    int chart() const { return chart_; }
    std::size_t size() const { return lift_u_.size(); }
    const std::vector<double>& lift_u() const { return lift_u_; }
    const std::vector<double>& lift_v() const { return lift_v_; }
    int winding_u() const { return wind_u_; }
    int winding_v() const { return wind_v_; }
    bool waived() const { return waived_; }

    SurfacePoint point(std::size_t j) const;
    std::vector<SurfacePoint> points() const;

    // Lazy O(N^2) segment sweep; cached. Adjacent segments excluded.
    bool self_intersects() const;

    // Trigonometric interpolation of the node polyline to m samples.
    DiscretizedCycle resampled(std::size_t m) const;

  private:
    Surface surface_;
    int chart_;
    std::vector<double> lift_u_, lift_v_;
    int wind_u_ = 0, wind_v_ = 0;
    bool waived_ = false;
    mutable std::optional<bool> self_intersects_;
};

// Built-in curve families.
DiscretizedCycle sample_torus_line(const Surface& s, double y0, std::size_t n);
DiscretizedCycle sample_torus_vertical(const Surface& s, double x0, std::size_t n);
// Graph y(s) = y0 + sum_m a_m cos(2 pi m s) + b_m sin(2 pi m s), x = s.
DiscretizedCycle sample_torus_graph(const Surface& s, double y0,
                                    const std::vector<std::pair<double, double>>& modes,
                                    std::size_t n);
// Latitude circle of chart radius r, counterclockwise in the host chart.
DiscretizedCycle sample_sphere_latitude(const Surface& s, double chart_radius, std::size_t n,
                                        int chart = 0);
// Generic closed parametric loop in a fixed chart.
DiscretizedCycle sample_parametric(const Surface& s, int chart,
                                   const std::vector<Vec2>& chart_points,
                                   bool waive_self_intersection = false);

// Per-node geometry of a cycle: parameter tangents t_j (spectral), the
// omega-normalized transversal n_j with omega(n_j, t_j) = 1, and field
// restrictions. The transversal is the chart-Euclidean normal scaled by
// the area density; this fixes the complement used for the tangential /
// transversal splitting of Hamiltonian fields along the cycle.
struct CycleFrame {
    explicit CycleFrame(const DiscretizedCycle& c);

    const DiscretizedCycle* cycle;
    std::vector<double> tu, tv; // dP/ds
    std::vector<double> nu, nv; // omega(n, t) = 1
    std::vector<double> rho;    // area density at nodes

    // f restricted to the cycle, evaluated with lifted coordinates.
    std::vector<double> restrict_field(const ScalarField& f) const;
    // Tangential component a_j = df(n_j) of the Hamiltonian field of f.
    std::vector<double> tangential_component(const ScalarField& f) const;
    // Both chart components of X_f at the nodes.
    void hamiltonian_components(const ScalarField& f, std::vector<double>& a,
                                std::vector<double>& b) const;
};

// Cycle plus positive node densities mu_j (sum mu_j / N = 1) and a global
// sign; the half weight is sigma * sqrt(mu) in the uniform parameter.
struct HalfWeightedCycle {
    DiscretizedCycle cycle;
    std::vector<double> mu;
    int sigma = +1;
    std::uint64_t uid = 0;

    std::size_t size() const { return mu.size(); }
};

struct WeightTolerances {
    double bs_tol = 1e-6;
    double mu_min = 1e-12;
    double norm_tol = 1e-10;
};

HalfWeightedCycle make_half_weighted(const DiscretizedCycle& cycle,
                                     const std::vector<double>& raw_weights, int sign,
                                     const WeightTolerances& tol = {});

// Two zero-mean node functions attached to a half-weighted cycle.
struct TangentPair {
    std::uint64_t base_uid = 0;
    std::vector<double> psi1, psi2;
};

TangentPair make_tangent_pair(const HalfWeightedCycle& hw, std::vector<double> psi1,
                              std::vector<double> psi2, bool project_zero_mean = true);

// Random trigonometric pair with modes 1..mode_cutoff, projected to zero
// mu-mean; identical seeds give identical pairs.
TangentPair random_tangent_pair(const HalfWeightedCycle& hw, std::uint64_t seed, int mode_cutoff);

// Moduli deformation step. Nodes move by eps * (d psi1/ds)_j * n_j, node
// densities pick up the factor (1 + 2 eps psi2_j), the density is exactly
// renormalized, and a single uniform transversal shift restores the
// Bohr-Sommerfeld defect to tolerance. eps = 0 returns the input unchanged.
HalfWeightedCycle deform_step(const HalfWeightedCycle& hw, const TangentPair& pair, double eps,
                              const WeightTolerances& tol = {});
// Same step without the Bohr-Sommerfeld correction (probe/test use).
HalfWeightedCycle deform_step_raw(const HalfWeightedCycle& hw, const TangentPair& pair,
                                  double eps, const WeightTolerances& tol = {});

HalfWeightedCycle resample_half_weighted(const HalfWeightedCycle& hw, std::size_t m,
                                         const WeightTolerances& tol = {});

// JSON snapshot: {surface, level, N, chart, points, mu, sigma, homology};
// doubles round-trip bit-stably.
std::string half_weighted_to_json(const HalfWeightedCycle& hw);
HalfWeightedCycle half_weighted_from_json(const std::string& text,
                                          const WeightTolerances& tol = {});

} // namespace bsq
