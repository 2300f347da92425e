#pragma once

#include "bsq/cycles.hpp"
#include "bsq/fields.hpp"
#include "bsq/surface.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <string>
#include <vector>

namespace bsq {

using SectionVector = Eigen::VectorXcd;
using OperatorMatrix = Eigen::MatrixXcd;

// Orthonormal basis of the degree-k holomorphic sections on the sphere at
// level k, realized through a spherical quadrature grid (Gauss-Legendre in
// the height, uniform angles). Basis ordering is rotation adapted: e_j has
// z-rotation weight j, in increasing order. All section values are kept in
// the unitary gauge (value times sqrt of the fiber metric), which stays
// bounded over the whole grid.
class ToeplitzData {
  public:
    ToeplitzData(const Surface& s, int quadrature_order);

    const Surface& surface() const { return surface_; }
    int level() const { return surface_.level(); }
    int dimension() const { return level() + 1; }
    int quadrature_order() const { return order_; }

    struct Node {
        SurfacePoint point; // host chart with |coords| <= 1
        double z = 0.0;     // height
        double theta = 0.0; // chart-0 angle
        double weight = 0.0;
    };
    const std::vector<Node>& nodes() const { return nodes_; }

    // Unitary-gauge value of basis section j at a node point.
    std::complex<double> phi(int j, const SurfacePoint& p) const;

    // Gram matrix of the orthonormalized basis at a given order (identity
    // up to quadrature error).
    OperatorMatrix gram(int order) const;

    OperatorMatrix& cache_slot(const std::string& key) const { return cache_[key]; }
    bool cached(const std::string& key) const { return cache_.count(key) > 0; }

    // Finite flow step used by the dynamical operator construction.
    double flow_step = 7e-4;

  private:
    Surface surface_;
    int order_;
    std::vector<Node> nodes_;
    std::vector<double> norm_; // per-basis normalization
    mutable std::map<std::string, OperatorMatrix> cache_;

    friend ToeplitzData holomorphic_basis(const Surface& s, int quadrature_order);
};

// Builds the basis and verifies the Gram residual at doubled quadrature
// order; throws with a suggested order when under-resolved.
ToeplitzData holomorphic_basis(const Surface& s, int quadrature_order = 0);

// T_f: compression of multiplication by f, entries by quadrature.
const OperatorMatrix& toeplitz_matrix(const ToeplitzData& data, const ScalarField& f);

// Q_f = nabla_{X_f} + 2 pi i f, computed by Richardson differentiation of
// the prequantum transport along the Hamiltonian flow of f. f must be
// quantizable (ambient degree <= 1); otherwise a diagnostic is thrown.
OperatorMatrix sk_operator_matrix(const ToeplitzData& data, const ScalarField& f);

// Coherent-state transform: integral of f against the pointwise section
// density |s(x)|^2. The section is normalized internally; a zero section
// is rejected.
double expectation_function(const ToeplitzData& data, const ScalarField& f,
                            const SectionVector& section);

// Projected-gradient residual of the expectation at the section:
// || T_f s - <s, T_f s> s || for the normalized section.
double expectation_gradient_residual(const ToeplitzData& data, const ScalarField& f,
                                     const SectionVector& section);

// Projection of a half-weighted Bohr-Sommerfeld cycle onto the holomorphic
// basis through its flat unit section (phase fixed real-positive at node 0).
SectionVector bpu_map(const ToeplitzData& data, const HalfWeightedCycle& hw);

// Angular (projective) distance from v to the nearest eigenray of T.
double nearest_eigenray_angle(const OperatorMatrix& t, const SectionVector& v);
// Projective angle between two rays.
double ray_angle(const SectionVector& a, const SectionVector& b);

struct Prop4Row {
    int index = 0;
    double distance_plus = 0.0;
    double distance_minus = 0.0;
    double pair_ray_angle = 0.0;
};

// Distances of the BPU images of critical points (both signs) to the
// nearest eigenray of T_f.
std::vector<Prop4Row> prop4_distance(const ToeplitzData& data, const ScalarField& f,
                                     const std::vector<std::pair<HalfWeightedCycle,
                                                                 HalfWeightedCycle>>& points);

SectionVector random_unit_section(Rng& rng, int dimension);

// Row-major JSON with complex entries as [re, im] pairs and the basis
// convention header.
std::string operator_to_json(const OperatorMatrix& m);
OperatorMatrix operator_from_json(const std::string& text);
std::string section_to_json(const SectionVector& v);
SectionVector section_from_json(const std::string& text);

} // namespace bsq
