#pragma once

#include "bsq/spectral.hpp"
#include "bsq/surface.hpp"

#include <array>
#include <map>
#include <string>
#include <variant>

namespace bsq {

// Real trigonometric polynomial on the torus:
//   c + sum over modes (m,n) of a*cos(2 pi (m x + n y)) + b*sin(...).
// Modes are kept in a canonical half-lattice (m>0, or m==0 and n>0), so the
// representation is unique and the algebra (sum, product, derivative) is
// exact. Brackets of trig polynomials stay trig polynomials.
struct TorusTrigPoly {
    double constant = 0.0;
    // (m,n) -> (cos coefficient, sin coefficient)
    std::map<std::pair<int, int>, std::pair<double, double>> modes;

    void add_mode(int m, int n, double ccos, double csin);
    double eval(double x, double y) const;
    Vec2 grad(double x, double y) const;
    TorusTrigPoly partial(int axis) const;
    int max_degree() const;
};

TorusTrigPoly trig_sum(const TorusTrigPoly& a, const TorusTrigPoly& b, double sb = 1.0);
TorusTrigPoly trig_product(const TorusTrigPoly& a, const TorusTrigPoly& b);

// Affine function of the fundamental-domain coordinates. Discontinuous at
// the seam as a function on the torus; used as fibration data and for
// translation flows, where only its (constant) gradient matters.
struct TorusLinear {
    double cx = 0.0;
    double cy = 0.0;
    double c0 = 0.0;
};

// Polynomial in the ambient coordinates of the round sphere.
struct SpherePoly {
    // exponent triple (p,q,r) for x^p y^q z^r -> coefficient
    std::map<std::array<int, 3>, double> mono;

    void add(std::array<int, 3> e, double c);
    double eval(const Vec3& p) const;
    Vec3 grad_ambient(const Vec3& p) const;
    SpherePoly partial(int axis) const;
    int max_degree() const;
};

SpherePoly poly_sum(const SpherePoly& a, const SpherePoly& b, double sb = 1.0);
SpherePoly poly_product(const SpherePoly& a, const SpherePoly& b);

// A scalar field bound to one of the two surface models.
class ScalarField {
  public:
    ScalarField() : impl_(TorusTrigPoly{}) {}
    explicit ScalarField(TorusTrigPoly p) : impl_(std::move(p)) {}
    explicit ScalarField(TorusLinear l) : impl_(l) {}
    explicit ScalarField(SpherePoly p) : impl_(std::move(p)) {}

    bool torus_family() const { return !std::holds_alternative<SpherePoly>(impl_); }

    double eval(const Surface& s, const SurfacePoint& p) const;
    // Evaluate with explicit (possibly lifted / unwrapped) chart coordinates.
    double eval_coords(const Surface& s, int chart, double u, double v) const;
    // Analytic gradient in the chart hosting p.
    Vec2 chart_gradient(const Surface& s, const SurfacePoint& p) const;

    ScalarField operator+(const ScalarField& o) const;
    ScalarField operator-(const ScalarField& o) const;
    ScalarField scaled(double c) const;

    int max_degree() const;
    bool is_constant() const;

    // Stable identifier for operator caches and reports.
    std::string id() const;

    const std::variant<TorusTrigPoly, TorusLinear, SpherePoly>& impl() const { return impl_; }

  private:
    std::variant<TorusTrigPoly, TorusLinear, SpherePoly> impl_;
};

// Poisson bracket {f,g} = omega(X_f, X_g), computed symbolically; exact for
// the built-in families and closed within them.
ScalarField poisson_bracket(const Surface& s, const ScalarField& f, const ScalarField& g);

// Chart components of the Hamiltonian vector field at p.
Vec2 hamiltonian_vector(const Surface& s, const ScalarField& f, const SurfacePoint& p);

// Factories.
ScalarField constant_field(const Surface& s, double value);
ScalarField torus_harmonic(int m, int n, double ccos, double csin);
ScalarField torus_linear(double cx, double cy, double c0 = 0.0);
ScalarField sphere_linear(double c0, double cx, double cy, double cz);
ScalarField sphere_coordinate(int axis); // 0:x 1:y 2:z
// ((1 - z)/2)^k: squared pointwise norm of the unit-scale holomorphic
// section whose divisor is k times the north pole.
ScalarField sphere_north_divisor_density(int k);

// Seeded random fields for property tests and scenario checks.
ScalarField random_torus_trig(Rng& rng, int max_degree, double amplitude);
ScalarField random_sphere_poly(Rng& rng, int max_degree, double amplitude);

} // namespace bsq
