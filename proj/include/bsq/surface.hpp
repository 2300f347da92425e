#pragma once

#include <array>
#include <string>

namespace bsq {

enum class SurfaceModel { FlatTorus, RoundSphere };

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

// Chart point. Torus: single chart 0, coordinates in [0,1)^2.
// Sphere: two stereographic charts; chart 0 projects from the north pole
// (its origin is the south pole), chart 1 from the south pole. Transition
// is w = 1/z, orientation preserving.
struct SurfacePoint {
    int chart = 0;
    double u = 0.0;
    double v = 0.0;
};

// A model surface of integer level k. The symplectic form is an area form
// of total mass k: on the torus k du dv on the unit square, on the sphere
// the round density k / (pi (1+r^2)^2) per stereographic chart.
class Surface {
  public:
    Surface(SurfaceModel model, int level);

    SurfaceModel model() const { return model_; }
    int level() const { return level_; }
    bool is_torus() const { return model_ == SurfaceModel::FlatTorus; }
    bool is_sphere() const { return model_ == SurfaceModel::RoundSphere; }

    // Area density of the symplectic form at a chart point.
    double density(const SurfacePoint& p) const;

    // Total symplectic area by quadrature over the chart partition.
    double area_quadrature() const;

    // Sphere chart transition; throws for torus points.
    SurfacePoint to_chart(const SurfacePoint& p, int chart) const;
    // Re-host a sphere point when its coordinates leave the comfort zone.
    SurfacePoint normalize_chart(const SurfacePoint& p) const;
    // Torus: wrap coordinates into [0,1)^2. Identity on the sphere.
    SurfacePoint wrap(const SurfacePoint& p) const;

    // Ambient position of a sphere point on the unit round sphere.
    Vec3 ambient(const SurfacePoint& p) const;
    // Jacobian d(ambient)/d(chart coords), 3x2, column-major pairs.
    std::array<Vec3, 2> ambient_jacobian(const SurfacePoint& p) const;

    // Geodesic-free coarse distance used by tests: ambient distance on the
    // sphere, flat nearest-image distance on the torus.
    double distance(const SurfacePoint& a, const SurfacePoint& b) const;

    std::string name() const { return is_torus() ? "torus" : "sphere"; }

  private:
    SurfaceModel model_;
    int level_;
};

Surface make_surface(SurfaceModel model, int level);

// Nearest-image displacement from a to b on the torus (components in
// [-1/2, 1/2)); plain difference on the sphere chart.
Vec2 chart_displacement(const Surface& s, const SurfacePoint& a, const SurfacePoint& b);

} // namespace bsq
