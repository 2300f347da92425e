#include "bsq/surface.hpp"

#include "bsq/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bsq {

namespace {
constexpr double kPi = std::numbers::pi;

double frac(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f -= 1.0; // guard against rounding at the seam
    return f;
}
} // namespace

Surface::Surface(SurfaceModel model, int level) : model_(model), level_(level) {
    if (level < 1) throw std::invalid_argument("surface level must be >= 1");
}

Surface make_surface(SurfaceModel model, int level) { return Surface(model, level); }

double Surface::density(const SurfacePoint& p) const {
    if (is_torus()) return double(level_);
    const double r2 = p.u * p.u + p.v * p.v;
    return double(level_) / (kPi * (1.0 + r2) * (1.0 + r2));
}

double Surface::area_quadrature() const {
    if (is_torus()) {
        // k du dv over the unit square, 16x16 midpoint grid is exact.
        double sum = 0.0;
        const int n = 16;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                SurfacePoint p{0, (i + 0.5) / n, (j + 0.5) / n};
                sum += density(p) / double(n * n);
            }
        return sum;
    }
    // Sphere: each chart contributes its unit disc; integrate in polar
    // coordinates with Gauss-Legendre in r and uniform angles.
    const auto gl = gauss_legendre(24);
    const int nth = 16;
    double total = 0.0;
    for (int chart = 0; chart < 2; ++chart) {
        double sum = 0.0;
        for (std::size_t a = 0; a < gl.node.size(); ++a) {
            const double r = 0.5 * (gl.node[a] + 1.0);
            const double wr = 0.5 * gl.weight[a];
            for (int b = 0; b < nth; ++b) {
                const double th = 2.0 * kPi * (b + 0.5) / nth;
                SurfacePoint p{chart, r * std::cos(th), r * std::sin(th)};
                sum += density(p) * r * wr * (2.0 * kPi / nth);
            }
        }
        total += sum;
    }
    return total;
}

SurfacePoint Surface::to_chart(const SurfacePoint& p, int chart) const {
    if (is_torus()) {
        if (chart != 0) throw std::invalid_argument("torus has a single chart");
        return p;
    }
    if (p.chart == chart) return p;
    const double r2 = p.u * p.u + p.v * p.v;
    if (r2 == 0.0) throw std::domain_error("chart transition at the pole");
    return SurfacePoint{chart, p.u / r2, -p.v / r2};
}

SurfacePoint Surface::normalize_chart(const SurfacePoint& p) const {
    if (is_torus()) return wrap(p);
    const double r2 = p.u * p.u + p.v * p.v;
    if (r2 > 25.0) return to_chart(p, 1 - p.chart);
    return p;
}

SurfacePoint Surface::wrap(const SurfacePoint& p) const {
    if (!is_torus()) return p;
    return SurfacePoint{0, frac(p.u), frac(p.v)};
}

Vec3 Surface::ambient(const SurfacePoint& p) const {
    if (is_torus()) throw std::invalid_argument("ambient coordinates are sphere-only");
    const double r2 = p.u * p.u + p.v * p.v;
    const double d = 1.0 + r2;
    if (p.chart == 0) return Vec3{2.0 * p.u / d, 2.0 * p.v / d, (r2 - 1.0) / d};
    return Vec3{2.0 * p.u / d, -2.0 * p.v / d, (1.0 - r2) / d};
}

std::array<Vec3, 2> Surface::ambient_jacobian(const SurfacePoint& p) const {
    if (is_torus()) throw std::invalid_argument("ambient coordinates are sphere-only");
    const double u = p.u, v = p.v;
    const double r2 = u * u + v * v;
    const double d = 1.0 + r2;
    const double d2 = d * d;
    // chart 0: x = 2u/d, y = 2v/d, z = (r2-1)/d
    Vec3 du{2.0 * (d - 2.0 * u * u) / d2, -4.0 * u * v / d2, 4.0 * u / d2};
    Vec3 dv{-4.0 * u * v / d2, 2.0 * (d - 2.0 * v * v) / d2, 4.0 * v / d2};
    if (p.chart == 1) {
        // y and z flip sign relative to chart 0 with (u,v) -> (u,v)
        du = Vec3{du[0], -du[1], -du[2]};
        dv = Vec3{dv[0], -dv[1], -dv[2]};
    }
    return {du, dv};
}

double Surface::distance(const SurfacePoint& a, const SurfacePoint& b) const {
    if (is_torus()) {
        auto d = chart_displacement(*this, a, b);
        return std::hypot(d[0], d[1]);
    }
    const Vec3 pa = ambient(a), pb = ambient(b);
    return std::sqrt((pa[0] - pb[0]) * (pa[0] - pb[0]) + (pa[1] - pb[1]) * (pa[1] - pb[1]) +
                     (pa[2] - pb[2]) * (pa[2] - pb[2]));
}

Vec2 chart_displacement(const Surface& s, const SurfacePoint& a, const SurfacePoint& b) {
    if (s.is_torus()) {
        double dx = b.u - a.u;
        double dy = b.v - a.v;
        dx -= std::round(dx);
        dy -= std::round(dy);
        return Vec2{dx, dy};
    }
    const SurfacePoint bb = s.to_chart(b, a.chart);
    return Vec2{bb.u - a.u, bb.v - a.v};
}

} // namespace bsq
