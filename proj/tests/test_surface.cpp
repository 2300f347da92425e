#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bsq/cycles.hpp"
#include "bsq/fields.hpp"
#include "bsq/flow.hpp"
#include "bsq/prequantum.hpp"
#include "bsq/surface.hpp"

#include <cmath>
#include <numbers>

using namespace bsq;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// central-difference chart gradient, h = 1e-5 (oracle only)
Vec2 fd_gradient(const Surface& s, const ScalarField& f, const SurfacePoint& p) {
    const double h = 1e-5;
    auto ev = [&](double du, double dv) {
        return f.eval(s, SurfacePoint{p.chart, p.u + du, p.v + dv});
    };
    return Vec2{(ev(h, 0) - ev(-h, 0)) / (2 * h), (ev(0, h) - ev(0, -h)) / (2 * h)};
}

double fd_bracket(const Surface& s, const ScalarField& f, const ScalarField& g,
                  const SurfacePoint& p) {
    // brute-force omega(X_f, X_g) with finite-difference gradients
    const Vec2 gf = fd_gradient(s, f, p), gg = fd_gradient(s, g, p);
    const double rho = s.density(p);
    const Vec2 xf{-gf[1] / rho, gf[0] / rho}, xg{-gg[1] / rho, gg[0] / rho};
    return rho * (xf[0] * xg[1] - xf[1] * xg[0]);
}
} // namespace

TEST_CASE("surface areas match the level") {
    CHECK(make_surface(SurfaceModel::FlatTorus, 1).area_quadrature() ==
          doctest::Approx(1.0).epsilon(1e-8));
    // chart quadrature against the closed-form sphere area (= level)
    CHECK(make_surface(SurfaceModel::RoundSphere, 4).area_quadrature() ==
          doctest::Approx(4.0).epsilon(1e-8));
    CHECK(make_surface(SurfaceModel::RoundSphere, 1).area_quadrature() ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(make_surface(SurfaceModel::FlatTorus, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_surface(SurfaceModel::RoundSphere, -2), std::invalid_argument);
}

TEST_CASE("sphere chart transition is involutive and consistent") {
    const Surface s = make_surface(SurfaceModel::RoundSphere, 2);
    const SurfacePoint p{0, 0.7, -0.4};
    const SurfacePoint q = s.to_chart(p, 1);
    const SurfacePoint back = s.to_chart(q, 0);
    CHECK(back.u == doctest::Approx(p.u).epsilon(1e-14));
    CHECK(back.v == doctest::Approx(p.v).epsilon(1e-14));
    const Vec3 a = s.ambient(p), b = s.ambient(q);
    for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
    CHECK(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] == doctest::Approx(1.0));
}

TEST_CASE("field evaluation agrees across the chart overlap") {
    const Surface s = make_surface(SurfaceModel::RoundSphere, 3);
    Rng rng(5);
    const ScalarField f = random_sphere_poly(rng, 2, 1.0);
    for (int i = 0; i < 20; ++i) {
        const SurfacePoint p{0, rng.uniform(0.3, 2.0), rng.uniform(-2.0, 2.0)};
        const SurfacePoint q = s.to_chart(p, 1);
        CHECK(std::abs(f.eval(s, p) - f.eval(s, q)) < 1e-10);
    }
}

TEST_CASE("analytic gradients match central differences") {
    Rng rng(17);
    const Surface torus = make_surface(SurfaceModel::FlatTorus, 2);
    const ScalarField ft = random_torus_trig(rng, 3, 0.8);
    for (int i = 0; i < 10; ++i) {
        const SurfacePoint p{0, rng.uniform(), rng.uniform()};
        const Vec2 g = ft.chart_gradient(torus, p), o = fd_gradient(torus, ft, p);
        CHECK(std::abs(g[0] - o[0]) < 1e-6); // oracle truncation O(h^2 f''')
        CHECK(std::abs(g[1] - o[1]) < 1e-6);
    }
    const Surface sph = make_surface(SurfaceModel::RoundSphere, 3);
    const ScalarField fs = random_sphere_poly(rng, 2, 0.8);
    for (int i = 0; i < 10; ++i) {
        const SurfacePoint p{i % 2, rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        const Vec2 g = fs.chart_gradient(sph, p), o = fd_gradient(sph, fs, p);
        CHECK(std::abs(g[0] - o[0]) < 1e-6);
        CHECK(std::abs(g[1] - o[1]) < 1e-6);
    }
}

TEST_CASE("hamiltonian field examples") {
    const Surface torus = make_surface(SurfaceModel::FlatTorus, 1);
    // f = sin(2 pi x) at x = 1/4: the gradient vanishes, so does the field
    const ScalarField f = torus_harmonic(1, 0, 0.0, 1.0);
    const Vec2 v = hamiltonian_vector(torus, f, SurfacePoint{0, 0.25, 0.3});
    CHECK(std::abs(v[0]) < 1e-12);
    CHECK(std::abs(v[1]) < 1e-12);
    // f = y generates a translation: direction constant in x
    const ScalarField fy = torus_linear(0.0, 1.0);
    const Vec2 a = hamiltonian_vector(torus, fy, SurfacePoint{0, 0.1, 0.8});
    const Vec2 b = hamiltonian_vector(torus, fy, SurfacePoint{0, 0.9, 0.2});
    CHECK(std::abs(a[0] - b[0]) < 1e-12);
    CHECK(std::abs(a[1] - b[1]) < 1e-12);
    CHECK(std::abs(a[1]) < 1e-12);
    // sphere: X_z is tangent to latitudes (zero radial chart component)
    const Surface sph = make_surface(SurfaceModel::RoundSphere, 2);
    const ScalarField fz = sphere_coordinate(2);
    const SurfacePoint p{0, 0.8, 0.45};
    const Vec2 xz = hamiltonian_vector(sph, fz, p);
    const double radial = (xz[0] * p.u + xz[1] * p.v) / std::hypot(p.u, p.v);
    CHECK(std::abs(radial) < 1e-8);
}

TEST_CASE("poisson bracket: antisymmetry, Leibniz, constants") {
    Rng rng(23);
    const Surface s = make_surface(SurfaceModel::FlatTorus, 2);
    const ScalarField f = random_torus_trig(rng, 2, 0.7);
    const ScalarField g = random_torus_trig(rng, 2, 0.7);
    const ScalarField h = random_torus_trig(rng, 2, 0.7);
    const ScalarField ff = poisson_bracket(s, f, f);
    const ScalarField fc = poisson_bracket(s, f, constant_field(s, 3.7));
    const ScalarField fg = poisson_bracket(s, f, g);
    const ScalarField gf = poisson_bracket(s, g, f);
    // Leibniz: {f, g h} = {f,g} h + g {f,h}
    const ScalarField lhs = poisson_bracket(
        s, f, ScalarField(trig_product(std::get<TorusTrigPoly>(g.impl()),
                                       std::get<TorusTrigPoly>(h.impl()))));
    for (int i = 0; i < 30; ++i) {
        const SurfacePoint p{0, rng.uniform(), rng.uniform()};
        CHECK(std::abs(ff.eval(s, p)) < 1e-12);
        CHECK(std::abs(fc.eval(s, p)) < 1e-12);
        CHECK(std::abs(fg.eval(s, p) + gf.eval(s, p)) < 1e-8);
        const double rhs = fg.eval(s, p) * h.eval(s, p) +
                           g.eval(s, p) * poisson_bracket(s, f, h).eval(s, p);
        CHECK(std::abs(lhs.eval(s, p) - rhs) < 1e-8);
    }
}

TEST_CASE("jacobi identity for trig fields on the torus") {
    Rng rng(29);
    const Surface s = make_surface(SurfaceModel::FlatTorus, 1);
    const ScalarField f = random_torus_trig(rng, 2, 0.6);
    const ScalarField g = random_torus_trig(rng, 2, 0.6);
    const ScalarField h = random_torus_trig(rng, 2, 0.6);
    const ScalarField j1 = poisson_bracket(s, f, poisson_bracket(s, g, h));
    const ScalarField j2 = poisson_bracket(s, g, poisson_bracket(s, h, f));
    const ScalarField j3 = poisson_bracket(s, h, poisson_bracket(s, f, g));
    for (int i = 0; i < 30; ++i) {
        const SurfacePoint p{0, rng.uniform(), rng.uniform()};
        CHECK(std::abs(j1.eval(s, p) + j2.eval(s, p) + j3.eval(s, p)) < 1e-6);
    }
}

TEST_CASE("sphere bracket against the finite-difference oracle") {
    const Surface s = make_surface(SurfaceModel::RoundSphere, 3);
    const ScalarField x = sphere_coordinate(0), y = sphere_coordinate(1);
    const ScalarField xy = poisson_bracket(s, x, y);
    Rng rng(31);
    for (int i = 0; i < 100; ++i) {
        const SurfacePoint p{0, rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        CHECK(std::abs(xy.eval(s, p) - fd_bracket(s, x, y, p)) < 1e-6);
    }
    // generic polynomial pair as well
    const ScalarField f = random_sphere_poly(rng, 2, 0.5);
    const ScalarField g = random_sphere_poly(rng, 2, 0.5);
    const ScalarField fg = poisson_bracket(s, f, g);
    for (int i = 0; i < 30; ++i) {
        const SurfacePoint p{0, rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)};
        CHECK(std::abs(fg.eval(s, p) - fd_bracket(s, f, g, p)) < 1e-5);
    }
}

TEST_CASE("bracket is chart covariant") {
    const Surface s = make_surface(SurfaceModel::RoundSphere, 2);
    Rng rng(37);
    const ScalarField f = random_sphere_poly(rng, 2, 0.7);
    const ScalarField g = random_sphere_poly(rng, 2, 0.7);
    const ScalarField fg = poisson_bracket(s, f, g);
    for (int i = 0; i < 20; ++i) {
        const SurfacePoint p{0, rng.uniform(0.4, 1.8), rng.uniform(-1.8, 1.8)};
        const SurfacePoint q = s.to_chart(p, 1);
        CHECK(std::abs(fg.eval(s, p) - fg.eval(s, q)) < 1e-9);
        CHECK(std::abs(fd_bracket(s, f, g, p) - fd_bracket(s, f, g, q)) < 1e-5);
    }
}

TEST_CASE("flow conserves the hamiltonian and handles known flows") {
    const Surface torus = make_surface(SurfaceModel::FlatTorus, 1);
    // constant f: no motion
    const SurfacePoint p0{0, 0.3, 0.6};
    const SurfacePoint pc = flow_point(torus, constant_field(torus, 2.0), p0, 1.0, 1e-2);
    CHECK(torus.distance(pc, p0) < 1e-14);
    // f = y: linear translation, x(t) = x0 - t / k
    const SurfacePoint pl = flow_point(torus, torus_linear(0.0, 1.0), p0, 1.0, 1e-3);
    CHECK(std::abs(pl.u - (0.3 - 1.0 + 1.0)) < 1e-10); // wrapped back into [0,1)
    CHECK(std::abs(pl.v - 0.6) < 1e-12);
    // sphere f = z: a full latitude rotation returns to the start after t = k/2
    const Surface sph = make_surface(SurfaceModel::RoundSphere, 2);
    const SurfacePoint q0{0, 1.2, -0.3};
    const SurfacePoint q1 = flow_point(sph, sphere_coordinate(2), q0, 1.0, 2e-4);
    CHECK(sph.distance(q1, q0) < 1e-6);
    // energy conservation along a generic flow
    Rng rng(41);
    const ScalarField f = random_sphere_poly(rng, 2, 0.8);
    const SurfacePoint q2 = flow_point(sph, f, q0, 1.0, 1e-3);
    CHECK(std::abs(f.eval(sph, q2) - f.eval(sph, q0)) < 1e-8);
}

TEST_CASE("flow preserves enclosed area of transported loops") {
    // Liouville property. The discrete defect is the O(N^-2) polygon shape
    // term; the integrator contribution is O(dt^4) below it. Areas compare
    // mod k: a long flow can carry the bounded disc across a pole.
    const Surface s = make_surface(SurfaceModel::RoundSphere, 3);
    Rng rng(43);
    const ScalarField f = random_sphere_poly(rng, 2, 0.6);
    auto transported_diff = [&](std::size_t n, double t, double dt) {
        DiscretizedCycle cyc = sample_sphere_latitude(s, 0.8, n);
        const double before = enclosed_area(s, cyc);
        std::vector<double> lu(n), lv(n);
        for (std::size_t j = 0; j < n; ++j) {
            const SurfacePoint moved = flow_point(s, f, cyc.point(j), t, dt);
            const SurfacePoint hosted = s.to_chart(moved, 0);
            lu[j] = hosted.u;
            lv[j] = hosted.v;
        }
        const DiscretizedCycle moved(s, 0, std::move(lu), std::move(lv));
        double d = enclosed_area(s, moved) - before;
        return d - double(s.level()) * std::round(d / double(s.level()));
    };
    const double d128 = std::abs(transported_diff(128, 0.05, 5e-4));
    const double d256 = std::abs(transported_diff(256, 0.05, 5e-4));
    CHECK(d256 < 1e-5);
    CHECK(d128 / d256 > 3.0); // second-order decay of the defect
    CHECK(d128 / d256 < 5.0);
    // integrator sensitivity: halving dt moves the result at the dt^4 scale
    const double a = transported_diff(256, 0.5, 2e-3);
    const double b = transported_diff(256, 0.5, 1e-3);
    CHECK(std::abs(a - b) < 1e-8);
}

TEST_CASE("hamiltonian vector is chart covariant") {
    const Surface s = make_surface(SurfaceModel::RoundSphere, 2);
    Rng rng(47);
    const ScalarField f = random_sphere_poly(rng, 2, 0.9);
    for (int i = 0; i < 20; ++i) {
        const SurfacePoint p{0, rng.uniform(0.5, 1.6), rng.uniform(-1.6, 1.6)};
        const SurfacePoint q = s.to_chart(p, 1);
        const Vec2 vp = hamiltonian_vector(s, f, p);
        const Vec2 vq = hamiltonian_vector(s, f, q);
        // transition jacobian of w = 1/z at p
        const double r2 = p.u * p.u + p.v * p.v;
        const double a = (p.v * p.v - p.u * p.u) / (r2 * r2);
        const double b = 2.0 * p.u * p.v / (r2 * r2);
        const Vec2 mapped{a * vp[0] - b * vp[1], b * vp[0] + a * vp[1]};
        CHECK(std::abs(mapped[0] - vq[0]) < 1e-8);
        CHECK(std::abs(mapped[1] - vq[1]) < 1e-8);
    }
}
