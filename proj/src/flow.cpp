#include "bsq/flow.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace bsq {

namespace {

struct State {
    double u, v, w;
};

using Rhs = std::function<State(const Surface&, int chart, const State&)>;

State rk4_step(const Surface& s, int chart, const State& x, double h, const Rhs& rhs) {
    const State k1 = rhs(s, chart, x);
    const State x2{x.u + 0.5 * h * k1.u, x.v + 0.5 * h * k1.v, x.w + 0.5 * h * k1.w};
    const State k2 = rhs(s, chart, x2);
    const State x3{x.u + 0.5 * h * k2.u, x.v + 0.5 * h * k2.v, x.w + 0.5 * h * k2.w};
    const State k3 = rhs(s, chart, x3);
    const State x4{x.u + h * k3.u, x.v + h * k3.v, x.w + h * k3.w};
    const State k4 = rhs(s, chart, x4);
    return State{x.u + h / 6.0 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u),
                 x.v + h / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v),
                 x.w + h / 6.0 * (k1.w + 2 * k2.w + 2 * k3.w + k4.w)};
}

SurfacePoint integrate(const Surface& s, const ScalarField& f,
                       const std::function<double(const Surface&, const SurfacePoint&)>* integrand,
                       SurfacePoint p, double t, double dt, double* accum) {
    if (dt <= 0.0) throw std::invalid_argument("flow_point: dt must be positive");
    if (t == 0.0) return p;
    const double dir = (t > 0.0) ? 1.0 : -1.0;
    double remaining = std::abs(t);
    State x{p.u, p.v, 0.0};
    int chart = p.chart;
    const Rhs rhs = [&](const Surface& srf, int ch, const State& st) -> State {
        const SurfacePoint q{ch, st.u, st.v};
        const Vec2 xf = hamiltonian_vector(srf, f, q);
        const double w = integrand ? (*integrand)(srf, q) : 0.0;
        return State{dir * xf[0], dir * xf[1], dir * w};
    };
    while (remaining > 0.0) {
        const double h = std::min(dt, remaining);
        x = rk4_step(s, chart, x, h, rhs);
        remaining -= h;
        SurfacePoint q = s.normalize_chart(SurfacePoint{chart, x.u, x.v});
        chart = q.chart;
        x.u = q.u;
        x.v = q.v;
    }
    if (accum) *accum += x.w;
    return SurfacePoint{chart, x.u, x.v};
}

} // namespace

SurfacePoint flow_point(const Surface& s, const ScalarField& f, SurfacePoint p, double t,
                        double dt) {
    return integrate(s, f, nullptr, p, t, dt, nullptr);
}

SurfacePoint flow_point_with_integral(const Surface& s, const ScalarField& f,
                                      const ScalarField& g, SurfacePoint p, double t, double dt,
                                      double* phase) {
    const FlowIntegrand cb = [&g](const Surface& srf, const SurfacePoint& q) {
        return g.eval(srf, q);
    };
    return integrate(s, f, &cb, p, t, dt, phase);
}

SurfacePoint flow_point_with_callback(const Surface& s, const ScalarField& f,
                                      const FlowIntegrand& g, SurfacePoint p, double t, double dt,
                                      double* phase) {
    return integrate(s, f, &g, p, t, dt, phase);
}

} // namespace bsq
