#pragma once

#include "bsq/fields.hpp"

#include <functional>
#include "bsq/surface.hpp"

namespace bsq {

// Integrate the Hamiltonian flow of f for time t (classical 4-stage
// Runge-Kutta, fixed substep dt). Sphere points re-host automatically when
// chart coordinates grow past the comfort bound; torus points wrap.
SurfacePoint flow_point(const Surface& s, const ScalarField& f, SurfacePoint p, double t,
                        double dt);

// Same flow with an attached phase integral: returns the flowed point and
// accumulates int_0^t g(p(s)) ds into *phase (integrated as an extra RK4
// state component, so the order matches the point update).
SurfacePoint flow_point_with_integral(const Surface& s, const ScalarField& f,
                                      const ScalarField& g, SurfacePoint p, double t, double dt,
                                      double* phase);

// Callback form of the same, for chart-dependent integrands.
using FlowIntegrand = std::function<double(const Surface&, const SurfacePoint&)>;
SurfacePoint flow_point_with_callback(const Surface& s, const ScalarField& f,
                                      const FlowIntegrand& g, SurfacePoint p, double t, double dt,
                                      double* phase);

} // namespace bsq
