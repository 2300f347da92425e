#include "bsq/cycles.hpp"

#include "bsq/prequantum.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bsq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::atomic<std::uint64_t> g_uid_counter{1};

std::uint64_t next_uid() { return g_uid_counter.fetch_add(1); }

void check_size(std::size_t n) {
    if (n < 16 || n % 2 != 0)
        throw std::invalid_argument("cycle needs an even number of samples, N >= 16");
}

// Proper segment intersection test with tolerance; shared endpoints of
// adjacent segments are excluded by the caller.
bool segments_cross(double ax, double ay, double bx, double by, double cx, double cy, double dx,
                    double dy, double eps) {
    auto orient = [](double px, double py, double qx, double qy, double rx, double ry) {
        return (qx - px) * (ry - py) - (qy - py) * (rx - px);
    };
    const double o1 = orient(ax, ay, bx, by, cx, cy);
    const double o2 = orient(ax, ay, bx, by, dx, dy);
    const double o3 = orient(cx, cy, dx, dy, ax, ay);
    const double o4 = orient(cx, cy, dx, dy, bx, by);
    if (((o1 > eps && o2 < -eps) || (o1 < -eps && o2 > eps)) &&
        ((o3 > eps && o4 < -eps) || (o3 < -eps && o4 > eps)))
        return true;
    return false;
}

} // namespace

DiscretizedCycle::DiscretizedCycle(Surface surface, int chart, std::vector<double> lift_u,
                                   std::vector<double> lift_v, bool waive)
    : surface_(surface), chart_(chart), lift_u_(std::move(lift_u)), lift_v_(std::move(lift_v)),
      waived_(waive) {
    const std::size_t n = lift_u_.size();
    check_size(n);
    if (lift_v_.size() != n) throw std::invalid_argument("cycle coordinate arrays mismatch");
    if (surface_.is_torus()) {
        if (chart_ != 0) throw std::invalid_argument("torus has a single chart");
        wind_u_ = int(std::round(lift_u_[n - 1] - lift_u_[0]));
        wind_v_ = int(std::round(lift_v_[n - 1] - lift_v_[0]));
        const double cu = lift_u_[0] + wind_u_ - lift_u_[n - 1];
        const double cv = lift_v_[0] + wind_v_ - lift_v_[n - 1];
        if (std::abs(cu) >= 0.5 || std::abs(cv) >= 0.5)
            throw std::invalid_argument("cycle lift does not close within half a period");
    } else {
        if (chart_ != 0 && chart_ != 1) throw std::invalid_argument("bad sphere chart");
    }
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = (j + 1) % n;
        double du = lift_u_[k] - lift_u_[j];
        double dv = lift_v_[k] - lift_v_[j];
        if (surface_.is_torus() && k == 0) {
            du += wind_u_;
            dv += wind_v_;
        }
        if (du * du + dv * dv < 1e-28)
            throw std::invalid_argument("consecutive cycle points coincide");
    }
}

SurfacePoint DiscretizedCycle::point(std::size_t j) const {
    SurfacePoint p{chart_, lift_u_[j], lift_v_[j]};
    return surface_.wrap(p);
}

std::vector<SurfacePoint> DiscretizedCycle::points() const {
    std::vector<SurfacePoint> out(size());
    for (std::size_t j = 0; j < size(); ++j) out[j] = point(j);
    return out;
}

bool DiscretizedCycle::self_intersects() const {
    if (self_intersects_) return *self_intersects_;
    const std::size_t n = size();
    const double eps = 1e-9;
    bool found = false;
    // Segment j runs from node j to node j+1 (closing via winding).
    auto node = [&](std::size_t j, int copy_u, int copy_v) -> Vec2 {
        const std::size_t jj = j % n;
        double u = lift_u_[jj] + (j >= n ? wind_u_ : 0) + copy_u;
        double v = lift_v_[jj] + (j >= n ? wind_v_ : 0) + copy_v;
        return Vec2{u, v};
    };
    const int copies = surface_.is_torus() ? 1 : 0;
    for (std::size_t i = 0; i < n && !found; ++i) {
        const Vec2 a = node(i, 0, 0), b = node(i + 1, 0, 0);
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue; // adjacent through closure
            for (int cu = -copies; cu <= copies && !found; ++cu)
                for (int cv = -copies; cv <= copies && !found; ++cv) {
                    const Vec2 c = node(j, cu, cv), d = node(j + 1, cu, cv);
                    if (segments_cross(a[0], a[1], b[0], b[1], c[0], c[1], d[0], d[1], eps))
                        found = true;
                }
            if (found) break;
        }
    }
    self_intersects_ = found;
    return found;
}

DiscretizedCycle DiscretizedCycle::resampled(std::size_t m) const {
    const std::size_t n = size();
    std::vector<double> pu(n), pv(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = double(j) / double(n);
        pu[j] = lift_u_[j] - wind_u_ * s;
        pv[j] = lift_v_[j] - wind_v_ * s;
    }
    auto ru = spectral_resample(pu, m);
    auto rv = spectral_resample(pv, m);
    for (std::size_t j = 0; j < m; ++j) {
        const double s = double(j) / double(m);
        ru[j] += wind_u_ * s;
        rv[j] += wind_v_ * s;
    }
    return DiscretizedCycle(surface_, chart_, std::move(ru), std::move(rv), waived_);
}

DiscretizedCycle sample_torus_line(const Surface& s, double y0, std::size_t n) {
    if (!s.is_torus()) throw std::invalid_argument("torus sampler on sphere");
    std::vector<double> u(n), v(n);
    for (std::size_t j = 0; j < n; ++j) {
        u[j] = double(j) / double(n);
        v[j] = y0;
    }
    return DiscretizedCycle(s, 0, std::move(u), std::move(v));
}

DiscretizedCycle sample_torus_vertical(const Surface& s, double x0, std::size_t n) {
    if (!s.is_torus()) throw std::invalid_argument("torus sampler on sphere");
    std::vector<double> u(n), v(n);
    for (std::size_t j = 0; j < n; ++j) {
        u[j] = x0;
        v[j] = double(j) / double(n);
    }
    return DiscretizedCycle(s, 0, std::move(u), std::move(v));
}

DiscretizedCycle sample_torus_graph(const Surface& s, double y0,
                                    const std::vector<std::pair<double, double>>& modes,
                                    std::size_t n) {
    if (!s.is_torus()) throw std::invalid_argument("torus sampler on sphere");
    std::vector<double> u(n), v(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = double(j) / double(n);
        double y = y0;
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const double ph = kTwoPi * double(m + 1) * t;
            y += modes[m].first * std::cos(ph) + modes[m].second * std::sin(ph);
        }
        u[j] = t;
        v[j] = y;
    }
    return DiscretizedCycle(s, 0, std::move(u), std::move(v));
}

DiscretizedCycle sample_sphere_latitude(const Surface& s, double chart_radius, std::size_t n,
                                        int chart) {
    if (!s.is_sphere()) throw std::invalid_argument("sphere sampler on torus");
    if (chart_radius <= 0.0) throw std::invalid_argument("latitude radius must be positive");
    std::vector<double> u(n), v(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double th = kTwoPi * double(j) / double(n);
        u[j] = chart_radius * std::cos(th);
        v[j] = chart_radius * std::sin(th);
    }
    return DiscretizedCycle(s, chart, std::move(u), std::move(v));
}

DiscretizedCycle sample_parametric(const Surface& s, int chart, const std::vector<Vec2>& pts,
                                   bool waive) {
    std::vector<double> u(pts.size()), v(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
        u[j] = pts[j][0];
        v[j] = pts[j][1];
    }
    DiscretizedCycle c(s, chart, std::move(u), std::move(v), waive);
    if (!waive && c.self_intersects())
        throw std::invalid_argument("self-intersecting curve spec (pass waive to accept)");
    return c;
}

// ---------------------------------------------------------------------------
// CycleFrame

CycleFrame::CycleFrame(const DiscretizedCycle& c) : cycle(&c) {
    const std::size_t n = c.size();
    std::vector<double> pu(n), pv(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = double(j) / double(n);
        pu[j] = c.lift_u()[j] - c.winding_u() * s;
        pv[j] = c.lift_v()[j] - c.winding_v() * s;
    }
    tu = spectral_derivative(pu);
    tv = spectral_derivative(pv);
    for (std::size_t j = 0; j < n; ++j) {
        tu[j] += c.winding_u();
        tv[j] += c.winding_v();
    }
    rho.resize(n);
    nu.resize(n);
    nv.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        rho[j] = c.surface().density(c.point(j));
        const double t2 = tu[j] * tu[j] + tv[j] * tv[j];
        if (t2 < 1e-24) throw std::runtime_error("degenerate cycle tangent");
        const double scale = 1.0 / (rho[j] * t2);
        nu[j] = tv[j] * scale;
        nv[j] = -tu[j] * scale;
    }
}

std::vector<double> CycleFrame::restrict_field(const ScalarField& f) const {
    const std::size_t n = cycle->size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j)
        out[j] = f.eval_coords(cycle->surface(), cycle->chart(), cycle->lift_u()[j],
                               cycle->lift_v()[j]);
    return out;
}

std::vector<double> CycleFrame::tangential_component(const ScalarField& f) const {
    const std::size_t n = cycle->size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Vec2 g = f.chart_gradient(cycle->surface(), cycle->point(j));
        out[j] = g[0] * nu[j] + g[1] * nv[j];
    }
    return out;
}

void CycleFrame::hamiltonian_components(const ScalarField& f, std::vector<double>& a,
                                        std::vector<double>& b) const {
    const std::size_t n = cycle->size();
    a.resize(n);
    b.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Vec2 g = f.chart_gradient(cycle->surface(), cycle->point(j));
        a[j] = g[0] * nu[j] + g[1] * nv[j];
        b[j] = -(g[0] * tu[j] + g[1] * tv[j]); // transversal coefficient
    }
}

// ---------------------------------------------------------------------------
// Half-weighted cycles

HalfWeightedCycle make_half_weighted(const DiscretizedCycle& cycle,
                                     const std::vector<double>& raw_weights, int sign,
                                     const WeightTolerances& tol) {
    const std::size_t n = cycle.size();
    if (raw_weights.size() != n) throw std::invalid_argument("weight count mismatch");
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
    for (double w : raw_weights)
        if (!(w > 0.0)) throw std::invalid_argument("raw weights must be strictly positive");
    const auto hol = holonomy(cycle.surface(), cycle);
    if (hol.bs_defect > tol.bs_tol)
        throw std::invalid_argument("cycle fails the Bohr-Sommerfeld tolerance");
    HalfWeightedCycle hw{cycle, raw_weights, sign, next_uid()};
    const double total = pairwise_sum(hw.mu) / double(n);
    for (double& w : hw.mu) w /= total;
    for (double w : hw.mu)
        if (w < tol.mu_min) throw std::invalid_argument("degenerate node weight");
    return hw;
}

TangentPair make_tangent_pair(const HalfWeightedCycle& hw, std::vector<double> psi1,
                              std::vector<double> psi2, bool project_zero_mean) {
    const std::size_t n = hw.size();
    if (psi1.size() != n || psi2.size() != n)
        throw std::invalid_argument("tangent pair size mismatch");
    TangentPair p{hw.uid, std::move(psi1), std::move(psi2)};
    auto project = [&](std::vector<double>& psi) {
        std::vector<double> prod(n);
        for (std::size_t j = 0; j < n; ++j) prod[j] = psi[j] * hw.mu[j];
        const double mean = pairwise_sum(prod) / double(n);
        for (std::size_t j = 0; j < n; ++j) psi[j] -= mean;
    };
    if (project_zero_mean) {
        project(p.psi1);
        project(p.psi2);
    } else {
        for (const auto* psi : {&p.psi1, &p.psi2}) {
            std::vector<double> prod(n);
            for (std::size_t j = 0; j < n; ++j) prod[j] = (*psi)[j] * hw.mu[j];
            if (std::abs(pairwise_sum(prod) / double(n)) > 1e-10)
                throw std::invalid_argument("tangent pair is not zero-mean");
        }
    }
    return p;
}

TangentPair random_tangent_pair(const HalfWeightedCycle& hw, std::uint64_t seed,
                                int mode_cutoff) {
    const std::size_t n = hw.size();
    if (mode_cutoff < 1 || std::size_t(mode_cutoff) >= n / 2)
        throw std::invalid_argument("mode_cutoff must satisfy 1 <= cutoff < N/2");
    Rng rng(seed);
    std::vector<double> psi1(n, 0.0), psi2(n, 0.0);
    for (int m = 1; m <= mode_cutoff; ++m) {
        const double a1 = rng.uniform(-1.0, 1.0), b1 = rng.uniform(-1.0, 1.0);
        const double a2 = rng.uniform(-1.0, 1.0), b2 = rng.uniform(-1.0, 1.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double ph = kTwoPi * m * double(j) / double(n);
            psi1[j] += a1 * std::cos(ph) + b1 * std::sin(ph);
            psi2[j] += a2 * std::cos(ph) + b2 * std::sin(ph);
        }
    }
    return make_tangent_pair(hw, std::move(psi1), std::move(psi2), true);
}

namespace {

HalfWeightedCycle deform_impl(const HalfWeightedCycle& hw, const TangentPair& pair, double eps,
                              const WeightTolerances& tol, bool correct_bs) {
    if (pair.base_uid != hw.uid) throw std::invalid_argument("pair attached to another cycle");
    if (eps == 0.0) return hw;
    const std::size_t n = hw.size();
    const CycleFrame frame(hw.cycle);
    const auto d1 = spectral_derivative(pair.psi1);
    std::vector<double> lu = hw.cycle.lift_u(), lv = hw.cycle.lift_v();
    for (std::size_t j = 0; j < n; ++j) {
        lu[j] += eps * d1[j] * frame.nu[j];
        lv[j] += eps * d1[j] * frame.nv[j];
    }
    std::vector<double> mu(n);
    for (std::size_t j = 0; j < n; ++j) {
        mu[j] = hw.mu[j] * (1.0 + 2.0 * eps * pair.psi2[j]);
        if (!(mu[j] > 0.0)) throw std::invalid_argument("deformation step too large: weight sign");
    }
    const double total = pairwise_sum(mu) / double(n);
    for (double& w : mu) w /= total;
    for (double w : mu)
        if (w < tol.mu_min) throw std::invalid_argument("deformation step too large: weight floor");

    DiscretizedCycle moved(hw.cycle.surface(), hw.cycle.chart(), std::move(lu), std::move(lv),
                           hw.cycle.waived());
    if (correct_bs) {
        // One uniform shift along the transversal field; the enclosed-action
        // derivative of that shift is exactly 1, so a secant pass converges
        // immediately up to curvature terms.
        const double a0 = action_integral(moved.surface(), moved);
        const double target = std::round(a0);
        double delta = a0 - target;
        int guard = 0;
        DiscretizedCycle current = moved;
        while (std::abs(delta) > 1e-13 && guard < 8) {
            const CycleFrame fr(current);
            std::vector<double> cu = current.lift_u(), cv = current.lift_v();
            for (std::size_t j = 0; j < n; ++j) {
                cu[j] -= delta * fr.nu[j];
                cv[j] -= delta * fr.nv[j];
            }
            current = DiscretizedCycle(current.surface(), current.chart(), std::move(cu),
                                       std::move(cv), current.waived());
            delta = action_integral(current.surface(), current) - target;
            ++guard;
        }
        moved = current;
        if (std::abs(delta) > tol.bs_tol)
            throw std::runtime_error("Bohr-Sommerfeld correction did not converge");
    }
    HalfWeightedCycle out{std::move(moved), std::move(mu), hw.sigma, next_uid()};
    return out;
}

} // namespace

HalfWeightedCycle deform_step(const HalfWeightedCycle& hw, const TangentPair& pair, double eps,
                              const WeightTolerances& tol) {
    return deform_impl(hw, pair, eps, tol, true);
}

HalfWeightedCycle deform_step_raw(const HalfWeightedCycle& hw, const TangentPair& pair,
                                  double eps, const WeightTolerances& tol) {
    return deform_impl(hw, pair, eps, tol, false);
}

HalfWeightedCycle resample_half_weighted(const HalfWeightedCycle& hw, std::size_t m,
                                         const WeightTolerances& tol) {
    DiscretizedCycle rc = hw.cycle.resampled(m);
    auto mu = spectral_resample(hw.mu, m);
    for (double& w : mu)
        if (!(w > 0.0)) throw std::runtime_error("resampled weights lost positivity");
    return make_half_weighted(rc, mu, hw.sigma, tol);
}

// ---------------------------------------------------------------------------
// JSON snapshot

std::string half_weighted_to_json(const HalfWeightedCycle& hw) {
    nlohmann::json j;
    j["surface"] = hw.cycle.surface().name();
    j["level"] = hw.cycle.surface().level();
    j["N"] = hw.size();
    j["chart"] = hw.cycle.chart();
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t i = 0; i < hw.size(); ++i)
        pts.push_back({hw.cycle.lift_u()[i], hw.cycle.lift_v()[i]});
    j["points"] = std::move(pts);
    j["mu"] = hw.mu;
    j["sigma"] = hw.sigma;
    j["homology"] = {hw.cycle.winding_u(), hw.cycle.winding_v()};
    return j.dump();
}

HalfWeightedCycle half_weighted_from_json(const std::string& text, const WeightTolerances& tol) {
    const auto j = nlohmann::json::parse(text);
    const std::string name = j.at("surface").get<std::string>();
    const int level = j.at("level").get<int>();
    Surface s = make_surface(name == "torus" ? SurfaceModel::FlatTorus : SurfaceModel::RoundSphere,
                             level);
    const std::size_t n = j.at("N").get<std::size_t>();
    std::vector<double> lu(n), lv(n);
    for (std::size_t i = 0; i < n; ++i) {
        lu[i] = j.at("points")[i][0].get<double>();
        lv[i] = j.at("points")[i][1].get<double>();
    }
    DiscretizedCycle cycle(s, j.at("chart").get<int>(), std::move(lu), std::move(lv));
    std::vector<double> mu = j.at("mu").get<std::vector<double>>();
    // Weights in a snapshot are already normalized; rebuild without
    // renormalizing so the round-trip is bit-stable.
    HalfWeightedCycle hw{std::move(cycle), std::move(mu), j.at("sigma").get<int>(), next_uid()};
    const auto hol = holonomy(hw.cycle.surface(), hw.cycle);
    if (hol.bs_defect > tol.bs_tol)
        throw std::invalid_argument("snapshot cycle fails the Bohr-Sommerfeld tolerance");
    return hw;
}

} // namespace bsq
