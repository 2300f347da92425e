#include "bsq/prequantum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bsq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Exact integral of dt / (1 + |P + t D|^2) over [0,1].
double segment_conformal_integral(double pu, double pv, double du, double dv) {
    const double a = du * du + dv * dv;
    const double b = 2.0 * (pu * du + pv * dv);
    const double c = 1.0 + pu * pu + pv * pv;
    if (a < 1e-30) return 1.0 / c;
    const double q = 4.0 * a * c - b * b; // positive: c > |P|^2 pointwise
    const double sq = std::sqrt(q);
    return 2.0 / sq * (std::atan((2.0 * a + b) / sq) - std::atan(b / sq));
}

// Per-segment action contribution in the cycle's host chart.
double segment_action(const Surface& s, int chart, double pu, double pv, double qu, double qv) {
    const double k = double(s.level());
    if (s.is_torus()) {
        // A = -k y dx, exact on the straight lift segment.
        return -k * (qu - pu) * 0.5 * (pv + qv);
    }
    const double du = qu - pu, dv = qv - pv;
    const double cross = pu * qv - pv * qu; // u dv - v du is constant = P x Q
    double val = (k / kTwoPi) * cross * segment_conformal_integral(pu, pv, du, dv);
    if (chart == 1) {
        // Continue the chart-0 primitive across the overlap: subtract the
        // cocycle (k / 2 pi) * d(theta_1) integrated over the segment.
        double dth = std::atan2(qv, qu) - std::atan2(pv, pu);
        if (dth > kPi) dth -= kTwoPi;
        if (dth <= -kPi) dth += kTwoPi;
        val -= (k / kTwoPi) * dth;
    }
    return val;
}

} // namespace

std::vector<double> partial_actions(const Surface& s, const DiscretizedCycle& c) {
    const std::size_t n = c.size();
    std::vector<double> alpha(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = (j + 1) % n;
        double qu = c.lift_u()[k], qv = c.lift_v()[k];
        if (s.is_torus() && k == 0) {
            qu += c.winding_u();
            qv += c.winding_v();
        }
        alpha[j + 1] =
            alpha[j] + segment_action(s, c.chart(), c.lift_u()[j], c.lift_v()[j], qu, qv);
    }
    return alpha;
}

double action_integral(const Surface& s, const DiscretizedCycle& c) {
    return partial_actions(s, c).back();
}

double action_integral_alternate(const Surface& s, const DiscretizedCycle& c) {
    const std::size_t n = c.size();
    if (s.is_torus()) {
        // A' = +k x dy; differs from the primary gauge by d(k x y).
        const double k = double(s.level());
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t m = (j + 1) % n;
            double qu = c.lift_u()[m], qv = c.lift_v()[m];
            if (m == 0) {
                qu += c.winding_u();
                qv += c.winding_v();
            }
            sum += k * (qv - c.lift_v()[j]) * 0.5 * (c.lift_u()[j] + qu);
        }
        return sum;
    }
    // Sphere: rehost every node in the other chart and integrate there.
    std::vector<double> lu(n), lv(n);
    const int other = 1 - c.chart();
    for (std::size_t j = 0; j < n; ++j) {
        const SurfacePoint q = s.to_chart(c.point(j), other);
        lu[j] = q.u;
        lv[j] = q.v;
    }
    DiscretizedCycle rehosted(s, other, std::move(lu), std::move(lv), true);
    return action_integral(s, rehosted);
}

HolonomyResult holonomy(const Surface& s, const DiscretizedCycle& c) {
    const double act = action_integral(s, c);
    double m = act - std::floor(act);
    if (m >= 1.0) m -= 1.0;
    HolonomyResult r;
    r.action = m;
    r.bs_defect = std::min(m, 1.0 - m);
    r.value = std::polar(1.0, kTwoPi * m);
    return r;
}

std::pair<bool, double> is_bohr_sommerfeld(const Surface& s, const DiscretizedCycle& c,
                                           double tol) {
    if (!(tol > 0.0 && tol < 0.5))
        throw std::invalid_argument("Bohr-Sommerfeld tolerance must lie in (0, 1/2)");
    const auto h = holonomy(s, c);
    return {h.bs_defect <= tol, h.bs_defect};
}

double enclosed_area(const Surface& s, const DiscretizedCycle& c) {
    if (c.self_intersects())
        throw std::runtime_error(
            "enclosed area undefined: the cycle's self-intersection flag is set");
    return action_integral(s, c);
}

DiscretizedCycle bs_latitude(const Surface& s, double target_action, std::size_t n) {
    if (!s.is_sphere()) throw std::invalid_argument("bs_latitude needs the sphere");
    const double k = double(s.level());
    if (!(target_action > 0.0 && target_action < k))
        throw std::invalid_argument("target action must lie strictly between 0 and k");
    auto act = [&](double r) {
        return action_integral(s, sample_sphere_latitude(s, r, n));
    };
    double lo = 1e-6, hi = 1.0;
    while (act(hi) < target_action) {
        hi *= 2.0;
        if (hi > 1e6) throw std::runtime_error("bs_latitude bracket expansion failed");
    }
    for (int it = 0; it < 240; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double a = act(mid);
        if (std::abs(a - target_action) < 1e-13) return sample_sphere_latitude(s, mid, n);
        (a < target_action ? lo : hi) = mid;
    }
    return sample_sphere_latitude(s, 0.5 * (lo + hi), n);
}

} // namespace bsq
