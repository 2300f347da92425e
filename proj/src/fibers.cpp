#include "bsq/fibers.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bsq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Monotone family parametrizations. The torus family is the line y = c,
// c in [0,1); the sphere family is the latitude of height Z in (-1,1),
// sampled in chart 0 with radius sqrt((1+Z)/(1-Z)).
DiscretizedCycle family_member(const Surface& s, Fibration fib, double param, std::size_t n) {
    if (fib == Fibration::TorusY) return sample_torus_line(s, param, n);
    const double r = std::sqrt((1.0 + param) / (1.0 - param));
    return sample_sphere_latitude(s, r, n);
}

// Signed monotone action along the family (the torus line action is -k c;
// flip the sign there so both families increase).
double family_action(const Surface& s, Fibration fib, double param, std::size_t n) {
    const double a = action_integral(s, family_member(s, fib, param, n));
    return fib == Fibration::TorusY ? -a : a;
}

double fiber_coordinate(const Surface& s, Fibration fib, double param) {
    return param; // torus: the line height; sphere: Z
}

} // namespace

ScalarField fibration_field(const Surface& s, Fibration fib) {
    if (fib == Fibration::TorusY) {
        if (!s.is_torus()) throw std::invalid_argument("TorusY fibration on sphere");
        return torus_linear(0.0, 1.0, 0.0);
    }
    if (!s.is_sphere()) throw std::invalid_argument("SphereZ fibration on torus");
    return sphere_coordinate(2);
}

std::vector<FiberRecord> enumerate_bs_fibers(const Surface& s, Fibration fib,
                                             int scan_resolution, std::size_t n,
                                             double action_tol) {
    const int k = s.level();
    if (scan_resolution <= 0) scan_resolution = 16 * k;
    const bool torus = (fib == Fibration::TorusY);
    if (torus && !s.is_torus()) throw std::invalid_argument("fibration/surface mismatch");
    if (!torus && !s.is_sphere()) throw std::invalid_argument("fibration/surface mismatch");

    // Parameter range: the full period on the torus; latitudes clear of the
    // degenerate poles on the sphere (the scan margin keeps the enclosed
    // action inside (1/4, k - 1/4), where all integral fibers live).
    double lo = torus ? 0.0 : -1.0 + 1e-6;
    double hi = torus ? 1.0 : 1.0 - 1e-6;
    if (!torus) {
        // refine the range so the scan sweeps actions [1/4, k - 1/4]
        auto z_of_action = [&](double a) { return 2.0 * a / double(k) - 1.0; };
        lo = z_of_action(0.25);
        hi = z_of_action(double(k) - 0.25);
        if (k == 1) return {}; // no interior integral action exists
    }

    std::vector<double> params(scan_resolution + 1), acts(scan_resolution + 1);
    for (int i = 0; i <= scan_resolution; ++i) {
        params[i] = lo + (hi - lo) * double(i) / double(scan_resolution);
        // keep the torus endpoint inside the period
        if (torus && i == scan_resolution) params[i] = hi - 0.5 / double(scan_resolution);
        acts[i] = family_action(s, fib, params[i], n);
    }
    for (int i = 0; i < scan_resolution; ++i)
        if (!(acts[i + 1] > acts[i]))
            throw std::runtime_error("action scan is not monotone; refine the resolution");

    std::vector<FiberRecord> out;
    auto push_root = [&](double param) {
        DiscretizedCycle cyc = family_member(s, fib, param, n);
        auto weights = invariant_half_weight(s, fib, cyc);
        const double act = family_action(s, fib, param, n);
        FiberRecord rec{std::round(act) / double(k),
                        std::round(act),
                        fiber_coordinate(s, fib, param),
                        int(out.size()),
                        std::move(cyc),
                        std::move(weights.first),
                        std::move(weights.second)};
        out.push_back(std::move(rec));
    };

    // Exact root at the scan start (torus c = 0 carries action 0).
    if (std::abs(acts[0] - std::round(acts[0])) <= action_tol &&
        (torus || (std::round(acts[0]) > 0.1 && std::round(acts[0]) < k - 0.1)))
        push_root(params[0]);

    for (int i = 0; i < scan_resolution; ++i) {
        const double ja = std::floor(acts[i]), jb = std::floor(acts[i + 1]);
        if (jb - ja > 1.5)
            throw std::runtime_error(
                "scan resolution too coarse to isolate Bohr-Sommerfeld roots");
        if (jb > ja) {
            const double target = jb;
            if (!torus && (target < 0.5 || target > double(k) - 0.5)) continue;
            if (torus && target > double(k) - 0.5) continue; // c=1 repeats c=0
            double plo = params[i], phi = params[i + 1];
            double pm = 0.5 * (plo + phi);
            for (int it = 0; it < 200; ++it) {
                pm = 0.5 * (plo + phi);
                const double am = family_action(s, fib, pm, n);
                if (std::abs(am - target) <= 0.1 * action_tol) break;
                (am < target ? plo : phi) = pm;
            }
            if (std::abs(family_action(s, fib, pm, n) - target) > action_tol)
                throw std::runtime_error("bisection failed to reach the action tolerance");
            push_root(pm);
        }
    }
    return out;
}

std::pair<HalfWeightedCycle, HalfWeightedCycle> invariant_half_weight(
    const Surface& s, Fibration fib, const DiscretizedCycle& fiber) {
    const ScalarField f = fibration_field(s, fib);
    const CycleFrame frame(fiber);
    const auto a = frame.tangential_component(f);
    const std::size_t n = fiber.size();
    std::vector<double> mu(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(a[j]) < 1e-12)
            throw std::invalid_argument("degenerate fiber: W_f vanishes at a node");
        mu[j] = 1.0 / std::abs(a[j]);
    }
    return {make_half_weighted(fiber, mu, +1), make_half_weighted(fiber, mu, -1)};
}

int invariance_kernel_dimension(const Surface& s, Fibration fib, const DiscretizedCycle& fiber,
                                double rel_tol) {
    const ScalarField f = fibration_field(s, fib);
    const CycleFrame frame(fiber);
    const auto a = frame.tangential_component(f);
    const std::size_t n = fiber.size();
    // Basis of the de-aliased trigonometric subspace: 1, cos(2 pi m s),
    // sin(2 pi m s) for m = 1 .. N/2 - 1 (the Nyquist sawtooth is excluded
    // from the model space).
    const std::size_t cols = n - 1;
    Eigen::MatrixXd op(n, cols);
    std::vector<double> col(n);
    std::size_t cidx = 0;
    auto add_col = [&](const std::vector<double>& values) {
        const auto d = spectral_derivative(values);
        for (std::size_t j = 0; j < n; ++j) op(long(j), long(cidx)) = a[j] * d[j];
        ++cidx;
    };
    std::fill(col.begin(), col.end(), 1.0);
    add_col(col);
    for (std::size_t m = 1; m < n / 2; ++m) {
        for (std::size_t j = 0; j < n; ++j) col[j] = std::cos(kTwoPi * m * double(j) / double(n));
        add_col(col);
        for (std::size_t j = 0; j < n; ++j) col[j] = std::sin(kTwoPi * m * double(j) / double(n));
        add_col(col);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(op);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    int dim = 0;
    for (long i = 0; i < sv.size(); ++i)
        if (sv(i) <= rel_tol * std::max(smax, 1.0)) ++dim;
    return dim;
}

RealHilbert build_real_hilbert(const Surface& s, Fibration fib, std::size_t n,
                               int scan_resolution, double residual_tol) {
    RealHilbert h;
    h.fibers = enumerate_bs_fibers(s, fib, scan_resolution, n);
    const ScalarField f = fibration_field(s, fib);
    for (const auto& rec : h.fibers) {
        for (const auto* hw : {&rec.theta_plus, &rec.theta_minus}) {
            const auto r = criticality_residual(f, *hw);
            if (std::max(r.first, r.second) > residual_tol)
                throw std::runtime_error("invariant weight fails the criticality residual");
        }
    }
    h.dimension = int(h.fibers.size());
    return h;
}

std::string fiber_table_csv(const std::vector<FiberRecord>& fibers) {
    std::ostringstream os;
    os.precision(17);
    os << "action,level_action,coordinate,l_index\n";
    for (const auto& rec : fibers)
        os << rec.action << "," << rec.level_action << "," << rec.coordinate << ","
           << rec.l_index << "\n";
    return os.str();
}

} // namespace bsq
