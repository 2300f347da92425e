#include "bsq/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bsq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double weighted_sum(const std::vector<double>& values, const std::vector<double>& mu) {
    const std::size_t n = values.size();
    std::vector<double> prod(n);
    for (std::size_t j = 0; j < n; ++j) prod[j] = values[j] * mu[j];
    return pairwise_sum(prod) / double(n);
}

void check_attachment(const HalfWeightedCycle& hw, const TangentPair& p) {
    if (p.base_uid != hw.uid || p.psi1.size() != hw.size())
        throw std::invalid_argument("tangent pair attached to a different cycle");
}

// (a mu)' / (2 mu) at the nodes.
std::vector<double> weight_residual_samples(const std::vector<double>& a,
                                            const std::vector<double>& mu) {
    const std::size_t n = mu.size();
    std::vector<double> amu(n);
    for (std::size_t j = 0; j < n; ++j) amu[j] = a[j] * mu[j];
    auto d = spectral_derivative(amu);
    for (std::size_t j = 0; j < n; ++j) d[j] /= 2.0 * mu[j];
    return d;
}

} // namespace

ModuliConfig default_moduli_config(const Surface& s) {
    ModuliConfig cfg;
    cfg.tau = 1.0 / (2.0 * double(s.level()));
    return cfg;
}

double special_value(const ScalarField& f, const HalfWeightedCycle& hw, const ModuliConfig& cfg) {
    const std::size_t n = hw.size();
    std::vector<double> fv(n);
    for (std::size_t j = 0; j < n; ++j)
        fv[j] = f.eval_coords(hw.cycle.surface(), hw.cycle.chart(), hw.cycle.lift_u()[j],
                              hw.cycle.lift_v()[j]);
    return cfg.tau * weighted_sum(fv, hw.mu);
}

double omega_form(const HalfWeightedCycle& hw, const TangentPair& pa, const TangentPair& pb) {
    check_attachment(hw, pa);
    check_attachment(hw, pb);
    const std::size_t n = hw.size();
    std::vector<double> prod(n);
    for (std::size_t j = 0; j < n; ++j)
        prod[j] = (pa.psi1[j] * pb.psi2[j] - pa.psi2[j] * pb.psi1[j]) * hw.mu[j];
    return pairwise_sum(prod) / double(n);
}

double differential_pairing(const ScalarField& f, const HalfWeightedCycle& hw,
                            const TangentPair& pair, const ModuliConfig& cfg) {
    check_attachment(hw, pair);
    const CycleFrame frame(hw.cycle);
    const auto fv = frame.restrict_field(f);
    const auto a = frame.tangential_component(f);
    const auto dalpha = spectral_derivative(pair.psi1);
    const std::size_t n = hw.size();
    std::vector<double> term1(n), term2(n);
    for (std::size_t j = 0; j < n; ++j) {
        term1[j] = fv[j] * 2.0 * pair.psi2[j] * hw.mu[j];
        term2[j] = dalpha[j] * a[j] * hw.mu[j];
    }
    return cfg.tau * (pairwise_sum(term1) + pairwise_sum(term2)) / double(n);
}

TangentPair theta_bs_components(const ScalarField& f, const HalfWeightedCycle& hw) {
    const CycleFrame frame(hw.cycle);
    const auto fv = frame.restrict_field(f);
    const auto a = frame.tangential_component(f);
    const std::size_t n = hw.size();
    const double c = weighted_sum(fv, hw.mu);
    std::vector<double> psi1(n), psi2 = weight_residual_samples(a, hw.mu);
    for (std::size_t j = 0; j < n; ++j) psi1[j] = fv[j] - c;
    return make_tangent_pair(hw, std::move(psi1), std::move(psi2), true);
}

TangentPair moduli_ham_field(const ScalarField& f, const HalfWeightedCycle& hw,
                             const ModuliConfig& cfg) {
    const CycleFrame frame(hw.cycle);
    const auto fv = frame.restrict_field(f);
    const auto a = frame.tangential_component(f);
    const std::size_t n = hw.size();
    const double c = weighted_sum(fv, hw.mu);
    std::vector<double> psi1(n), psi2(n), amu(n);
    for (std::size_t j = 0; j < n; ++j) {
        psi1[j] = 2.0 * cfg.tau * (fv[j] - c);
        amu[j] = a[j] * hw.mu[j];
    }
    const auto damu = spectral_derivative(amu);
    for (std::size_t j = 0; j < n; ++j) psi2[j] = cfg.tau * damu[j] / hw.mu[j];
    return make_tangent_pair(hw, std::move(psi1), std::move(psi2), true);
}

double moduli_bracket(const ScalarField& f, const ScalarField& g, const HalfWeightedCycle& hw,
                      const ModuliConfig& cfg) {
    const TangentPair xf = moduli_ham_field(f, hw, cfg);
    const TangentPair xg = moduli_ham_field(g, hw, cfg);
    return omega_form(hw, xf, xg);
}

std::pair<double, double> criticality_residual_raw(const ScalarField& f,
                                                   const DiscretizedCycle& cycle,
                                                   const std::vector<double>& mu) {
    const CycleFrame frame(cycle);
    const auto fv = frame.restrict_field(f);
    const auto a = frame.tangential_component(f);
    const std::size_t n = mu.size();
    const double c = weighted_sum(fv, mu);
    std::vector<double> sq(n);
    for (std::size_t j = 0; j < n; ++j) sq[j] = (fv[j] - c) * (fv[j] - c) * mu[j];
    const double r1 = std::sqrt(std::max(0.0, pairwise_sum(sq) / double(n)));
    const auto resid = weight_residual_samples(a, mu);
    double r2 = 0.0;
    for (double v : resid) r2 = std::max(r2, std::abs(v));
    return {r1, r2};
}

std::pair<double, double> criticality_residual(const ScalarField& f,
                                               const HalfWeightedCycle& hw) {
    return criticality_residual_raw(f, hw.cycle, hw.mu);
}

bool critical_tangent_test(const ScalarField& f, const HalfWeightedCycle& hw,
                           const TangentPair& pair, const ModuliConfig& cfg) {
    check_attachment(hw, pair);
    const auto res = criticality_residual(f, hw);
    if (std::max(res.first, res.second) > cfg.criticality_tol)
        throw std::invalid_argument("critical_tangent_test: the point is not critical for F_f");
    const CycleFrame frame(hw.cycle);
    const auto a = frame.tangential_component(f);
    const auto d1 = spectral_derivative(pair.psi1);
    const auto d2 = spectral_derivative(pair.psi2);
    double sup = 0.0;
    for (std::size_t j = 0; j < hw.size(); ++j) {
        sup = std::max(sup, std::abs(a[j] * d1[j]));
        sup = std::max(sup, std::abs(a[j] * d2[j]));
    }
    return sup <= cfg.identity_tol;
}

// ---------------------------------------------------------------------------
// Critical-point search

namespace {

double residual_energy(const ScalarField& f, const DiscretizedCycle& cycle,
                       const std::vector<double>& mu) {
    const CycleFrame frame(cycle);
    const auto fv = frame.restrict_field(f);
    const auto a = frame.tangential_component(f);
    const std::size_t n = mu.size();
    const double c = weighted_sum(fv, mu);
    std::vector<double> sq(n);
    for (std::size_t j = 0; j < n; ++j) sq[j] = (fv[j] - c) * (fv[j] - c) * mu[j];
    const double e1 = pairwise_sum(sq) / double(n);
    const auto resid = weight_residual_samples(a, mu);
    std::vector<double> sq2(n);
    for (std::size_t j = 0; j < n; ++j) sq2[j] = resid[j] * resid[j] * mu[j];
    const double e2 = pairwise_sum(sq2) / double(n);
    return e1 + e2;
}

std::vector<std::pair<std::vector<double>, std::vector<double>>> descent_directions(
    std::size_t n, int cutoff) {
    std::vector<std::pair<std::vector<double>, std::vector<double>>> dirs;
    for (int m = 1; m <= cutoff; ++m) {
        std::vector<double> c(n), s(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double ph = kTwoPi * m * double(j) / double(n);
            c[j] = std::cos(ph);
            s[j] = std::sin(ph);
        }
        std::vector<double> zero(n, 0.0);
        dirs.push_back({c, zero});
        dirs.push_back({s, zero});
        dirs.push_back({zero, c});
        dirs.push_back({zero, s});
    }
    return dirs;
}

} // namespace

DescentResult find_critical_point(const ScalarField& f, const HalfWeightedCycle& seed,
                                  const ModuliConfig& cfg) {
    DescentResult out{seed, false, 0, criticality_residual(f, seed), {}, ""};
    auto resid_norm = [](const std::pair<double, double>& r) {
        return std::max(r.first, r.second);
    };
    if (resid_norm(out.residual) <= cfg.descent_tol) {
        out.converged = true;
        out.message = "seed already critical";
        return out;
    }
    HalfWeightedCycle hw = seed;
    const std::size_t n = hw.size();
    double step = cfg.descent_initial_step;
    double energy = residual_energy(f, hw.cycle, hw.mu);

    // Analytic descent direction: the first-order variation of the squared
    // residual under the deformation encoding. The shape part is
    // D[(f-c) a mu]; the weight part combines the flattening adjoint of the
    // invariance residual with the variance gradient in mu.
    auto direction = [&](const HalfWeightedCycle& point) -> TangentPair {
        const CycleFrame frame(point.cycle);
        const auto fv = frame.restrict_field(f);
        const auto a = frame.tangential_component(f);
        const double c = [&] {
            std::vector<double> prod(n);
            for (std::size_t j = 0; j < n; ++j) prod[j] = fv[j] * point.mu[j];
            return pairwise_sum(prod) / double(n);
        }();
        std::vector<double> fam(n), amu(n);
        for (std::size_t j = 0; j < n; ++j) {
            fam[j] = (fv[j] - c) * a[j] * point.mu[j];
            amu[j] = a[j] * point.mu[j];
        }
        auto p1 = spectral_derivative(fam);
        auto damu = spectral_derivative(amu);
        std::vector<double> rho2(n);
        for (std::size_t j = 0; j < n; ++j) rho2[j] = damu[j] / (2.0 * point.mu[j]);
        const auto drho2 = spectral_derivative(rho2);
        std::vector<double> p2(n);
        for (std::size_t j = 0; j < n; ++j)
            p2[j] = a[j] * point.mu[j] * drho2[j] + rho2[j] * rho2[j] * point.mu[j] -
                    (fv[j] - c) * (fv[j] - c) * point.mu[j];
        double scale = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            scale = std::max({scale, std::abs(p1[j]), std::abs(p2[j])});
        if (scale < 1e-300) scale = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            p1[j] /= scale;
            p2[j] /= scale;
        }
        return make_tangent_pair(point, std::move(p1), std::move(p2), true);
    };

    auto try_loop = [&](bool analytic, int budget) -> bool {
        const auto dirs = descent_directions(n, cfg.descent_mode_cutoff);
        const double probe = 1e-6;
        for (int iter = 0; iter < budget; ++iter) {
            TangentPair pair = direction(hw);
            if (!analytic) {
                // finite-difference gradient over the truncated basis
                std::vector<double> grad(dirs.size(), 0.0);
                double gnorm = 0.0;
                for (std::size_t d = 0; d < dirs.size(); ++d) {
                    const TangentPair dir =
                        make_tangent_pair(hw, dirs[d].first, dirs[d].second, true);
                    double ep = energy, em = energy;
                    try {
                        const auto hp = deform_step_raw(hw, dir, probe, cfg.weight_tol);
                        const auto hm = deform_step_raw(hw, dir, -probe, cfg.weight_tol);
                        ep = residual_energy(f, hp.cycle, hp.mu);
                        em = residual_energy(f, hm.cycle, hm.mu);
                    } catch (const std::exception&) {
                    }
                    grad[d] = (ep - em) / (2.0 * probe);
                    gnorm += grad[d] * grad[d];
                }
                gnorm = std::sqrt(gnorm);
                if (gnorm < 1e-16) return false;
                std::vector<double> p1(n, 0.0), p2(n, 0.0);
                for (std::size_t d = 0; d < dirs.size(); ++d) {
                    const double w = -grad[d] / gnorm;
                    for (std::size_t j = 0; j < n; ++j) {
                        p1[j] += w * dirs[d].first[j];
                        p2[j] += w * dirs[d].second[j];
                    }
                }
                pair = make_tangent_pair(hw, std::move(p1), std::move(p2), true);
            }
            bool accepted = false;
            for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
                try {
                    HalfWeightedCycle trial = deform_step(hw, pair, step, cfg.weight_tol);
                    const double etrial = residual_energy(f, trial.cycle, trial.mu);
                    if (etrial < energy) {
                        hw = std::move(trial);
                        energy = etrial;
                        accepted = true;
                        step = std::min(step * 1.3, cfg.descent_initial_step * 4.0);
                    } else {
                        step *= 0.5;
                    }
                } catch (const std::exception&) {
                    step *= 0.5;
                }
                if (step < 1e-13) break;
            }
            ++out.iterations;
            out.residual = criticality_residual(f, hw);
            out.trace.push_back(resid_norm(out.residual));
            if (resid_norm(out.residual) <= cfg.descent_tol) return true;
            if (!accepted || step < 1e-13) return false;
        }
        return false;
    };

    const int budget = cfg.descent_max_iter;
    bool ok = try_loop(true, (3 * budget) / 4);
    if (!ok && resid_norm(out.residual) > cfg.descent_tol && out.iterations < budget) {
        step = std::max(step, cfg.descent_initial_step * 1e-2);
        ok = try_loop(false, budget - out.iterations);
    }
    out.point = hw;
    out.converged = ok;
    out.message = ok ? "converged"
                     : (out.iterations >= budget ? "iteration budget exhausted"
                                                 : "descent stalled (step collapsed)");
    return out;
}

// ---------------------------------------------------------------------------
// Boundary contraction scan

ContractionScan boundary_contraction_scan(const Surface& s, double area_lo, double area_hi,
                                          int count, std::size_t n, const ModuliConfig& cfg) {
    if (!s.is_sphere()) throw std::invalid_argument("contraction scan needs the sphere");
    if (count < 2) throw std::invalid_argument("contraction scan needs at least two rows");
    const int k = s.level();
    const ScalarField fy = sphere_north_divisor_density(k);
    ContractionScan scan;
    std::vector<double> mu(n);
    for (std::size_t j = 0; j < n; ++j)
        mu[j] = 1.0 + 0.3 * std::cos(kTwoPi * double(j) / double(n));
    const double total = pairwise_sum(mu) / double(n);
    for (double& w : mu) w /= total;
    for (int i = 0; i < count; ++i) {
        const double t = area_lo + (area_hi - area_lo) * double(i) / double(count - 1);
        const DiscretizedCycle lat = bs_latitude(s, t, n);
        ScanRow row;
        row.parameter = t;
        std::vector<double> fv(n);
        for (std::size_t j = 0; j < n; ++j)
            fv[j] = fy.eval_coords(s, lat.chart(), lat.lift_u()[j], lat.lift_v()[j]);
        row.value = cfg.tau * weighted_sum(fv, mu);
        const auto r = criticality_residual_raw(fy, lat, mu);
        row.residual_constancy = r.first;
        row.residual_weight = r.second;
        row.level_set_coincidence = r.first < 1e-10;
        scan.rows.push_back(row);
    }
    scan.strictly_monotone = true;
    for (std::size_t i = 1; i < scan.rows.size(); ++i)
        if (!(scan.rows[i].value < scan.rows[i - 1].value)) scan.strictly_monotone = false;
    scan.min_interior_residual = 1e300;
    for (const auto& row : scan.rows)
        scan.min_interior_residual =
            std::min(scan.min_interior_residual,
                     std::max(row.residual_constancy, row.residual_weight));
    return scan;
}

} // namespace bsq
