#include "bsq/toeplitz.hpp"

#include "bsq/flow.hpp"
#include "bsq/prequantum.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bsq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<ToeplitzData::Node> build_nodes(const Surface& s, int order) {
    const int k = s.level();
    const int m = 2 * order + 2; // angular count: resolves modes up to k + deg f
    const auto gl = gauss_legendre(order);
    std::vector<ToeplitzData::Node> nodes;
    nodes.reserve(std::size_t(order) * m);
    for (int a = 0; a < order; ++a) {
        const double z = gl.node[a];
        const double wz = gl.weight[a];
        // host chart keeps |coords| <= 1: chart 0 below the equator
        const int chart = (z <= 0.0) ? 0 : 1;
        const double r0 = std::sqrt((1.0 + z) / (1.0 - z)); // chart-0 radius
        const double r = (chart == 0) ? r0 : 1.0 / r0;
        for (int b = 0; b < m; ++b) {
            const double th0 = kTwoPi * double(b) / double(m); // chart-0 angle
            ToeplitzData::Node node;
            node.z = z;
            node.theta = th0;
            node.weight = double(k) / (4.0 * kPi) * wz * (kTwoPi / double(m));
            const double th = (chart == 0) ? th0 : -th0;
            node.point = SurfacePoint{chart, r * std::cos(th), r * std::sin(th)};
            nodes.push_back(node);
        }
    }
    return nodes;
}

} // namespace

ToeplitzData::ToeplitzData(const Surface& s, int order) : surface_(s), order_(order) {
    if (!s.is_sphere()) throw std::invalid_argument("holomorphic sections need the sphere");
    if (order < 2) throw std::invalid_argument("quadrature order too small");
    nodes_ = build_nodes(s, order);
    norm_.assign(std::size_t(dimension()), 1.0);
}

std::complex<double> ToeplitzData::phi(int j, const SurfacePoint& p) const {
    const int k = level();
    const std::complex<double> w(p.u, p.v);
    const double r2 = p.u * p.u + p.v * p.v;
    const int power = (p.chart == 0) ? j : k - j;
    std::complex<double> val(1.0, 0.0);
    for (int i = 0; i < power; ++i) val *= w;
    return norm_[std::size_t(j)] * val * std::pow(1.0 + r2, -0.5 * double(k));
}

OperatorMatrix ToeplitzData::gram(int order) const {
    ToeplitzData fine(surface_, order);
    fine.norm_ = norm_;
    const int d = dimension();
    OperatorMatrix g = OperatorMatrix::Zero(d, d);
    for (const auto& node : fine.nodes_) {
        for (int i = 0; i < d; ++i) {
            const std::complex<double> pi = fine.phi(i, node.point);
            for (int j = 0; j < d; ++j)
                g(i, j) += std::conj(pi) * fine.phi(j, node.point) * node.weight;
        }
    }
    return g;
}

ToeplitzData holomorphic_basis(const Surface& s, int quadrature_order) {
    if (quadrature_order <= 0) quadrature_order = s.level() + 12;
    ToeplitzData data(s, quadrature_order);
    const int d = data.dimension();
    // raw norms from the diagonal of the Gram matrix at the working order
    OperatorMatrix g0 = data.gram(quadrature_order);
    for (int j = 0; j < d; ++j) {
        const double nj = g0(j, j).real();
        if (!(nj > 0.0)) throw std::runtime_error("holomorphic basis: degenerate raw norm");
        data.norm_[std::size_t(j)] = 1.0 / std::sqrt(nj);
    }
    // verify against a doubled-order Gram
    const OperatorMatrix g2 = data.gram(2 * quadrature_order);
    double resid = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            resid = std::max(resid,
                             std::abs(g2(i, j) - ((i == j) ? std::complex<double>(1.0, 0.0)
                                                           : std::complex<double>(0.0, 0.0))));
    if (resid > 1e-10) {
        throw std::runtime_error(
            "under-resolved holomorphic quadrature (Gram residual " + std::to_string(resid) +
            "); suggest order >= " + std::to_string(s.level() + 12));
    }
    return data;
}

const OperatorMatrix& toeplitz_matrix(const ToeplitzData& data, const ScalarField& f) {
    const std::string key = "T:" + f.id();
    if (data.cached(key)) return data.cache_slot(key);
    const int d = data.dimension();
    OperatorMatrix t = OperatorMatrix::Zero(d, d);
    std::vector<std::complex<double>> phis(static_cast<std::size_t>(d));
    for (const auto& node : data.nodes()) {
        const double fv = f.eval(data.surface(), node.point);
        for (int i = 0; i < d; ++i) phis[std::size_t(i)] = data.phi(i, node.point);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                t(i, j) += std::conj(phis[std::size_t(i)]) * phis[std::size_t(j)] * fv *
                           node.weight;
    }
    data.cache_slot(key) = std::move(t);
    return data.cache_slot(key);
}

namespace {

// Transport matrix M(t)_{ij} = <e_i, U_t e_j> by per-node flow with the
// unitary-gauge connection term A(X_f) of the node's host chart.
OperatorMatrix transport_matrix(const ToeplitzData& data, const ScalarField& f, double t) {
    const Surface& s = data.surface();
    const int d = data.dimension();
    const double k = double(s.level());
    const FlowIntegrand phase_rate = [&](const Surface& srf, const SurfacePoint& q) {
        const Vec2 x = hamiltonian_vector(srf, f, q);
        const double r2 = q.u * q.u + q.v * q.v;
        const double a_of_x = (k / kTwoPi) * (q.u * x[1] - q.v * x[0]) / (1.0 + r2);
        return f.eval(srf, q) - a_of_x;
    };
    OperatorMatrix m = OperatorMatrix::Zero(d, d);
    std::vector<std::complex<double>> phis(static_cast<std::size_t>(d));
    const double dt = std::abs(t) / 8.0;
    for (const auto& node : data.nodes()) {
        double phase = 0.0;
        const SurfacePoint moved =
            flow_point_with_callback(s, f, phase_rate, node.point, t, dt, &phase);
        // moved stays in the host chart for the small steps used here
        const std::complex<double> transport = std::polar(1.0, kTwoPi * phase);
        for (int i = 0; i < d; ++i) phis[std::size_t(i)] = data.phi(i, node.point);
        for (int j = 0; j < d; ++j) {
            const std::complex<double> uj = transport * data.phi(j, moved);
            for (int i = 0; i < d; ++i)
                m(i, j) += std::conj(phis[std::size_t(i)]) * uj * node.weight;
        }
    }
    return m;
}

} // namespace

OperatorMatrix sk_operator_matrix(const ToeplitzData& data, const ScalarField& f) {
    if (f.torus_family()) throw std::invalid_argument("sphere operator from a torus field");
    if (f.max_degree() > 1)
        throw std::invalid_argument(
            "not quantizable: the flow of '" + f.id() +
            "' does not preserve the holomorphic sections (ambient degree > 1)");
    const std::string key = "Q:" + f.id();
    if (data.cached(key)) return data.cache_slot(key);
    const double h = data.flow_step;
    const OperatorMatrix m1 = transport_matrix(data, f, h);
    const OperatorMatrix m1m = transport_matrix(data, f, -h);
    const OperatorMatrix m2 = transport_matrix(data, f, 2.0 * h);
    const OperatorMatrix m2m = transport_matrix(data, f, -2.0 * h);
    OperatorMatrix q = (8.0 * (m1 - m1m) - (m2 - m2m)) / (12.0 * h);
    data.cache_slot(key) = std::move(q);
    return data.cache_slot(key);
}

double expectation_function(const ToeplitzData& data, const ScalarField& f,
                            const SectionVector& section) {
    if (section.size() != data.dimension())
        throw std::invalid_argument("section dimension mismatch");
    const double norm = section.norm();
    if (norm < 1e-14) throw std::invalid_argument("zero section");
    const SectionVector sv = section / norm;
    double acc = 0.0;
    const int d = data.dimension();
    for (const auto& node : data.nodes()) {
        std::complex<double> val(0.0, 0.0);
        for (int j = 0; j < d; ++j) val += sv(j) * data.phi(j, node.point);
        acc += f.eval(data.surface(), node.point) * std::norm(val) * node.weight;
    }
    return acc;
}

double expectation_gradient_residual(const ToeplitzData& data, const ScalarField& f,
                                     const SectionVector& section) {
    const double norm = section.norm();
    if (norm < 1e-14) throw std::invalid_argument("zero section");
    const SectionVector sv = section / norm;
    const OperatorMatrix& t = toeplitz_matrix(data, f);
    const SectionVector ts = t * sv;
    const std::complex<double> lambda = sv.dot(ts);
    return (ts - lambda * sv).norm();
}

SectionVector bpu_map(const ToeplitzData& data, const HalfWeightedCycle& hw) {
    const Surface& s = data.surface();
    if (!s.is_sphere() || !hw.cycle.surface().is_sphere() ||
        hw.cycle.surface().level() != s.level())
        throw std::invalid_argument("bpu_map: cycle and basis live on different surfaces");
    if (hw.cycle.chart() != 0)
        throw std::invalid_argument("bpu_map expects cycles hosted in chart 0");
    const auto hol = holonomy(s, hw.cycle);
    if (hol.bs_defect > 1e-6)
        throw std::invalid_argument(
            "bpu_map: flat section ill-defined (cycle is not Bohr-Sommerfeld)");
    const auto alpha = partial_actions(s, hw.cycle);
    const std::size_t n = hw.size();
    const int d = data.dimension();
    SectionVector c = SectionVector::Zero(d);
    for (std::size_t j = 0; j < n; ++j) {
        const SurfacePoint p = hw.cycle.point(j);
        const std::complex<double> flat = std::polar(1.0, kTwoPi * alpha[j]);
        const double theta = hw.sigma * std::sqrt(hw.mu[j]);
        for (int i = 0; i < d; ++i)
            c(i) += std::conj(data.phi(i, p)) * flat * theta / double(n);
    }
    return c;
}

double ray_angle(const SectionVector& a, const SectionVector& b) {
    const double na = a.norm(), nb = b.norm();
    if (na < 1e-300 || nb < 1e-300) throw std::invalid_argument("ray angle of a zero vector");
    double c = std::abs(a.dot(b)) / (na * nb);
    c = std::min(1.0, std::max(0.0, c));
    return std::acos(c);
}

double nearest_eigenray_angle(const OperatorMatrix& t, const SectionVector& v) {
    Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(t);
    double best = kPi;
    for (int l = 0; l < t.rows(); ++l) {
        const SectionVector e = es.eigenvectors().col(l);
        best = std::min(best, ray_angle(e, v));
    }
    return best;
}

std::vector<Prop4Row> prop4_distance(
    const ToeplitzData& data, const ScalarField& f,
    const std::vector<std::pair<HalfWeightedCycle, HalfWeightedCycle>>& points) {
    const OperatorMatrix& t = toeplitz_matrix(data, f);
    std::vector<Prop4Row> rows;
    int idx = 0;
    for (const auto& pm : points) {
        const SectionVector vp = bpu_map(data, pm.first);
        const SectionVector vm = bpu_map(data, pm.second);
        Prop4Row row;
        row.index = idx++;
        row.distance_plus = nearest_eigenray_angle(t, vp);
        row.distance_minus = nearest_eigenray_angle(t, vm);
        row.pair_ray_angle = ray_angle(vp, vm);
        rows.push_back(row);
    }
    return rows;
}

SectionVector random_unit_section(Rng& rng, int dimension) {
    SectionVector v(dimension);
    for (int j = 0; j < dimension; ++j)
        v(j) = std::complex<double>(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    const double n = v.norm();
    if (n < 1e-12) v(0) = 1.0;
    return v / v.norm();
}

std::string operator_to_json(const OperatorMatrix& m) {
    nlohmann::json j;
    j["basis"] = "z-rotation weights, increasing";
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    nlohmann::json entries = nlohmann::json::array();
    for (long r = 0; r < m.rows(); ++r)
        for (long c = 0; c < m.cols(); ++c)
            entries.push_back({m(r, c).real(), m(r, c).imag()});
    j["entries"] = std::move(entries);
    return j.dump();
}

OperatorMatrix operator_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const long rows = j.at("rows").get<long>(), cols = j.at("cols").get<long>();
    OperatorMatrix m(rows, cols);
    const auto& entries = j.at("entries");
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) {
            const auto& e = entries[std::size_t(r * cols + c)];
            m(r, c) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
        }
    return m;
}

std::string section_to_json(const SectionVector& v) {
    nlohmann::json j;
    j["basis"] = "z-rotation weights, increasing";
    nlohmann::json entries = nlohmann::json::array();
    for (long r = 0; r < v.size(); ++r) entries.push_back({v(r).real(), v(r).imag()});
    j["entries"] = std::move(entries);
    return j.dump();
}

SectionVector section_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const auto& entries = j.at("entries");
    SectionVector v(entries.size());
    for (std::size_t r = 0; r < entries.size(); ++r)
        v(long(r)) = std::complex<double>(entries[r][0].get<double>(), entries[r][1].get<double>());
    return v;
}

} // namespace bsq
