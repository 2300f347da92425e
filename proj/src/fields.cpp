#include "bsq/fields.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bsq {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPi = std::numbers::pi;
constexpr double kCoeffEps = 1e-15;
} // namespace

// ---------------------------------------------------------------------------
// TorusTrigPoly

void TorusTrigPoly::add_mode(int m, int n, double ccos, double csin) {
    if (m == 0 && n == 0) {
        constant += ccos;
        return;
    }
    if (m < 0 || (m == 0 && n < 0)) {
        m = -m;
        n = -n;
        csin = -csin;
    }
    auto& e = modes[{m, n}];
    e.first += ccos;
    e.second += csin;
    if (std::abs(e.first) < kCoeffEps && std::abs(e.second) < kCoeffEps) modes.erase({m, n});
}

double TorusTrigPoly::eval(double x, double y) const {
    double s = constant;
    for (const auto& [mn, ab] : modes) {
        const double ph = kTwoPi * (mn.first * x + mn.second * y);
        s += ab.first * std::cos(ph) + ab.second * std::sin(ph);
    }
    return s;
}

Vec2 TorusTrigPoly::grad(double x, double y) const {
    double gx = 0.0, gy = 0.0;
    for (const auto& [mn, ab] : modes) {
        const double ph = kTwoPi * (mn.first * x + mn.second * y);
        const double d = -ab.first * std::sin(ph) + ab.second * std::cos(ph);
        gx += kTwoPi * mn.first * d;
        gy += kTwoPi * mn.second * d;
    }
    return Vec2{gx, gy};
}

TorusTrigPoly TorusTrigPoly::partial(int axis) const {
    TorusTrigPoly out;
    for (const auto& [mn, ab] : modes) {
        const double w = kTwoPi * (axis == 0 ? mn.first : mn.second);
        // d/dx [a cos + b sin] = w b cos - w a sin
        out.add_mode(mn.first, mn.second, w * ab.second, -w * ab.first);
    }
    return out;
}

int TorusTrigPoly::max_degree() const {
    int d = 0;
    for (const auto& [mn, ab] : modes)
        d = std::max({d, std::abs(mn.first), std::abs(mn.second)});
    return d;
}

TorusTrigPoly trig_sum(const TorusTrigPoly& a, const TorusTrigPoly& b, double sb) {
    TorusTrigPoly out = a;
    out.constant += sb * b.constant;
    for (const auto& [mn, ab] : b.modes)
        out.add_mode(mn.first, mn.second, sb * ab.first, sb * ab.second);
    return out;
}

TorusTrigPoly trig_product(const TorusTrigPoly& a, const TorusTrigPoly& b) {
    TorusTrigPoly out;
    out.constant = a.constant * b.constant;
    for (const auto& [mn, ab] : b.modes)
        out.add_mode(mn.first, mn.second, a.constant * ab.first, a.constant * ab.second);
    for (const auto& [mn, ab] : a.modes)
        out.add_mode(mn.first, mn.second, b.constant * ab.first, b.constant * ab.second);
    for (const auto& [mn1, ab1] : a.modes) {
        for (const auto& [mn2, ab2] : b.modes) {
            const int mp = mn1.first + mn2.first, np = mn1.second + mn2.second;
            const int mm = mn1.first - mn2.first, nm = mn1.second - mn2.second;
            const double a1 = ab1.first, b1 = ab1.second;
            const double a2 = ab2.first, b2 = ab2.second;
            // cosA cosB = (cos(A-B) + cos(A+B))/2
            out.add_mode(mm, nm, 0.5 * a1 * a2, 0.0);
            out.add_mode(mp, np, 0.5 * a1 * a2, 0.0);
            // sinA sinB = (cos(A-B) - cos(A+B))/2
            out.add_mode(mm, nm, 0.5 * b1 * b2, 0.0);
            out.add_mode(mp, np, -0.5 * b1 * b2, 0.0);
            // sinA cosB = (sin(A+B) + sin(A-B))/2
            out.add_mode(mp, np, 0.0, 0.5 * b1 * a2);
            out.add_mode(mm, nm, 0.0, 0.5 * b1 * a2);
            // cosA sinB = (sin(A+B) - sin(A-B))/2
            out.add_mode(mp, np, 0.0, 0.5 * a1 * b2);
            out.add_mode(mm, nm, 0.0, -0.5 * a1 * b2);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// SpherePoly

void SpherePoly::add(std::array<int, 3> e, double c) {
    auto& v = mono[e];
    v += c;
    if (std::abs(v) < kCoeffEps) mono.erase(e);
}

double SpherePoly::eval(const Vec3& p) const {
    double s = 0.0;
    for (const auto& [e, c] : mono) {
        double t = c;
        for (int i = 0; i < e[0]; ++i) t *= p[0];
        for (int i = 0; i < e[1]; ++i) t *= p[1];
        for (int i = 0; i < e[2]; ++i) t *= p[2];
        s += t;
    }
    return s;
}

Vec3 SpherePoly::grad_ambient(const Vec3& p) const {
    Vec3 g{0.0, 0.0, 0.0};
    for (int axis = 0; axis < 3; ++axis) g[axis] = partial(axis).eval(p);
    return g;
}

SpherePoly SpherePoly::partial(int axis) const {
    SpherePoly out;
    for (const auto& [e, c] : mono) {
        if (e[axis] == 0) continue;
        std::array<int, 3> d = e;
        d[axis] -= 1;
        out.add(d, c * e[axis]);
    }
    return out;
}

int SpherePoly::max_degree() const {
    int d = 0;
    for (const auto& [e, c] : mono) d = std::max(d, e[0] + e[1] + e[2]);
    return d;
}

SpherePoly poly_sum(const SpherePoly& a, const SpherePoly& b, double sb) {
    SpherePoly out = a;
    for (const auto& [e, c] : b.mono) out.add(e, sb * c);
    return out;
}

SpherePoly poly_product(const SpherePoly& a, const SpherePoly& b) {
    SpherePoly out;
    for (const auto& [ea, ca] : a.mono)
        for (const auto& [eb, cb] : b.mono)
            out.add({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
    return out;
}

// ---------------------------------------------------------------------------
// ScalarField

double ScalarField::eval(const Surface& s, const SurfacePoint& p) const {
    return eval_coords(s, p.chart, p.u, p.v);
}

double ScalarField::eval_coords(const Surface& s, int chart, double u, double v) const {
    if (const auto* t = std::get_if<TorusTrigPoly>(&impl_)) {
        if (!s.is_torus()) throw std::invalid_argument("torus field on sphere");
        return t->eval(u, v);
    }
    if (const auto* l = std::get_if<TorusLinear>(&impl_)) {
        if (!s.is_torus()) throw std::invalid_argument("torus field on sphere");
        return l->cx * u + l->cy * v + l->c0;
    }
    const auto& sp = std::get<SpherePoly>(impl_);
    if (!s.is_sphere()) throw std::invalid_argument("sphere field on torus");
    return sp.eval(s.ambient(SurfacePoint{chart, u, v}));
}

Vec2 ScalarField::chart_gradient(const Surface& s, const SurfacePoint& p) const {
    if (const auto* t = std::get_if<TorusTrigPoly>(&impl_)) return t->grad(p.u, p.v);
    if (const auto* l = std::get_if<TorusLinear>(&impl_)) return Vec2{l->cx, l->cy};
    const auto& sp = std::get<SpherePoly>(impl_);
    const Vec3 g = sp.grad_ambient(s.ambient(p));
    const auto J = s.ambient_jacobian(p);
    return Vec2{J[0][0] * g[0] + J[0][1] * g[1] + J[0][2] * g[2],
                J[1][0] * g[0] + J[1][1] * g[1] + J[1][2] * g[2]};
}

ScalarField ScalarField::operator+(const ScalarField& o) const {
    if (const auto* a = std::get_if<TorusTrigPoly>(&impl_)) {
        const auto* b = std::get_if<TorusTrigPoly>(&o.impl_);
        if (!b) throw std::invalid_argument("field family mismatch in sum");
        return ScalarField(trig_sum(*a, *b));
    }
    if (const auto* a = std::get_if<SpherePoly>(&impl_)) {
        const auto* b = std::get_if<SpherePoly>(&o.impl_);
        if (!b) throw std::invalid_argument("field family mismatch in sum");
        return ScalarField(poly_sum(*a, *b));
    }
    throw std::invalid_argument("sum not supported for linear torus fields");
}

ScalarField ScalarField::operator-(const ScalarField& o) const { return *this + o.scaled(-1.0); }

ScalarField ScalarField::scaled(double c) const {
    if (const auto* a = std::get_if<TorusTrigPoly>(&impl_)) {
        TorusTrigPoly out;
        return ScalarField(trig_sum(out, *a, c));
    }
    if (const auto* a = std::get_if<SpherePoly>(&impl_)) {
        SpherePoly out;
        return ScalarField(poly_sum(out, *a, c));
    }
    const auto& l = std::get<TorusLinear>(impl_);
    return ScalarField(TorusLinear{c * l.cx, c * l.cy, c * l.c0});
}

int ScalarField::max_degree() const {
    if (const auto* a = std::get_if<TorusTrigPoly>(&impl_)) return a->max_degree();
    if (const auto* a = std::get_if<SpherePoly>(&impl_)) return a->max_degree();
    const auto& l = std::get<TorusLinear>(impl_);
    return (l.cx != 0.0 || l.cy != 0.0) ? 1 : 0;
}

bool ScalarField::is_constant() const {
    if (const auto* a = std::get_if<TorusTrigPoly>(&impl_)) return a->modes.empty();
    if (const auto* a = std::get_if<SpherePoly>(&impl_)) {
        for (const auto& [e, c] : a->mono)
            if (e[0] + e[1] + e[2] > 0) return false;
        return true;
    }
    const auto& l = std::get<TorusLinear>(impl_);
    return l.cx == 0.0 && l.cy == 0.0;
}

std::string ScalarField::id() const {
    std::ostringstream os;
    os.precision(17);
    if (const auto* a = std::get_if<TorusTrigPoly>(&impl_)) {
        os << "trig:" << a->constant;
        for (const auto& [mn, ab] : a->modes)
            os << ";" << mn.first << "," << mn.second << "," << ab.first << "," << ab.second;
    } else if (const auto* l = std::get_if<TorusLinear>(&impl_)) {
        os << "lin:" << l->cx << "," << l->cy << "," << l->c0;
    } else {
        const auto& sp = std::get<SpherePoly>(impl_);
        os << "poly:";
        for (const auto& [e, c] : sp.mono)
            os << e[0] << e[1] << e[2] << "," << c << ";";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Bracket and Hamiltonian field.
//
// Frozen conventions (asserted by the calibration tests):
//   omega = rho du dv per oriented chart, rho > 0;
//   X_f has chart components ( -f_v / rho, +f_u / rho ), i.e. omega(. , X_f) = df;
//   {f,g} = omega(X_f, X_g) = (f_u g_v - f_v g_u) / rho.
// This bundle makes the moduli bracket identity carry the factor +2 tau and
// the prequantum commutator close without sign corrections.

Vec2 hamiltonian_vector(const Surface& s, const ScalarField& f, const SurfacePoint& p) {
    const Vec2 g = f.chart_gradient(s, p);
    const double rho = s.density(p);
    return Vec2{-g[1] / rho, g[0] / rho};
}

ScalarField poisson_bracket(const Surface& s, const ScalarField& f, const ScalarField& g) {
    if (s.is_torus()) {
        auto part = [](const ScalarField& h, int axis) -> TorusTrigPoly {
            if (const auto* t = std::get_if<TorusTrigPoly>(&h.impl())) return t->partial(axis);
            if (const auto* l = std::get_if<TorusLinear>(&h.impl())) {
                TorusTrigPoly c;
                c.constant = (axis == 0) ? l->cx : l->cy;
                return c;
            }
            throw std::invalid_argument("sphere field in torus bracket");
        };
        const TorusTrigPoly fx = part(f, 0), fy = part(f, 1);
        const TorusTrigPoly gx = part(g, 0), gy = part(g, 1);
        TorusTrigPoly out =
            trig_sum(trig_product(fx, gy), trig_product(fy, gx), -1.0);
        TorusTrigPoly scaled;
        return ScalarField(trig_sum(scaled, out, 1.0 / double(s.level())));
    }
    const auto* fp = std::get_if<SpherePoly>(&f.impl());
    const auto* gp = std::get_if<SpherePoly>(&g.impl());
    if (!fp || !gp) throw std::invalid_argument("torus field in sphere bracket");
    // {F,G} = lambda * (x,y,z) . (grad F x grad G), lambda = -4 pi / k;
    // the constant is pinned by the chart formula at one point and the
    // rotational invariance of both sides.
    const double lambda = -4.0 * kPi / double(s.level());
    SpherePoly out;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, l = (i + 2) % 3;
        SpherePoly cross =
            poly_sum(poly_product(fp->partial(j), gp->partial(l)),
                     poly_product(fp->partial(l), gp->partial(j)), -1.0);
        SpherePoly coord;
        coord.add({i == 0 ? 1 : 0, i == 1 ? 1 : 0, i == 2 ? 1 : 0}, lambda);
        out = poly_sum(out, poly_product(coord, cross));
    }
    return ScalarField(out);
}

// ---------------------------------------------------------------------------
// Factories

ScalarField constant_field(const Surface& s, double value) {
    if (s.is_torus()) {
        TorusTrigPoly t;
        t.constant = value;
        return ScalarField(t);
    }
    SpherePoly p;
    p.add({0, 0, 0}, value);
    return ScalarField(p);
}

ScalarField torus_harmonic(int m, int n, double ccos, double csin) {
    TorusTrigPoly t;
    t.add_mode(m, n, ccos, csin);
    return ScalarField(t);
}

ScalarField torus_linear(double cx, double cy, double c0) {
    return ScalarField(TorusLinear{cx, cy, c0});
}

ScalarField sphere_linear(double c0, double cx, double cy, double cz) {
    SpherePoly p;
    if (c0 != 0.0) p.add({0, 0, 0}, c0);
    if (cx != 0.0) p.add({1, 0, 0}, cx);
    if (cy != 0.0) p.add({0, 1, 0}, cy);
    if (cz != 0.0) p.add({0, 0, 1}, cz);
    return ScalarField(p);
}

ScalarField sphere_coordinate(int axis) {
    SpherePoly p;
    std::array<int, 3> e{0, 0, 0};
    e[axis] = 1;
    p.add(e, 1.0);
    return ScalarField(p);
}

ScalarField sphere_north_divisor_density(int k) {
    // ((1-z)/2)^k expanded in z
    SpherePoly p;
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
        // coefficient of z^j in ((1-z)/2)^k
        p.add({0, 0, j}, binom * std::pow(-1.0, j) / std::pow(2.0, k));
        binom = binom * double(k - j) / double(j + 1);
    }
    return ScalarField(p);
}

ScalarField random_torus_trig(Rng& rng, int max_degree, double amplitude) {
    TorusTrigPoly t;
    for (int m = 0; m <= max_degree; ++m)
        for (int n = (m == 0 ? 1 : -max_degree); n <= max_degree; ++n)
            t.add_mode(m, n, amplitude * rng.uniform(-1.0, 1.0),
                       amplitude * rng.uniform(-1.0, 1.0));
    return ScalarField(t);
}

ScalarField random_sphere_poly(Rng& rng, int max_degree, double amplitude) {
    SpherePoly p;
    for (int a = 0; a <= max_degree; ++a)
        for (int b = 0; a + b <= max_degree; ++b)
            for (int c = 0; a + b + c <= max_degree; ++c)
                if (a + b + c > 0)
                    p.add({a, b, c}, amplitude * rng.uniform(-1.0, 1.0));
    return ScalarField(p);
}

} // namespace bsq
