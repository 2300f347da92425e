#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bsq/spectral.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace bsq;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> sample(double (*f)(double), std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = f(double(j) / double(n));
    return v;
}
} // namespace

TEST_CASE("spectral derivative is exact on resolved trig polynomials") {
    const std::size_t n = 64;
    auto f = sample([](double s) { return std::sin(kTwoPi * 3 * s) + 0.5 * std::cos(kTwoPi * s); },
                    n);
    const auto d = spectral_derivative(f);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = double(j) / double(n);
        const double exact =
            kTwoPi * 3 * std::cos(kTwoPi * 3 * s) - 0.5 * kTwoPi * std::sin(kTwoPi * s);
        CHECK(d[j] == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("spectral derivative matches central differences on smooth data") {
    const std::size_t n = 128;
    std::vector<double> f(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = double(j) / double(n);
        f[j] = std::exp(std::sin(kTwoPi * s));
    }
    const auto d = spectral_derivative(f);
    // oracle: 4th-order central differences on the same grid
    const double h = 1.0 / double(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double fm2 = f[(j + n - 2) % n], fm1 = f[(j + n - 1) % n];
        const double fp1 = f[(j + 1) % n], fp2 = f[(j + 2) % n];
        const double cd = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h);
        CHECK(std::abs(d[j] - cd) < 1e-4); // oracle truncation dominates
    }
}

TEST_CASE("spectral derivative has exactly zero discrete mean") {
    const std::size_t n = 96; // not a power of two: exercises the DFT path
    std::vector<double> f(n);
    Rng rng(7);
    for (auto& v : f) v = rng.uniform(-1.0, 1.0);
    const auto d = spectral_derivative(f);
    double mean = 0.0;
    for (double v : d) mean += v;
    CHECK(std::abs(mean / double(n)) < 1e-13);
}

TEST_CASE("antisymmetry of the derivative under the plain inner product") {
    const std::size_t n = 64;
    Rng rng(3);
    std::vector<double> a(n), b(n);
    for (std::size_t j = 0; j < n; ++j) {
        a[j] = rng.uniform(-1.0, 1.0);
        b[j] = rng.uniform(-1.0, 1.0);
    }
    const auto da = spectral_derivative(a);
    const auto db = spectral_derivative(b);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        s1 += da[j] * b[j];
        s2 += a[j] * db[j];
    }
    CHECK(std::abs(s1 + s2) < 1e-10);
}

TEST_CASE("resampling doubles a trig polynomial exactly") {
    const std::size_t n = 32;
    auto f = sample([](double s) { return std::cos(kTwoPi * 5 * s) - 2.0 * std::sin(kTwoPi * s); },
                    n);
    const auto g = spectral_resample(f, 2 * n);
    for (std::size_t j = 0; j < 2 * n; ++j) {
        const double s = double(j) / double(2 * n);
        const double exact = std::cos(kTwoPi * 5 * s) - 2.0 * std::sin(kTwoPi * s);
        CHECK(g[j] == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    const auto gl = gauss_legendre(8);
    // degree 15 monomials
    for (int p = 0; p <= 15; ++p) {
        double q = 0.0;
        for (std::size_t i = 0; i < gl.node.size(); ++i)
            q += gl.weight[i] * std::pow(gl.node[i], p);
        const double exact = (p % 2 == 1) ? 0.0 : 2.0 / double(p + 1);
        CHECK(std::abs(q - exact) < 1e-13);
    }
}

TEST_CASE("pairwise sum agrees with long double accumulation") {
    Rng rng(11);
    std::vector<double> v(1000);
    long double acc = 0.0L;
    for (auto& x : v) {
        x = rng.uniform(-1.0, 1.0) * 1e6;
        acc += x;
    }
    CHECK(std::abs(pairwise_sum(v) - double(acc)) < 1e-4);
}

TEST_CASE("rng streams are reproducible and fork-independent") {
    Rng a(42), b(42);
    for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(42);
    Rng f1 = c.fork(1), f2 = c.fork(2);
    CHECK(f1.next_u64() != f2.next_u64());
    const double u = Rng(9).uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
}
