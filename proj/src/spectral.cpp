#include "bsq/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace bsq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey, decimation in time.
void fft_pow2(std::vector<cdouble>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? kTwoPi : -kTwoPi) / double(len);
        const cdouble wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cdouble w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cdouble u = a[i + j];
                cdouble v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Cached twiddle table for non-power-of-two sizes (O(N^2) transform).
const std::vector<cdouble>& twiddle_table(std::size_t n) {
    static std::map<std::size_t, std::vector<cdouble>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cdouble> t(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double ang = -kTwoPi * double(j) / double(n);
        t[j] = cdouble(std::cos(ang), std::sin(ang));
    }
    return cache.emplace(n, std::move(t)).first->second;
}

std::vector<cdouble> dft_generic(std::span<const cdouble> x, bool inverse) {
    const std::size_t n = x.size();
    const auto& tw = twiddle_table(n);
    std::vector<cdouble> out(n);
    for (std::size_t m = 0; m < n; ++m) {
        cdouble acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t idx = (m * j) % n;
            cdouble w = tw[idx];
            if (inverse) w = std::conj(w);
            acc += x[j] * w;
        }
        out[m] = acc;
    }
    return out;
}

} // namespace

double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

std::vector<cdouble> dft_forward(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<cdouble> a(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = cdouble(x[j], 0.0);
    if (is_pow2(n)) {
        fft_pow2(a, false);
        return a;
    }
    return dft_generic(a, false);
}

std::vector<double> dft_inverse_real(std::span<const cdouble> c) {
    const std::size_t n = c.size();
    std::vector<cdouble> a(c.begin(), c.end());
    if (is_pow2(n)) {
        fft_pow2(a, true);
    } else {
        a = dft_generic(a, true);
    }
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = a[j].real() / double(n);
    return out;
}

std::vector<double> spectral_derivative(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("spectral_derivative: need even N >= 2");
    auto c = dft_forward(x);
    std::vector<cdouble> d(n);
    d[0] = cdouble(0.0, 0.0);
    for (std::size_t m = 1; m < n / 2; ++m) {
        const cdouble im(0.0, kTwoPi * double(m));
        d[m] = im * c[m];
        d[n - m] = -im * c[n - m];
    }
    d[n / 2] = cdouble(0.0, 0.0); // drop the Nyquist mode
    return dft_inverse_real(d);
}

std::vector<double> spectral_resample(std::span<const double> x, std::size_t m) {
    const std::size_t n = x.size();
    if (m < n || n % 2 != 0 || m % 2 != 0)
        throw std::invalid_argument("spectral_resample: need even M >= N");
    if (m == n) return std::vector<double>(x.begin(), x.end());
    auto c = dft_forward(x);
    std::vector<cdouble> cz(m, cdouble(0.0, 0.0));
    for (std::size_t k = 0; k < n / 2; ++k) cz[k] = c[k];
    for (std::size_t k = 1; k < n / 2; ++k) cz[m - k] = c[n - k];
    // split the Nyquist coefficient symmetrically
    cz[n / 2] = 0.5 * c[n / 2];
    cz[m - n / 2] = 0.5 * std::conj(c[n / 2]);
    auto y = dft_inverse_real(cz);
    const double scale = double(m) / double(n);
    for (double& v : y) v *= scale;
    return y;
}

GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
    GaussLegendre g;
    g.node.resize(n);
    g.weight.resize(n);
    // Newton iteration on P_n, Chebyshev initial guesses.
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        g.node[i] = x;
        g.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return g;
}

std::uint64_t Rng::next_u64() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

Rng Rng::fork(std::uint64_t label) const {
    Rng r(state_ ^ (0xa0761d6478bd642fULL * (label + 1)));
    r.next_u64();
    return r;
}

} // namespace bsq
