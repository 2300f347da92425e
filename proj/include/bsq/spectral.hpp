#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

// Periodic-grid numerics shared by the cycle machinery: trigonometric
// differentiation and resampling on uniform grids over [0,1), pairwise
// (deterministic) summation, Gauss-Legendre nodes, and a seed-stable RNG.

namespace bsq {

using cdouble = std::complex<double>;

// Pairwise summation; fixed reduction order, independent of thread count.
double pairwise_sum(std::span<const double> v);

// Discrete Fourier transform of real data (length N, any even N >= 2).
// Uses radix-2 FFT when N is a power of two, cached-table DFT otherwise.
std::vector<cdouble> dft_forward(std::span<const double> x);
std::vector<double> dft_inverse_real(std::span<const cdouble> c);

// Spectral derivative d/ds on the uniform periodic grid s_j = j/N.
// The Nyquist mode is dropped (standard for even N); the result has exact
// zero discrete mean.
std::vector<double> spectral_derivative(std::span<const double> x);

// Trigonometric interpolation from N to M samples (M >= N, both even).
std::vector<double> spectral_resample(std::span<const double> x, std::size_t m);

// Gauss-Legendre nodes/weights on [-1,1].
struct GaussLegendre {
    std::vector<double> node;
    std::vector<double> weight;
};
GaussLegendre gauss_legendre(int n);

// Small seed-stable RNG (splitmix64 core). std:: distributions are avoided
// so that identical seeds give identical streams everywhere reports are
// byte-compared.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform();                       // [0,1)
    double uniform(double lo, double hi);   // [lo,hi)
    // Derive an independent stream for a labelled sub-task.
    Rng fork(std::uint64_t label) const;

  private:
    std::uint64_t state_;
};

} // namespace bsq
