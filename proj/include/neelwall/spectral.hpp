//==============================================================================
// spectral.hpp
// FFTW-backed periodic spectral machinery: forward/inverse transforms,
// differentiation multipliers, zero-padded refinement, Parseval sums.
// Transforms are cached per grid size and confined to one thread each
// (thread_local cache); plan creation is serialized behind a global mutex.
// Convention: unnormalized forward DFT  u_hat_k = sum_j u_j e^{-2 pi i jk/N},
// inverse divides by N. Bin k carries xi = pi*wrap(k)/L.
//==============================================================================
#pragma once

#include <complex>
#include <vector>

#include "neelwall/grid.hpp"

namespace neel::spectral {

using Complex = std::complex<double>;

// One forward + one inverse complex plan of a fixed size with owned buffers.
// Not thread-safe; obtain through transform_for() which hands out
// thread-confined instances.
class Transform {
public:
    explicit Transform(int n);
    ~Transform();
    Transform(const Transform&) = delete;
    Transform& operator=(const Transform&) = delete;

    int size() const { return n_; }

    // Real samples -> full complex spectrum (length N, unnormalized).
    void forward(std::span<const double> in, std::vector<Complex>& out);
    void forward(std::span<const Complex> in, std::vector<Complex>& out);
    // Complex spectrum -> real samples (applies the 1/N factor, drops the
    // imaginary part, which must be rounding-level for conjugate-even input).
    void inverse(std::span<const Complex> in, std::vector<double>& out);
    void inverse_complex(std::span<const Complex> in, std::vector<Complex>& out);

private:
    int n_;
    void* fwd_plan_;
    void* inv_plan_;
    Complex* buf_in_;
    Complex* buf_out_;
};

// Thread-local transform for size n (created on first use per thread).
Transform& transform_for(int n);

std::vector<Complex> forward(const RealField& u);
RealField inverse(const Grid& g, std::span<const Complex> spectrum);

// Spectral derivative (multiplier i*xi, Nyquist zeroed) and second derivative
// (multiplier -xi^2, Nyquist kept).
RealField derivative(const RealField& u);
RealField second_derivative(const RealField& u);

// Frequency-domain value of (u, v)_{L^2}: (2L/N^2) * sum_k u_hat conj(v_hat).
double parseval_inner_product(const RealField& u, const RealField& v);

// Zero-pad a length-N spectrum to length 2N (trigonometric interpolation;
// the Nyquist coefficient is split across +/- bins) and the adjoint
// truncation of a length-2N spectrum back to N bins.
std::vector<Complex> pad_spectrum(std::span<const Complex> spec);
std::vector<Complex> truncate_spectrum(std::span<const Complex> fine);

// Samples of a field on the 2x refined grid (trigonometric interpolation).
std::vector<double> refine_samples(const RealField& u);

} // namespace neel::spectral
