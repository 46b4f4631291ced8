#include "neelwall/spectral.hpp"

#include <fftw3.h>

#include <memory>
#include <mutex>
#include <unordered_map>

namespace neel::spectral {

namespace {
std::mutex planner_mutex;  // FFTW's planner is not thread-safe
}

Transform::Transform(int n) : n_(n) {
    buf_in_ = reinterpret_cast<Complex*>(fftw_alloc_complex(n));
    buf_out_ = reinterpret_cast<Complex*>(fftw_alloc_complex(n));
    std::lock_guard<std::mutex> lock(planner_mutex);
    fwd_plan_ = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf_in_),
                                 reinterpret_cast<fftw_complex*>(buf_out_), FFTW_FORWARD,
                                 FFTW_ESTIMATE);
    inv_plan_ = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf_in_),
                                 reinterpret_cast<fftw_complex*>(buf_out_), FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
}

Transform::~Transform() {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inv_plan_));
    fftw_free(buf_in_);
    fftw_free(buf_out_);
}

void Transform::forward(std::span<const double> in, std::vector<Complex>& out) {
    for (int j = 0; j < n_; ++j) buf_in_[j] = Complex(in[j], 0.0);
    fftw_execute(static_cast<fftw_plan>(fwd_plan_));
    out.assign(buf_out_, buf_out_ + n_);
}

void Transform::forward(std::span<const Complex> in, std::vector<Complex>& out) {
    for (int j = 0; j < n_; ++j) buf_in_[j] = in[j];
    fftw_execute(static_cast<fftw_plan>(fwd_plan_));
    out.assign(buf_out_, buf_out_ + n_);
}

void Transform::inverse(std::span<const Complex> in, std::vector<double>& out) {
    for (int j = 0; j < n_; ++j) buf_in_[j] = in[j];
    fftw_execute(static_cast<fftw_plan>(inv_plan_));
    out.resize(n_);
    const double scale = 1.0 / n_;
    for (int j = 0; j < n_; ++j) out[j] = buf_out_[j].real() * scale;
}

void Transform::inverse_complex(std::span<const Complex> in, std::vector<Complex>& out) {
    for (int j = 0; j < n_; ++j) buf_in_[j] = in[j];
    fftw_execute(static_cast<fftw_plan>(inv_plan_));
    out.resize(n_);
    const double scale = 1.0 / n_;
    for (int j = 0; j < n_; ++j) out[j] = buf_out_[j] * scale;
}

Transform& transform_for(int n) {
    thread_local std::unordered_map<int, std::unique_ptr<Transform>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<Transform>(n)).first;
    return *it->second;
}

std::vector<Complex> forward(const RealField& u) {
    std::vector<Complex> spec;
    transform_for(u.size()).forward(u.values(), spec);
    return spec;
}

RealField inverse(const Grid& g, std::span<const Complex> spectrum) {
    std::vector<double> vals;
    transform_for(g.size()).inverse(spectrum, vals);
    return RealField(g, std::move(vals));
}

RealField derivative(const RealField& u) {
    const Grid& g = u.grid();
    auto spec = forward(u);
    const int n = g.size();
    for (int k = 0; k < n; ++k) {
        if (k == n / 2) {
            spec[k] = 0.0;  // odd multiplier has no consistent Nyquist value
        } else {
            spec[k] *= Complex(0.0, g.frequency(k));
        }
    }
    return inverse(g, spec);
}

RealField second_derivative(const RealField& u) {
    const Grid& g = u.grid();
    auto spec = forward(u);
    for (int k = 0; k < g.size(); ++k) {
        const double xi = g.frequency(k);
        spec[k] *= -xi * xi;
    }
    return inverse(g, spec);
}

double parseval_inner_product(const RealField& u, const RealField& v) {
    require_same_grid(u, v);
    auto su = forward(u);
    auto sv = forward(v);
    const int n = u.size();
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += (su[k] * std::conj(sv[k])).real();
    return acc * 2.0 * u.grid().half_length() / (static_cast<double>(n) * n);
}

std::vector<Complex> pad_spectrum(std::span<const Complex> spec) {
    const int n = static_cast<int>(spec.size());
    const int m = 2 * n;
    std::vector<Complex> fine(m, Complex(0.0, 0.0));
    // scale by 2 so that the inverse transform's 1/(2N) reproduces samples
    for (int k = 0; k < n / 2; ++k) fine[k] = 2.0 * spec[k];
    for (int k = n / 2 + 1; k < n; ++k) fine[m - n + k] = 2.0 * spec[k];
    fine[n / 2] = spec[n / 2];          // split Nyquist cosine
    fine[m - n / 2] = spec[n / 2];
    return fine;
}

std::vector<Complex> truncate_spectrum(std::span<const Complex> fine) {
    const int m = static_cast<int>(fine.size());
    const int n = m / 2;
    std::vector<Complex> spec(n);
    for (int k = 0; k < n / 2; ++k) spec[k] = 0.5 * fine[k];
    for (int k = n / 2 + 1; k < n; ++k) spec[k] = 0.5 * fine[m - n + k];
    spec[n / 2] = 0.5 * (fine[n / 2] + fine[m - n / 2]);
    return spec;
}

std::vector<double> refine_samples(const RealField& u) {
    auto fine = pad_spectrum(forward(u));
    std::vector<double> vals;
    transform_for(2 * u.size()).inverse(fine, vals);
    return vals;
}

} // namespace neel::spectral
