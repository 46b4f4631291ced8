//==============================================================================
// support.hpp
// Shared test utilities: platform-stable RNG, smooth random decaying fields,
// adaptive Simpson quadrature for oracle integrals.
//==============================================================================
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "neelwall/grid.hpp"
#include "neelwall/spectral.hpp"

namespace testsupport {

// Uniform in [-1, 1), independent of libstdc++ distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return 2.0 * ((engine_() >> 11) * 0x1.0p-53) - 1.0; }

private:
    std::mt19937_64 engine_;
};

// Smooth decaying random field: a few low Fourier modes tapered by a
// Gaussian envelope narrow enough that the samples vanish to rounding at
// the domain ends (seam leakage would pollute spectral identities).
inline neel::RealField random_smooth_field(const neel::Grid& g, Rng& rng, int modes = 12,
                                           double envelope_fraction = 0.12) {
    neel::RealField out(g);
    const double L = g.half_length();
    const double w = envelope_fraction * L;
    std::vector<double> a(modes), b(modes);
    for (int m = 0; m < modes; ++m) {
        a[m] = rng.uniform();
        b[m] = rng.uniform();
    }
    for (int j = 0; j < g.size(); ++j) {
        const double x = g.node(j);
        double v = 0.0;
        for (int m = 0; m < modes; ++m)
            v += a[m] * std::cos((m + 1) * M_PI * x / L) + b[m] * std::sin((m + 1) * M_PI * x / L);
        out[j] = v * std::exp(-(x * x) / (2.0 * w * w));
    }
    return out;
}

// Adaptive Simpson quadrature over an initial uniform subdivision (the
// pre-split keeps narrow features from slipping between probe points).
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 24, int presplit = 16) {
    struct Impl {
        const std::function<double(double)>& f;
        double run(double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return run(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   run(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    } impl{f};
    double total = 0.0;
    const double panel = (b - a) / presplit;
    for (int p = 0; p < presplit; ++p) {
        const double lo = a + p * panel, hi = lo + panel;
        const double m = 0.5 * (lo + hi);
        const double fa = f(lo), fm = f(m), fb = f(hi);
        const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        total += impl.run(lo, hi, fa, fm, fb, whole, tol / presplit, depth);
    }
    return total;
}

inline double rel_error(double got, double expected) {
    return std::abs(got - expected) / std::max(1e-300, std::abs(expected));
}

} // namespace testsupport
