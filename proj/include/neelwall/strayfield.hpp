//==============================================================================
// strayfield.hpp
// Reduced stray-field symbol sigma_eps(xi) = 1 - (1-e^{-eps|xi|})/(eps|xi|)
// and the rescaled Fourier multiplier operator (1/eps) S_eps. Only the
// rescaled operator is exposed: every occurrence in the energy, the
// Euler-Lagrange equation and the linearizations carries the 1/eps factor,
// and folding it into the multiplier avoids cancellation for small eps|xi|.
//==============================================================================
#pragma once

#include <vector>

#include "neelwall/grid.hpp"
#include "neelwall/spectral.hpp"

namespace neel {

// sigma_eps(xi); continuous at xi = 0 with value 0. Uses the Taylor branch
// t/2 - t^2/6 + t^3/24 (t = eps|xi|) below t = 1e-4 where the direct formula
// loses all digits.
double symbol(double xi, double epsilon);

// sigma_eps(xi)/eps, computed on the same Taylor branch.
// Satisfies 0 <= rescaled_symbol(xi, eps) <= |xi|.
double rescaled_symbol(double xi, double epsilon);

class StrayFieldOperator {
public:
    StrayFieldOperator(const Grid& grid, double epsilon);

    const Grid& grid() const { return grid_; }
    double epsilon() const { return epsilon_; }

    // Cached multiplier values m_eps(xi_k) = sigma_eps(xi_k)/eps per FFT bin.
    const std::vector<double>& multiplier() const { return multiplier_; }
    double multiplier_max() const;

    // The |xi| kink of the rescaled symbol at xi = 0 makes the periodic
    // frequency sum a trapezoid rule across a corner; the leading
    // periodization error is a constant field (pi/(12 L)) * mean(u). apply()
    // compensates by acting with pi/(12 L) instead of 0 on the zero mode,
    // which restores the real-line operator to O((pi/L)^4). Dense assemblies
    // must use this effective table to stay consistent with apply().
    double zero_mode_value() const { return zero_mode_; }
    std::vector<double> effective_multiplier() const;

    // (1/eps) S_eps [u] on the operator's grid.
    RealField apply(const RealField& u) const;

    // (1/eps) S_eps applied to a field given by samples on the 2x refined
    // grid (dealiased route for nonlinear right-hand sides: evaluate the
    // nonlinearity on the refined grid, then apply the multiplier on the
    // retained modes). Returns a field on the coarse grid.
    RealField apply_refined(std::span<const double> fine_samples) const;

private:
    Grid grid_;
    double epsilon_;
    double zero_mode_;
    std::vector<double> multiplier_;
};

} // namespace neel
