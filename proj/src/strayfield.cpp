#include "neelwall/strayfield.hpp"

#include <algorithm>
#include <cmath>

namespace neel {

namespace {
// (1 - (1-e^{-t})/t)/t  =  1/2 - t/6 + t^2/24 - ... for small t >= 0.
// The direct branch uses (t + expm1(-t))/t^2; below t = 1e-4 even that
// cancels too hard and the Taylor form takes over.
double sigma_over_t(double t) {
    if (t < 1e-4) return 0.5 - t / 6.0 + t * t / 24.0;
    return (t + std::expm1(-t)) / (t * t);
}
} // namespace

double symbol(double xi, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
    const double t = epsilon * std::abs(xi);
    return t * sigma_over_t(t);
}

double rescaled_symbol(double xi, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
    const double t = epsilon * std::abs(xi);
    return std::abs(xi) * sigma_over_t(t);
}

StrayFieldOperator::StrayFieldOperator(const Grid& grid, double epsilon)
    : grid_(grid), epsilon_(epsilon), zero_mode_(M_PI / (12.0 * grid.half_length())) {
    if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
    multiplier_.resize(grid_.size());
    for (int k = 0; k < grid_.size(); ++k)
        multiplier_[k] = rescaled_symbol(grid_.frequency(k), epsilon_);
}

double StrayFieldOperator::multiplier_max() const {
    return *std::max_element(multiplier_.begin(), multiplier_.end());
}

std::vector<double> StrayFieldOperator::effective_multiplier() const {
    std::vector<double> m = multiplier_;
    m[0] = zero_mode_;
    return m;
}

RealField StrayFieldOperator::apply(const RealField& u) const {
    if (u.grid() != grid_) throw DimensionMismatch("field grid does not match operator grid");
    auto spec = spectral::forward(u);
    spec[0] *= zero_mode_;  // cached table holds 0 here; see zero_mode_value()
    for (int k = 1; k < grid_.size(); ++k) spec[k] *= multiplier_[k];
    return spectral::inverse(grid_, spec);
}

RealField StrayFieldOperator::apply_refined(std::span<const double> fine_samples) const {
    const int n = grid_.size();
    if (static_cast<int>(fine_samples.size()) != 2 * n)
        throw DimensionMismatch("refined sample count must be twice the grid size");
    std::vector<spectral::Complex> fine;
    spectral::transform_for(2 * n).forward(fine_samples, fine);
    auto spec = spectral::truncate_spectrum(fine);
    spec[0] *= zero_mode_;
    for (int k = 1; k < n; ++k) spec[k] *= multiplier_[k];
    return spectral::inverse(grid_, spec);
}

} // namespace neel
