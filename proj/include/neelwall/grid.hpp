//==============================================================================
// grid.hpp
// Uniform periodic grid on [-L, L) and real-valued sampled fields.
// Nodes x_j = -L + j h with h = 2L/N; x = 0 sits at node N/2. Fourier bin k
// carries the frequency xi = pi*k'/L with k' the signed wrap of k.
// inner_product is the h-weighted rectangle rule, exact for periodic spectral
// quadrature of decaying fields.
//==============================================================================
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "neelwall/errors.hpp"

namespace neel {

class Grid {
public:
    Grid(double half_length, int n_points) : half_length_(half_length), n_(n_points) {
        if (!(half_length > 0.0)) throw InvalidParameter("grid half length must be positive");
        if (n_points < 4 || n_points % 2 != 0)
            throw InvalidParameter("grid size must be an even integer >= 4");
        spacing_ = 2.0 * half_length_ / n_;
    }

    double half_length() const { return half_length_; }
    int size() const { return n_; }
    double spacing() const { return spacing_; }

    double node(int j) const { return -half_length_ + spacing_ * j; }
    int center_index() const { return n_ / 2; }  // node at x = 0

    // Signed integer frequency of FFT bin k (k = 0..N-1).
    int wrap(int k) const { return k < n_ / 2 ? k : k - n_; }
    // Angular frequency xi_k = pi * wrap(k) / L of FFT bin k.
    double frequency(int k) const { return M_PI * wrap(k) / half_length_; }

    bool operator==(const Grid& other) const {
        return half_length_ == other.half_length_ && n_ == other.n_;
    }
    bool operator!=(const Grid& other) const { return !(*this == other); }

private:
    double half_length_;
    int n_;
    double spacing_;
};

class RealField {
public:
    explicit RealField(const Grid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

    RealField(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        if (static_cast<int>(values_.size()) != grid_.size())
            throw DimensionMismatch("field sample count does not match grid");
        for (double v : values_)
            if (!std::isfinite(v)) throw InvalidParameter("field contains non-finite samples");
    }

    const Grid& grid() const { return grid_; }
    int size() const { return grid_.size(); }

    double& operator[](std::size_t j) { return values_[j]; }
    double operator[](std::size_t j) const { return values_[j]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    const std::vector<double>& data() const { return values_; }

private:
    Grid grid_;
    std::vector<double> values_;
};

inline void require_same_grid(const RealField& u, const RealField& v) {
    if (u.grid() != v.grid()) throw DimensionMismatch("fields live on different grids");
}

// (u, v)_{L^2} by the h-weighted rectangle rule.
inline double inner_product(const RealField& u, const RealField& v) {
    require_same_grid(u, v);
    double s = 0.0;
    for (int j = 0; j < u.size(); ++j) s += u[j] * v[j];
    return u.grid().spacing() * s;
}

inline double norm(const RealField& u) { return std::sqrt(inner_product(u, u)); }

inline double max_abs(const RealField& u) {
    double m = 0.0;
    for (int j = 0; j < u.size(); ++j) m = std::max(m, std::abs(u[j]));
    return m;
}

} // namespace neel
