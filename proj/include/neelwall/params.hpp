//==============================================================================
// params.hpp
// Physical film parameters and their dimensionless reduction.
// Rescaling x -> (delta/Q) x turns (d, delta, Q, alpha) into
// (kappa, epsilon, alpha) with kappa = delta^-2 d^2 Q and epsilon = Q.
//==============================================================================
#pragma once

#include "neelwall/errors.hpp"

namespace neel {

struct PhysicalParameters {
    double d = 1.0;      // exchange length
    double delta = 1.0;  // film thickness
    double Q = 0.1;      // quality factor
    double alpha = 0.5;  // gyromagnetic coefficient

    void validate() const {
        if (!(d > 0.0)) throw InvalidParameter("exchange length d must be positive");
        if (!(delta > 0.0)) throw InvalidParameter("film thickness delta must be positive");
        if (!(Q > 0.0)) throw InvalidParameter("quality factor Q must be positive");
    }
};

struct RescaledParameters {
    double kappa = 1.0;
    double epsilon = 0.1;
    double alpha = 0.5;

    void validate() const {
        if (!(kappa > 1e-6)) throw InvalidParameter("kappa must exceed 1e-6");
        if (!(epsilon > 1e-6)) throw InvalidParameter("epsilon must exceed 1e-6");
    }
};

inline RescaledParameters rescale(const PhysicalParameters& p) {
    p.validate();
    return RescaledParameters{p.d * p.d * p.Q / (p.delta * p.delta), p.Q, p.alpha};
}

} // namespace neel
