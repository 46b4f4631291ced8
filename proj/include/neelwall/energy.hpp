//==============================================================================
// energy.hpp
// Rescaled wall energy, its Euler-Lagrange residual, and the static wall
// solver. The phase is decomposed as theta = theta_ref + w with
// theta_ref(x) = arcsin(tanh x) (exact limits +-pi/2) so that the unknown w
// decays and is spectrally representable; theta itself is never
// differentiated as a periodic function. The stray-field term of the
// residual is evaluated on the 2x refined grid (dealiased nonlinearity),
// matching the dynamic right-hand sides bit for bit at the stationary state.
//==============================================================================
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "neelwall/grid.hpp"
#include "neelwall/params.hpp"
#include "neelwall/strayfield.hpp"

namespace neel {

// Reference profile and its analytic derivatives.
double theta_ref(double x);          // arcsin(tanh x)
double theta_ref_prime(double x);    // sech x
double theta_ref_second(double x);   // -sech x tanh x

// Samples of cos(scale*theta_ref) and sin(scale*theta_ref) over n uniform
// nodes on [-L, L). For the wall convention the sine factor jumps between
// -+1 across the periodic seam; its seam sample is set to the interpolant
// midpoint 0 so that pointwise trig products stay parity-consistent. All
// trig of theta = scale*theta_ref + u must be formed through these factors
// (cos = cref cos u - sref sin u, sin = sref cos u + cref sin u) to keep the
// discrete right-hand sides and their assembled linearizations identical.
struct ReferenceTrig {
    std::vector<double> cref;
    std::vector<double> sref;

    ReferenceTrig(double half_length, int n_nodes, double scale);

    void evaluate(std::span<const double> u, std::span<double> cos_out,
                  std::span<double> sin_out) const;
};

class PhaseProfile {
public:
    // theta sampled on the grid; must satisfy -pi/2 <= theta <= pi/2. Wall
    // profiles approach -+pi/2 at the domain ends and are decomposed against
    // theta_ref; profiles decaying at the ends are kept whole. Anything in
    // between has no decaying spectral representation and is rejected.
    PhaseProfile(const Grid& grid, std::vector<double> theta);

    // theta = theta_ref (w = 0).
    static PhaseProfile reference(const Grid& grid);
    // theta = theta_ref + w for a decaying periodic part w.
    static PhaseProfile from_decaying_part(const RealField& w);

    const Grid& grid() const { return theta_.grid(); }
    const RealField& theta() const { return theta_; }
    // 1 when theta = theta_ref + w, 0 when theta itself decays.
    double reference_scale() const { return ref_scale_; }
    RealField decaying_part() const;  // w = theta - reference_scale * theta_ref

private:
    PhaseProfile(RealField theta, double ref_scale)
        : theta_(std::move(theta)), ref_scale_(ref_scale) {}
    RealField theta_;
    double ref_scale_ = 1.0;
};

struct EnergyTerms {
    double exchange = 0.0;    // kappa int |theta'|^2
    double anisotropy = 0.0;  // int cos^2 theta
    double stray = 0.0;       // (1/eps) int S_eps[cos theta] cos theta
    double total() const { return exchange + anisotropy + stray; }
};

EnergyTerms energy(const PhaseProfile& profile, const RescaledParameters& params);

// Left-hand side of  kappa theta'' + (1/2) sin(2 theta)
//                    + (1/eps) S_eps[cos theta] sin theta = 0
// sampled on the grid. The first variation of the energy in a decaying
// direction v equals -2 (el_residual, v).
RealField el_residual(const PhaseProfile& profile, const RescaledParameters& params);

struct SolverOptions {
    double grad_flow_tol = 1e-3;   // phase-1 exit on ||el_residual||
    double newton_tol = 1e-10;     // phase-2 target
    int max_grad_steps = 20000;
    int max_newton_steps = 30;
    int newton_polish_steps = 2;   // extra steps while the residual still drops
    double armijo = 1e-4;
    double tail_warning = 0.05;    // |cos theta| near the boundary above this
                                   // flags the domain as too small
};

struct WallProfile {
    PhaseProfile profile;          // converged theta
    RealField derivative;          // theta' = w' + sech x
    RealField second_derivative;   // theta'' = w'' - sech x tanh x
    RescaledParameters params;
    EnergyTerms energy;
    double el_residual_norm = 0.0;
    double tail_value = 0.0;       // max |cos theta| over |x| >= L/2
    int grad_flow_iterations = 0;
    int newton_iterations = 0;
    std::optional<std::string> warning;  // domain-too-small note

    const Grid& grid() const { return profile.grid(); }
};

// Two-phase solve: preconditioned descent with odd projection until
// ||el_residual|| < grad_flow_tol, then damped Newton with the dense
// linearized-operator Jacobian on the odd interior nodes. Centering
// theta(0) = 0 holds through odd symmetry.
WallProfile solve_wall(const RescaledParameters& params, const Grid& grid,
                       const SolverOptions& options = {});

// Odd part (u(x) - u(-x))/2 on the periodic grid; nodes x=0 and x=-L map
// to themselves and are zeroed.
RealField odd_projection(const RealField& u);

} // namespace neel
