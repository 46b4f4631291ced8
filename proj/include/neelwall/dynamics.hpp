//==============================================================================
// dynamics.hpp
// Time-dependent problem in the decomposition theta = theta_wall + vartheta:
// the full nonlinear right-hand sides (R1, R2) of the rescaled LLG in
// spherical coordinates, the external field model h_ext = lambda h + gamma,
// and stiffly stable IMEX time stepping. The constant-coefficient leading
// block kappa (Delta, a Delta; -a Delta, Delta) is treated implicitly as a
// 2x2 solve per Fourier mode; everything else is explicit.
//==============================================================================
#pragma once

#include <vector>

#include "neelwall/energy.hpp"

namespace neel {

struct State {
    RealField phi;       // out-of-plane angle
    RealField vartheta;  // phase perturbation
    double time = 0.0;

    State(const Grid& g) : phi(g), vartheta(g) {}
    State(RealField p, RealField v, double t) : phi(std::move(p)), vartheta(std::move(v)), time(t) {
        require_same_grid(phi, vartheta);
    }
    const Grid& grid() const { return phi.grid(); }
};

enum class ForcingKind { zero, sine, cosine, tabulated, tabulated_space };

// T-periodic waveform h with the field h_ext(t) = lambda h(t) + gamma.
// h is either scalar (zero/sine/cosine/tabulated) or space-dependent
// (tabulated_space: sampled rows h(t_i, x_j), linear in t, wrapped mod T).
class ForcingModel {
public:
    ForcingModel() = default;  // zero forcing, period 1
    static ForcingModel zero(double period = 1.0);
    static ForcingModel sine(double period, double lambda, double gamma);
    static ForcingModel cosine(double period, double lambda, double gamma);
    // Samples (t_i, h_i) over one period, t ascending in [0, T], h(0) == h(T).
    static ForcingModel tabulated(double period, std::vector<double> t, std::vector<double> h,
                                  double lambda, double gamma);
    // Rows h(t_i, .) sampled on the grid's nodes; rows(0) == rows(T).
    static ForcingModel tabulated_space(double period, std::vector<double> t,
                                        std::vector<std::vector<double>> rows, double lambda,
                                        double gamma);

    ForcingKind kind() const { return kind_; }
    double period() const { return period_; }
    double lambda() const { return lambda_; }
    double gamma() const { return gamma_; }
    void set_lambda(double l) { lambda_ = l; }
    void set_gamma(double g) { gamma_ = g; }

    bool space_dependent() const { return kind_ == ForcingKind::tabulated_space; }
    int space_size() const {
        return space_dependent() ? static_cast<int>(rows_.front().size()) : 0;
    }

    double waveform(double t) const;  // scalar h(t)
    double scalar_at(double t) const { return lambda_ * waveform(t) + gamma_; }
    // lambda h(t, x_j) + gamma for space-dependent forcing
    void field_at(double t, std::vector<double>& out) const;

private:
    struct Bracket {
        std::size_t left;
        double weight;  // toward the right sample
    };
    Bracket bracket(double t) const;

    ForcingKind kind_ = ForcingKind::zero;
    double period_ = 1.0;
    double lambda_ = 0.0;
    double gamma_ = 0.0;
    std::vector<double> times_;
    std::vector<double> values_;
    std::vector<std::vector<double>> rows_;
};

enum class Scheme { imex_euler, imex_bdf2 };

struct IntegratorConfig {
    double dt = 5e-4;
    Scheme scheme = Scheme::imex_bdf2;
    double max_phi = M_PI / 4.0;  // validity bound for the spherical chart
    // Evaluate the stray-field arguments on the 2x refined grid. Off by
    // default: the plain-grid evaluation is the one whose linearization the
    // dense operator assemblies reproduce exactly, and at the working
    // resolutions the product aliasing sits at rounding level anyway.
    bool dealias = false;

    void validate() const {
        if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
        if (!(max_phi > 0.0)) throw InvalidParameter("max_phi must be positive");
    }
};

// Wall-dependent constants reused across right-hand side evaluations. Trig
// of theta = theta_wall + vartheta is always formed through the seam-
// consistent reference factors (see ReferenceTrig).
class DynamicsContext {
public:
    DynamicsContext(const WallProfile& wall);

    const Grid& grid() const { return grid_; }
    const RescaledParameters& params() const { return params_; }
    const WallProfile& wall() const { return wall_; }
    const StrayFieldOperator& stray() const { return stray_; }
    const RealField& theta_wall() const { return wall_.profile.theta(); }
    const RealField& theta_wall_prime() const { return wall_.derivative; }
    const RealField& theta_wall_second() const { return wall_.second_derivative; }

    const RealField& wall_decaying() const { return wall_w_; }
    const std::vector<double>& wall_decaying_refined() const { return wall_w_fine_; }
    const ReferenceTrig& trig() const { return trig_; }
    const ReferenceTrig& trig_refined() const { return trig_fine_; }

private:
    WallProfile wall_;
    Grid grid_;
    RescaledParameters params_;
    StrayFieldOperator stray_;
    RealField wall_w_;
    std::vector<double> wall_w_fine_;
    ReferenceTrig trig_;
    ReferenceTrig trig_fine_;
};

// (R1, R2) of (LLG) at the given state; h_ext evaluated at state.time.
// Throws ValidityExit when max|phi| exceeds max_phi.
std::pair<RealField, RealField> rhs(const DynamicsContext& ctx, const State& state,
                                    const ForcingModel& forcing, double max_phi = M_PI / 4.0,
                                    bool dealias = false);

// One IMEX step from state.time to state.time + dt. BDF2 needs the previous
// state's explicit term; pass nullptr for a startup Euler step.
class Stepper {
public:
    Stepper(const DynamicsContext& ctx, const IntegratorConfig& config,
            const ForcingModel& forcing);

    // Advances the internal state by one step and returns it.
    const State& advance();
    const State& state() const { return state_; }
    void reset(const State& initial);

private:
    const DynamicsContext& ctx_;
    IntegratorConfig config_;
    const ForcingModel& forcing_;
    State state_;
    bool have_history_ = false;
    std::vector<spectral::Complex> prev_explicit_;    // stacked spectra (phi; vartheta)
    std::vector<spectral::Complex> state_spec_;       // current state spectrum
    std::vector<spectral::Complex> prev_state_spec_;  // one step back (BDF2)

    std::vector<spectral::Complex> explicit_term(const State& s) const;
    void refresh_spectrum();
};

struct TrajectorySample {
    double time;
    RealField phi;
    RealField vartheta;
};

struct TrajectoryDiagnostics {
    std::vector<double> times;
    std::vector<double> max_phi;
    std::vector<double> energy_total;
    std::vector<double> kernel_drift;  // (vartheta, theta_wall')
    std::vector<double> state_norm;
};

struct Trajectory {
    std::vector<TrajectorySample> snapshots;
    TrajectoryDiagnostics diagnostics;
    bool validity_exit = false;
    double exit_time = 0.0;
};

// Fixed-step integration to t_final (a multiple of dt), recording
// n_snapshots evenly spaced states and per-step diagnostics every
// diagnostics_stride steps. A validity exit stops the run and marks the
// trajectory rather than throwing.
Trajectory evolve(const DynamicsContext& ctx, const State& initial, double t_final,
                  const ForcingModel& forcing, const IntegratorConfig& config,
                  int n_snapshots = 11, int diagnostics_stride = 20);

} // namespace neel
