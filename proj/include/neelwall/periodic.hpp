//==============================================================================
// periodic.hpp
// T-periodic wall motions as fixed points of the time-T map. The square root
// system pairs the 2N periodicity equations with the pinning equation
// vartheta_0(0) = 0 and balances them with the state unknowns plus the
// compatibility field offset gamma. Newton uses a frozen origin Jacobian:
// a dense exp(T L0) block on the low Fourier modes (coarse subsampled wall)
// combined with per-mode 2x2 exponentials of the asymptotic symbol on the
// high modes; the gamma column is the variation-of-constants integral.
// Residuals are always evaluated at full resolution.
//==============================================================================
#pragma once

#include "neelwall/dynamics.hpp"
#include "neelwall/linops.hpp"

namespace neel {

enum class JacobianStrategy {
    semigroup,          // matrix exponential of the coarse-assembled L0
    finite_difference,  // central differences of the coarse time-T map
};

struct NewtonOptions {
    double tol = 1e-8;        // residual target
    double step_tol = 1e-9;   // step-size part of the convergence test
    int max_iterations = 60;
    int max_halvings = 8;
    double fd_step = 1e-5;    // finite-difference scale (x (1 + ||unknown||))
    int coarse_modes = 512;   // dense block holds modes |k| < coarse_modes/2
    JacobianStrategy strategy = JacobianStrategy::semigroup;
    bool monodromy_radius = false;  // optional spectral-radius diagnostic
};

struct PoincareSetup {
    WallProfile wall;
    ForcingModel forcing;  // waveform shape and period; lambda/gamma set per solve
    IntegratorConfig integrator;
    NewtonOptions newton;

    void validate() const;
    double period() const { return forcing.period(); }
    long steps_per_period() const;
};

struct PeriodicOrbit {
    double lambda = 0.0;
    double gamma = 0.0;
    RealField phi0;
    RealField vartheta0;
    double residual_norm = 0.0;
    int newton_iterations = 0;
    double monodromy_spectral_radius_on_range = 0.0;  // 0 when not computed

    PeriodicOrbit(const Grid& g) : phi0(g), vartheta0(g) {}
};

struct FResidual {
    RealField f_phi;       // phi(T) - phi0
    RealField f_vartheta;  // vartheta(T) - vartheta0
    double pin;            // vartheta0 at the x = 0 node

    double norm() const {
        return std::sqrt(inner_product(f_phi, f_phi) + inner_product(f_vartheta, f_vartheta) +
                         pin * pin);
    }
};

class PeriodicSolver {
public:
    explicit PeriodicSolver(PoincareSetup setup);

    const PoincareSetup& setup() const { return setup_; }
    const DynamicsContext& context() const { return ctx_; }

    // State after integrating exactly one period with h_ext = lambda h + gamma.
    State time_T_map(const State& initial, double gamma, double lambda) const;

    FResidual F_map(const RealField& phi0, const RealField& vartheta0, double gamma,
                    double lambda) const;

    // Damped Newton from the warm start (or from the trivial state).
    PeriodicOrbit solve(double lambda, const PeriodicOrbit* warm_start = nullptr);

    // Re-integration residuals over k periods and the worst |m|-1 deviation
    // of the reconstructed magnetization along the orbit.
    struct Verification {
        double residual_T;
        double residual_2T;
        double residual_3T;
        double pin;
        double magnetization_deviation;
    };
    Verification verify(const PeriodicOrbit& orbit) const;

    // Dense coarse monodromy block (exposed for tests and diagnostics).
    const Eigen::MatrixXd& coarse_monodromy();

private:
    PoincareSetup setup_;
    DynamicsContext ctx_;

    // Frozen origin Jacobian pieces.
    bool jacobian_ready_ = false;
    Eigen::MatrixXd coarse_monodromy_;
    Eigen::PartialPivLU<Eigen::MatrixXd> coarse_lu_;
    std::vector<std::array<double, 4>> high_inverse_;  // (E_k - I)^{-1} per fine bin
    int low_cutoff_ = 0;                               // dense block: |wrap(k)| < cutoff

    void build_jacobian();
    void newton_update(const FResidual& f, RealField& dphi, RealField& dvth, double& dgamma);
};

struct ContinuationResult {
    std::vector<PeriodicOrbit> orbits;  // ascending lambda, starting at 0
    bool completed = true;
    std::string message;
};

// Warm-started march from lambda = 0 to lambda_max in n_steps, halving the
// increment on Newton failure (minimum step 1e-6); partial results are
// returned with completed = false.
ContinuationResult continuation(PeriodicSolver& solver, double lambda_max, int n_steps);

// Variation-of-constants integral (1/eps) int_0^T e^{(T-s) L0} q ds for
// q = (alpha cos theta; cos theta), by composite Simpson with the given
// number of panels (matrix-exponential stepping).
Eigen::VectorXd gamma_derivative_integral(const LinearOperatorMatrix& l0,
                                          const WallProfile& wall, double period, int panels);

// Wall data restricted to a coarser grid by node subsampling (spectral
// truncation of the decaying part); stride = fine N / coarse N.
WallProfile subsample_wall(const WallProfile& wall, int coarse_n);

} // namespace neel
