#include "neelwall/periodic.hpp"

#include <algorithm>
#include <cmath>

namespace neel {

namespace {

// Overflow-safe exp of a real 2x2 matrix (used for per-mode symbols whose
// entries reach -kappa xi_max^2 T ~ -10^3).
std::array<double, 4> exp_2x2(double m00, double m01, double m10, double m11) {
    const double mean = 0.5 * (m00 + m11);
    const double b00 = m00 - mean, b01 = m01, b10 = m10;  // traceless part
    const double s2 = b00 * b00 + b01 * b10;
    double c, snc;  // e^{-mean} * (cosh s, sinh(s)/s)
    if (std::abs(s2) < 1e-12) {
        const double e = std::exp(mean);
        c = e * (1.0 + s2 / 2.0);
        snc = e * (1.0 + s2 / 6.0);
    } else if (s2 > 0.0) {
        const double s = std::sqrt(s2);
        const double ep = std::exp(mean + s), en = std::exp(mean - s);
        c = 0.5 * (ep + en);
        snc = 0.5 * (ep - en) / s;
    } else {
        const double w = std::sqrt(-s2);
        const double e = std::exp(mean);
        c = e * std::cos(w);
        snc = e * std::sin(w) / w;
    }
    return {c + snc * b00, snc * b01, snc * b10, c - snc * b00};
}

std::array<double, 4> invert_2x2(const std::array<double, 4>& a) {
    const double det = a[0] * a[3] - a[1] * a[2];
    if (det == 0.0) throw NumericalFailure("singular 2x2 mode block");
    return {a[3] / det, -a[1] / det, -a[2] / det, a[0] / det};
}

} // namespace

void PoincareSetup::validate() const {
    integrator.validate();
    if (!(forcing.period() > 0.0)) throw InvalidParameter("forcing period must be positive");
    const double steps = forcing.period() / integrator.dt;
    if (std::abs(steps - std::lround(steps)) > 1e-8 * std::max(1.0, steps))
        throw InvalidParameter("dt must divide the forcing period");
    const int n = wall.grid().size();
    const int mc = newton.coarse_modes;
    if (mc < 8 || mc % 2 != 0 || mc > n || n % mc != 0)
        throw InvalidParameter("coarse_modes must be even, >= 8, and divide the grid size");
}

long PoincareSetup::steps_per_period() const {
    return std::lround(forcing.period() / integrator.dt);
}

WallProfile subsample_wall(const WallProfile& wall, int coarse_n) {
    const Grid& fine = wall.grid();
    if (coarse_n == fine.size()) return wall;
    if (fine.size() % coarse_n != 0)
        throw InvalidParameter("coarse size must divide the fine grid size");
    const int stride = fine.size() / coarse_n;
    Grid coarse(fine.half_length(), coarse_n);
    auto sample = [&](const RealField& f) {
        RealField out(coarse);
        for (int j = 0; j < coarse_n; ++j) out[j] = f[j * stride];
        return out;
    };
    std::vector<double> theta(coarse_n);
    for (int j = 0; j < coarse_n; ++j) theta[j] = wall.profile.theta()[j * stride];
    return WallProfile{PhaseProfile(coarse, std::move(theta)),
                       sample(wall.derivative),
                       sample(wall.second_derivative),
                       wall.params,
                       wall.energy,
                       wall.el_residual_norm,
                       wall.tail_value,
                       wall.grad_flow_iterations,
                       wall.newton_iterations,
                       wall.warning};
}

Eigen::VectorXd gamma_derivative_integral(const LinearOperatorMatrix& l0,
                                          const WallProfile& wall, double period, int panels) {
    if (panels < 2 || panels % 2 != 0)
        throw InvalidParameter("Simpson quadrature needs an even panel count");
    const Grid& g = wall.grid();
    if (l0.size() != 2 * g.size()) throw DimensionMismatch("operator is not a stacked pair");
    const double alpha = wall.params.alpha, eps = wall.params.epsilon;

    OperatorCoefficients c = OperatorCoefficients::from_wall(wall);
    RealField top(g);
    for (int j = 0; j < g.size(); ++j) top[j] = alpha * c.cos_theta[j];
    Eigen::VectorXd q = stack_fields(top, c.cos_theta);

    Eigen::MatrixXd step = matrix_exponential(l0, period / panels);
    Eigen::VectorXd acc = q;  // Simpson: w_0 = 1
    Eigen::VectorXd u = q;
    for (int j = 1; j <= panels; ++j) {
        u = step * u;
        const double w = (j == panels) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        acc += w * u;
    }
    return acc * (period / panels / 3.0 / eps);
}

PeriodicSolver::PeriodicSolver(PoincareSetup setup)
    : setup_(std::move(setup)), ctx_(setup_.wall) {
    setup_.validate();
}

State PeriodicSolver::time_T_map(const State& initial, double gamma, double lambda) const {
    ForcingModel forcing = setup_.forcing;
    forcing.set_lambda(lambda);
    forcing.set_gamma(gamma);
    Stepper stepper(ctx_, setup_.integrator, forcing);
    State start = initial;
    start.time = 0.0;
    stepper.reset(start);
    const long n_steps = setup_.steps_per_period();
    for (long s = 0; s < n_steps; ++s) stepper.advance();
    return stepper.state();
}

FResidual PeriodicSolver::F_map(const RealField& phi0, const RealField& vartheta0, double gamma,
                                double lambda) const {
    State mapped = time_T_map(State(phi0, vartheta0, 0.0), gamma, lambda);
    RealField fp = mapped.phi, fv = mapped.vartheta;
    for (int j = 0; j < fp.size(); ++j) {
        fp[j] -= phi0[j];
        fv[j] -= vartheta0[j];
    }
    return FResidual{std::move(fp), std::move(fv), vartheta0[vartheta0.grid().center_index()]};
}

void PeriodicSolver::build_jacobian() {
    if (jacobian_ready_) return;
    const Grid& g = ctx_.grid();
    const int n = g.size();
    const int mc = setup_.newton.coarse_modes;
    low_cutoff_ = mc / 2;
    const double T = setup_.period();
    const RescaledParameters& p = ctx_.params();

    // Dense block on the coarse grid.
    WallProfile coarse_wall = subsample_wall(setup_.wall, mc);
    Eigen::VectorXd b;
    if (setup_.newton.strategy == JacobianStrategy::semigroup) {
        LinearOperatorMatrix l0 = assemble_L0(coarse_wall, p.alpha);
        coarse_monodromy_ = matrix_exponential(l0, T);
        b = gamma_derivative_integral(l0, coarse_wall, T, 128);
    } else {
        // Central differences of the coarse time-T map around the origin.
        PoincareSetup cs = setup_;
        cs.wall = coarse_wall;
        cs.newton.strategy = JacobianStrategy::semigroup;  // leaf solver, unused
        PeriodicSolver coarse(cs);
        const Grid& cg = coarse_wall.grid();
        const double h = setup_.newton.fd_step;
        coarse_monodromy_.resize(2 * mc, 2 * mc);
        Eigen::VectorXd unit(2 * mc);
        for (int col = 0; col < 2 * mc; ++col) {
            unit.setZero();
            unit[col] = h;
            auto [pp, pv] = unstack_fields(cg, unit);
            State plus = coarse.time_T_map(State(pp, pv, 0.0), 0.0, 0.0);
            unit[col] = -h;
            auto [mp, mv] = unstack_fields(cg, unit);
            State minus = coarse.time_T_map(State(mp, mv, 0.0), 0.0, 0.0);
            coarse_monodromy_.col(col) =
                (stack_fields(plus.phi, plus.vartheta) - stack_fields(minus.phi, minus.vartheta)) /
                (2.0 * h);
        }
        State zero(cg);
        State gp = coarse.time_T_map(zero, h, 0.0);
        State gm = coarse.time_T_map(zero, -h, 0.0);
        b = (stack_fields(gp.phi, gp.vartheta) - stack_fields(gm.phi, gm.vartheta)) / (2.0 * h);
    }

    Eigen::MatrixXd bordered(2 * mc + 1, 2 * mc + 1);
    bordered.setZero();
    bordered.topLeftCorner(2 * mc, 2 * mc) =
        coarse_monodromy_ - Eigen::MatrixXd::Identity(2 * mc, 2 * mc);
    bordered.col(2 * mc).head(2 * mc) = b;
    // Pinning row: value at x = 0 of the coarse vartheta correction after its
    // own Nyquist mode is cropped by the prolongation.
    const double nyq_sign = (mc / 2) % 2 == 0 ? 1.0 : -1.0;
    for (int j = 0; j < mc; ++j) {
        double entry = (j == mc / 2) ? 1.0 : 0.0;
        entry -= nyq_sign * ((j % 2 == 0) ? 1.0 : -1.0) / mc;
        bordered(2 * mc, mc + j) = entry;
    }
    coarse_lu_.compute(bordered);

    // Per-mode blocks exp(T A_xi) - I on the high modes, from the symbol of
    // the linearization at infinity: a1 = -(kappa xi^2 + 1/eps + 1 - m),
    // a2 = -(kappa xi^2 + 1 + m).
    high_inverse_.assign(n, {0.0, 0.0, 0.0, 0.0});
    const auto& mult = ctx_.stray().multiplier();
    for (int k = 0; k < n; ++k) {
        if (std::abs(g.wrap(k)) < low_cutoff_) continue;
        const double xi = g.frequency(k);
        const double a1 = -(p.kappa * xi * xi + 1.0 / p.epsilon + 1.0 - mult[k]);
        const double a2 = -(p.kappa * xi * xi + 1.0 + mult[k]);
        auto e = exp_2x2(T * a1, T * p.alpha * a2, -T * p.alpha * a1, T * a2);
        e[0] -= 1.0;
        e[3] -= 1.0;
        high_inverse_[k] = invert_2x2(e);
    }
    jacobian_ready_ = true;
}

const Eigen::MatrixXd& PeriodicSolver::coarse_monodromy() {
    build_jacobian();
    return coarse_monodromy_;
}

void PeriodicSolver::newton_update(const FResidual& f, RealField& dphi, RealField& dvth,
                                   double& dgamma) {
    build_jacobian();
    const Grid& g = ctx_.grid();
    const int n = g.size();
    const int mc = setup_.newton.coarse_modes;
    auto& tr = spectral::transform_for(n);

    std::vector<spectral::Complex> fp_hat, fv_hat;
    tr.forward(f.f_phi.values(), fp_hat);
    tr.forward(f.f_vartheta.values(), fv_hat);

    // High modes: independent 2x2 solves.
    std::vector<spectral::Complex> dp_hat(n, 0.0), dv_hat(n, 0.0);
    for (int k = 0; k < n; ++k) {
        if (std::abs(g.wrap(k)) < low_cutoff_) continue;
        const auto& inv = high_inverse_[k];
        dp_hat[k] = -(inv[0] * fp_hat[k] + inv[1] * fv_hat[k]);
        dv_hat[k] = -(inv[2] * fp_hat[k] + inv[3] * fv_hat[k]);
    }
    // Value of the high-mode vartheta correction at the x = 0 node.
    spectral::Complex vhi_c = 0.0;
    for (int k = 0; k < n; ++k) {
        const int w = g.wrap(k);
        if (std::abs(w) < low_cutoff_) continue;
        vhi_c += dv_hat[k] * ((w % 2 == 0) ? 1.0 : -1.0);  // (-1)^k at the center node
    }
    const double v_hi = vhi_c.real() / n;

    // Low modes: represent the residual exactly on the coarse grid, solve the
    // dense bordered system in coarse samples.
    auto& trc = spectral::transform_for(mc);
    std::vector<spectral::Complex> cp(mc, 0.0), cv(mc, 0.0);
    const double down = static_cast<double>(mc) / n;
    for (int kc = 0; kc < mc; ++kc) {
        const int w = kc < mc / 2 ? kc : kc - mc;
        if (std::abs(w) >= low_cutoff_) continue;
        const int kf = w >= 0 ? w : n + w;
        cp[kc] = down * fp_hat[kf];
        cv[kc] = down * fv_hat[kf];
    }
    std::vector<double> fpc, fvc;
    trc.inverse(cp, fpc);
    trc.inverse(cv, fvc);

    Eigen::VectorXd rhs(2 * mc + 1);
    for (int j = 0; j < mc; ++j) {
        rhs[j] = -fpc[j];
        rhs[mc + j] = -fvc[j];
    }
    rhs[2 * mc] = -f.pin - v_hi;
    Eigen::VectorXd sol = coarse_lu_.solve(rhs);
    dgamma = sol[2 * mc];

    // Prolong the coarse correction into the retained low bins.
    std::vector<double> dcp(mc), dcv(mc);
    for (int j = 0; j < mc; ++j) {
        dcp[j] = sol[j];
        dcv[j] = sol[mc + j];
    }
    std::vector<spectral::Complex> dcp_hat, dcv_hat;
    trc.forward(std::span<const double>(dcp), dcp_hat);
    trc.forward(std::span<const double>(dcv), dcv_hat);
    const double up = static_cast<double>(n) / mc;
    for (int kc = 0; kc < mc; ++kc) {
        const int w = kc < mc / 2 ? kc : kc - mc;
        if (std::abs(w) >= low_cutoff_) continue;  // coarse Nyquist cropped
        const int kf = w >= 0 ? w : n + w;
        dp_hat[kf] = up * dcp_hat[kc];
        dv_hat[kf] = up * dcv_hat[kc];
    }

    std::vector<double> out;
    tr.inverse(dp_hat, out);
    dphi = RealField(g, out);
    tr.inverse(dv_hat, out);
    dvth = RealField(g, std::move(out));
}

PeriodicOrbit PeriodicSolver::solve(double lambda, const PeriodicOrbit* warm_start) {
    const Grid& g = ctx_.grid();
    PeriodicOrbit orbit(g);
    orbit.lambda = lambda;
    if (warm_start) {
        orbit.phi0 = warm_start->phi0;
        orbit.vartheta0 = warm_start->vartheta0;
        orbit.gamma = warm_start->gamma;
    }

    FResidual f = F_map(orbit.phi0, orbit.vartheta0, orbit.gamma, lambda);
    double res = f.norm();
    double last_step = 0.0;
    int iters = 0;
    const NewtonOptions& opt = setup_.newton;

    while (!(res <= opt.tol && (iters == 0 || last_step <= opt.step_tol))) {
        if (iters >= opt.max_iterations)
            throw SolverFailure("periodic orbit Newton did not converge", res);
        RealField dphi(g), dvth(g);
        double dgamma = 0.0;
        newton_update(f, dphi, dvth, dgamma);

        double s = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h) {
            RealField pp = orbit.phi0, vv = orbit.vartheta0;
            for (int j = 0; j < g.size(); ++j) {
                pp[j] += s * dphi[j];
                vv[j] += s * dvth[j];
            }
            const double gg = orbit.gamma + s * dgamma;
            FResidual f_try = F_map(pp, vv, gg, lambda);
            const double r_try = f_try.norm();
            if (r_try < res) {
                orbit.phi0 = std::move(pp);
                orbit.vartheta0 = std::move(vv);
                orbit.gamma = gg;
                f = std::move(f_try);
                res = r_try;
                last_step = s * std::sqrt(inner_product(dphi, dphi) +
                                          inner_product(dvth, dvth) + dgamma * dgamma);
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        ++iters;
        if (!accepted) throw SolverFailure("periodic orbit Newton stalled", res);
    }

    orbit.residual_norm = res;
    orbit.newton_iterations = iters;
    if (opt.monodromy_radius) {
        build_jacobian();
        auto ev = general_eigenvalues(coarse_monodromy_);
        // drop the kernel multiplier (the eigenvalue nearest 1)
        std::size_t kernel = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ev.size(); ++i) {
            const double d = std::abs(ev[i] - std::complex<double>(1.0, 0.0));
            if (d < best) {
                best = d;
                kernel = i;
            }
        }
        double radius = 0.0;
        for (std::size_t i = 0; i < ev.size(); ++i)
            if (i != kernel) radius = std::max(radius, std::abs(ev[i]));
        orbit.monodromy_spectral_radius_on_range = radius;
    }
    return orbit;
}

PeriodicSolver::Verification PeriodicSolver::verify(const PeriodicOrbit& orbit) const {
    const Grid& g = ctx_.grid();
    Verification v{};
    v.pin = std::abs(orbit.vartheta0[g.center_index()]);

    auto diff_norm = [&](const State& s) {
        double acc = 0.0;
        for (int j = 0; j < g.size(); ++j) {
            const double a = s.phi[j] - orbit.phi0[j];
            const double b = s.vartheta[j] - orbit.vartheta0[j];
            acc += a * a + b * b;
        }
        return std::sqrt(g.spacing() * acc);
    };
    auto m_deviation = [&](const State& s) {
        double worst = 0.0;
        for (int j = 0; j < g.size(); ++j) {
            const double theta = ctx_.theta_wall()[j] + s.vartheta[j];
            const double m1 = std::cos(s.phi[j]) * std::cos(theta);
            const double m2 = std::cos(s.phi[j]) * std::sin(theta);
            const double m3 = std::sin(s.phi[j]);
            worst = std::max(worst, std::abs(m1 * m1 + m2 * m2 + m3 * m3 - 1.0));
        }
        return worst;
    };

    State s(orbit.phi0, orbit.vartheta0, 0.0);
    v.magnetization_deviation = m_deviation(s);
    s = time_T_map(s, orbit.gamma, orbit.lambda);
    v.residual_T = diff_norm(s);
    v.magnetization_deviation = std::max(v.magnetization_deviation, m_deviation(s));
    s = time_T_map(s, orbit.gamma, orbit.lambda);
    v.residual_2T = diff_norm(s);
    s = time_T_map(s, orbit.gamma, orbit.lambda);
    v.residual_3T = diff_norm(s);
    v.magnetization_deviation = std::max(v.magnetization_deviation, m_deviation(s));
    return v;
}

ContinuationResult continuation(PeriodicSolver& solver, double lambda_max, int n_steps) {
    if (lambda_max < 0.0 || n_steps < 1)
        throw InvalidParameter("continuation needs lambda_max >= 0 and n_steps >= 1");
    ContinuationResult out;
    out.orbits.push_back(solver.solve(0.0));
    if (lambda_max == 0.0) return out;

    const double base = lambda_max / n_steps;
    double step = base;
    double current = 0.0;
    while (current < lambda_max * (1.0 - 1e-12)) {
        const double target = std::min(current + step, lambda_max);
        PeriodicOrbit warm = out.orbits.back();
        if (out.orbits.size() >= 2) {
            // secant predictor for the compatibility offset
            const auto& a = out.orbits[out.orbits.size() - 2];
            const auto& b = out.orbits.back();
            if (b.lambda > a.lambda)
                warm.gamma = b.gamma + (b.gamma - a.gamma) / (b.lambda - a.lambda) *
                                           (target - b.lambda);
        }
        try {
            out.orbits.push_back(solver.solve(target, &warm));
            current = target;
            step = std::min(base, step * 2.0);
        } catch (const Error&) {
            step *= 0.5;
            if (step < 1e-6) {
                out.completed = false;
                out.message = "continuation stalled at lambda = " + std::to_string(current);
                break;
            }
        }
    }
    return out;
}

} // namespace neel
