//==============================================================================
// acceptance_main.cpp
// End-to-end acceptance run: eleven criteria, one pass/fail line each, every
// tolerance pinned in code. The exit status is the number of failed
// criteria. Criteria 4 and 6 include the translation-mode residual clause,
// which measures the domain-truncation floor (~3e-4 at L=100): it is run
// exactly as stated and reported honestly; see the project notes on why no
// desk-scale grid can push it to 1e-6.
//==============================================================================
#include <chrono>
#include <cstdio>
#include <memory>
#include <vector>

#include "neelwall/archive.hpp"
#include "neelwall/periodic.hpp"
#include "support.hpp"

using namespace neel;
using Clock = std::chrono::steady_clock;
using testsupport::Rng;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, Clock::time_point start) {
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("[%s] criterion %2d: %s  (%.1fs)\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

const RescaledParameters kParams{1.0, 0.1, 0.5};

WallProfile solve_coarse(double L, int n) {
    SolverOptions o;
    o.newton_tol = 1e-12;
    return solve_wall(kParams, Grid(L, n), o);
}

// --------------------------------------------------------------------------
void criterion_1() {
    auto t0 = Clock::now();
    int violations = 0;
    for (double eps : {0.05, 0.1, 0.5}) {
        for (int i = 0; i < 10000; ++i) {
            const double xi = std::pow(10.0, -8.0 + 16.0 * i / 9999.0);
            const double m = rescaled_symbol(xi, eps);
            if (!(m >= 0.0 && m <= xi)) ++violations;
        }
    }
    report(1, violations == 0,
           "multiplier bound 0 <= sigma_eps(xi)/eps <= |xi|, 3x10^4 samples, " +
               std::to_string(violations) + " violations",
           t0);
}

void criterion_2() {
    auto t0 = Clock::now();
    Grid g(200.0, 4096);
    StrayFieldOperator op(g, kParams.epsilon);
    Rng rng(101);
    double worst_sym = 0.0, worst_psd = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        auto u = testsupport::random_smooth_field(g, rng);
        auto v = testsupport::random_smooth_field(g, rng);
        const double nu = norm(u), nv = norm(v);
        RealField au = op.apply(u), av = op.apply(v);
        worst_sym = std::max(worst_sym, std::abs(inner_product(au, v) - inner_product(u, av)) /
                                            (nu * nv));
        worst_psd = std::max(worst_psd, -inner_product(au, u) / (nu * nu));
    }
    report(2, worst_sym <= 1e-12 && worst_psd <= 1e-12,
           "stray operator symmetric (defect " + fmt(worst_sym) + ") and PSD (worst " +
               fmt(worst_psd) + "), 100 random pairs",
           t0);
}

std::unique_ptr<WallProfile> g_fine_wall;

void criterion_3() {
    auto t0 = Clock::now();
    g_fine_wall = std::make_unique<WallProfile>(solve_wall(kParams, Grid(200.0, 4096)));
    const WallProfile& wall = *g_fine_wall;
    const Grid& g = wall.grid();
    bool pass = wall.el_residual_norm <= 1e-8;
    double min_slope = 1e300, odd = 0.0;
    for (int j = 0; j < g.size(); ++j) min_slope = std::min(min_slope, wall.derivative[j]);
    for (int j = 1; j < g.size(); ++j)
        odd = std::max(odd, std::abs(wall.profile.theta()[j] + wall.profile.theta()[g.size() - j]));
    pass = pass && min_slope >= -1e-10 && odd <= 1e-8;
    const double edge = std::abs(std::abs(wall.profile.theta()[0]) - M_PI / 2.0);
    pass = pass && edge < 1e-2;
    const double e_ref = energy(PhaseProfile::reference(g), kParams).total();
    pass = pass && wall.energy.total() <= e_ref;
    report(3, pass,
           "static wall at (kappa=1, eps=0.1, L=200, N=4096): residual " +
               fmt(wall.el_residual_norm) + ", min theta' " + fmt(min_slope) + ", oddness " +
               fmt(odd) + ", energy " + fmt(wall.energy.total()) + " <= ref " + fmt(e_ref),
           t0);
}

void criterion_4() {
    auto t0 = Clock::now();
    auto wall = solve_coarse(130.0, 1024);
    auto l2 = assemble_L2(wall);

    Eigen::Map<const Eigen::VectorXd> tp(wall.derivative.data().data(), wall.grid().size());
    const double kres = std::sqrt(wall.grid().spacing() * l2.apply(tp).squaredNorm()) /
                        norm(wall.derivative);
    const bool a = kres <= 1e-6;

    auto rep = spectrum(l2);
    const bool b = rep.kernel_dimension == 1;

    Rng rng(202);
    double worst_rayleigh = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        RealField u = testsupport::random_smooth_field(wall.grid(), rng);
        const double c = inner_product(u, wall.derivative) /
                         inner_product(wall.derivative, wall.derivative);
        for (int j = 0; j < u.size(); ++j) u[j] -= c * wall.derivative[j];
        worst_rayleigh =
            std::min(worst_rayleigh, quadratic_form_G(l2, u, u) / inner_product(u, u));
    }
    const bool c = worst_rayleigh >= -1e-8;
    report(4, a && b && c,
           "L2 kernel and gap at N=1024: ||L2 theta'||/||theta'|| = " + fmt(kres) +
               " (<= 1e-6: " + (a ? "yes" : "no — truncation floor, see notes") +
               "), kernel dim " + std::to_string(rep.kernel_dimension) +
               ", worst perp Rayleigh " + fmt(worst_rayleigh),
           t0);
}

void criterion_5() {
    auto t0 = Clock::now();
    auto wall = solve_coarse(130.0, 1024);
    auto rep = spectrum(assemble_L1(wall));
    const double largest = rep.eigenvalues.back().real();
    report(5, largest < 0.0,
           "L1 negative definite at eps=0.1: largest eigenvalue " + fmt(largest), t0);
}

void criterion_6() {
    auto t0 = Clock::now();
    auto wall = solve_coarse(130.0, 1024);
    const Grid& g = wall.grid();
    bool kernel_ok = true, axis_ok = true;
    double worst_kres = 0.0;
    int total_violations = 0;
    for (double alpha : {0.1, 0.5, 2.0}) {
        auto l0 = assemble_L0(wall, alpha);
        RealField zero(g);
        Eigen::VectorXd v = stack_fields(zero, wall.derivative);
        const double kres =
            std::sqrt(g.spacing() * l0.apply(v).squaredNorm()) / norm(wall.derivative);
        worst_kres = std::max(worst_kres, kres);
        kernel_ok = kernel_ok && kres <= 1e-6;
        auto rep = spectrum(l0);
        total_violations += static_cast<int>(rep.imaginary_axis_violations.size());
        axis_ok = axis_ok && rep.imaginary_axis_violations.empty();
    }
    report(6, kernel_ok && axis_ok,
           "L0 at alpha in {0.1, 0.5, 2}: kernel pair residual " + fmt(worst_kres) +
               " (<= 1e-6: " + (kernel_ok ? "yes" : "no — truncation floor, see notes") +
               "), imaginary-axis violations " + std::to_string(total_violations),
           t0);
}

void criterion_7() {
    auto t0 = Clock::now();
    Rng rng(303);
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd a(50, 50), b(50, 50);
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j) {
                a(i, j) = rng.uniform();
                b(i, j) = rng.uniform();
            }
        a = (0.5 * (a + a.transpose())).eval();
        b = (0.5 * (b + b.transpose())).eval();
        for (double alpha : {0.1, 1.0, 10.0})
            violations += static_cast<int>(
                block_lemma_check(a, b, alpha).imaginary_axis_violations.size());
    }
    report(7, violations == 0,
           "abstract block lemma, 100 random symmetric pairs (n=50) x 3 alphas: " +
               std::to_string(violations) + " imaginary-axis violations",
           t0);
}

void criterion_8() {
    auto t0 = Clock::now();
    auto wall = solve_coarse(60.0, 256);
    const Grid& g = wall.grid();
    const int n = g.size();
    DynamicsContext ctx(wall);
    ForcingModel zero = ForcingModel::zero(1.0);
    auto l0 = assemble_L0(wall, kParams.alpha);

    Eigen::MatrixXd fd(2 * n, 2 * n);
    const double h = 1e-6;
    for (int col = 0; col < 2 * n; ++col) {
        State sp(g), sm(g);
        if (col < n) {
            sp.phi[col] = h;
            sm.phi[col] = -h;
        } else {
            sp.vartheta[col - n] = h;
            sm.vartheta[col - n] = -h;
        }
        auto [p1, p2] = rhs(ctx, sp, zero);
        auto [m1, m2] = rhs(ctx, sm, zero);
        for (int i = 0; i < n; ++i) {
            fd(i, col) = (p1[i] - m1[i]) / (2.0 * h);
            fd(n + i, col) = (p2[i] - m2[i]) / (2.0 * h);
        }
    }
    const double rel = (fd - l0.entries()).norm() / l0.entries().norm();

    ForcingModel gp = ForcingModel::zero(1.0), gm = ForcingModel::zero(1.0);
    gp.set_gamma(h);
    gm.set_gamma(-h);
    State s0(g);
    auto [q1, q2] = rhs(ctx, s0, gp);
    auto [w1, w2] = rhs(ctx, s0, gm);
    auto c = OperatorCoefficients::from_wall(wall);
    double gd = 0.0;
    for (int j = 0; j < n; ++j) {
        gd = std::max(gd, std::abs((q1[j] - w1[j]) / (2.0 * h) -
                                   kParams.alpha / kParams.epsilon * c.cos_theta[j]));
        gd = std::max(gd, std::abs((q2[j] - w2[j]) / (2.0 * h) -
                                   1.0 / kParams.epsilon * c.cos_theta[j]));
    }
    report(8, rel <= 1e-5 && gd <= 1e-8,
           "rhs linearization: FD Jacobian vs assembled L0 rel " + fmt(rel) +
               ", gamma derivative defect " + fmt(gd),
           t0);
}

void criterion_9() {
    auto t0 = Clock::now();
    auto wall = solve_coarse(60.0, 256);
    const Grid& g = wall.grid();
    PoincareSetup setup{wall, ForcingModel::sine(1.0, 0.0, 0.0), IntegratorConfig{},
                        NewtonOptions{}};
    setup.integrator.dt = 1.0 / 2000;
    setup.newton.coarse_modes = 256;
    PeriodicSolver solver(setup);
    auto l0 = assemble_L0(wall, kParams.alpha);
    Eigen::MatrixXd expT = matrix_exponential(l0, 1.0);

    Rng rng(404);
    const double h = 1e-5;
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        RealField a = testsupport::random_smooth_field(g, rng, 6);
        RealField b = testsupport::random_smooth_field(g, rng, 6);
        Eigen::VectorXd d = stack_fields(a, b);
        d /= d.norm();
        auto [pa, pb] = unstack_fields(g, h * d);
        auto [ma, mb] = unstack_fields(g, -h * d);
        State plus = solver.time_T_map(State(pa, pb, 0.0), 0.0, 0.0);
        State minus = solver.time_T_map(State(ma, mb, 0.0), 0.0, 0.0);
        Eigen::VectorXd fd =
            (stack_fields(plus.phi, plus.vartheta) - stack_fields(minus.phi, minus.vartheta)) /
            (2.0 * h);
        Eigen::VectorXd want = expT * d;
        worst = std::max(worst, (fd - want).norm() / want.norm());
    }

    Eigen::VectorXd voc = gamma_derivative_integral(l0, wall, 1.0, 64);
    State gp = solver.time_T_map(State(g), h, 0.0);
    State gm = solver.time_T_map(State(g), -h, 0.0);
    Eigen::VectorXd fd =
        (stack_fields(gp.phi, gp.vartheta) - stack_fields(gm.phi, gm.vartheta)) / (2.0 * h);
    const double gerr = (fd - voc).norm() / voc.norm();
    report(9, worst <= 1e-4 && gerr <= 1e-4,
           "time-T map derivatives vs semigroup: 5 directions worst " + fmt(worst) +
               ", gamma column " + fmt(gerr),
           t0);
}

void criterion_10() {
    auto t0 = Clock::now();
    if (!g_fine_wall) g_fine_wall = std::make_unique<WallProfile>(solve_wall(kParams, Grid(200.0, 4096)));
    PoincareSetup setup{*g_fine_wall, ForcingModel::sine(1.0, 0.0, 0.0), IntegratorConfig{},
                        NewtonOptions{}};
    setup.integrator.dt = 1.0 / 2000;
    PeriodicSolver solver(setup);
    auto result = continuation(solver, 0.05, 10);

    int converged = 0;
    bool pass = result.completed;
    double worst_res = 0.0, worst_reint = 0.0, worst_pin = 0.0, worst_m = 0.0;
    pass = pass && result.orbits.front().lambda == 0.0 && result.orbits.front().gamma == 0.0;
    for (const auto& orbit : result.orbits) {
        if (orbit.lambda > 0.0) ++converged;
        worst_res = std::max(worst_res, orbit.residual_norm);
        auto v = solver.verify(orbit);
        worst_reint = std::max(worst_reint, v.residual_3T);
        worst_pin = std::max(worst_pin, v.pin);
        worst_m = std::max(worst_m, v.magnetization_deviation);
    }
    pass = pass && converged >= 10 && worst_res <= 1e-8 && worst_reint <= 1e-6 &&
           worst_pin <= 1e-12 && worst_m <= 1e-12;
    report(10, pass,
           "continuation to lambda=0.05 in 10 steps: " + std::to_string(converged) +
               " nontrivial orbits, residual " + fmt(worst_res) + ", 3T re-integration " +
               fmt(worst_reint) + ", pinning " + fmt(worst_pin) + ", |m|-1 " + fmt(worst_m) +
               ", gamma(0) = " + fmt(result.orbits.front().gamma),
           t0);
}

void criterion_11() {
    auto t0 = Clock::now();
    auto wall = solve_coarse(100.0, 1024);
    DynamicsContext ctx(wall);
    ForcingModel forcing = ForcingModel::sine(1.0, 0.02, 0.0);
    auto run = [&](long steps) {
        IntegratorConfig cfg;
        cfg.dt = 1.0 / steps;
        Stepper st(ctx, cfg, forcing);
        st.reset(State(wall.grid()));
        for (long s = 0; s < steps; ++s) st.advance();
        return stack_fields(st.state().phi, st.state().vartheta);
    };
    Eigen::VectorXd a = run(500), b = run(1000), c = run(2000);
    const double slope = std::log2((a - b).norm() / (b - c).norm());
    report(11, slope >= 1.9,
           "IMEX-BDF2 self-convergence slope " + fmt(slope) + " over dt in {T/500, T/1000, T/2000}",
           t0);
}

} // namespace

int main() {
    std::printf("acceptance run: kappa=%g, epsilon=%g, alpha=%g\n", kParams.kappa,
                kParams.epsilon, kParams.alpha);
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    std::printf("%d of 11 criteria passed\n", 11 - g_failures);
    return g_failures;
}
