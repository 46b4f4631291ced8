#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "neelwall/dynamics.hpp"
#include "neelwall/linops.hpp"
#include "support.hpp"

using namespace neel;
using testsupport::Rng;

namespace {
const RescaledParameters kDefault{1.0, 0.1, 0.5};

const WallProfile& coarse_wall() {
    static WallProfile w = [] {
        SolverOptions o;
        o.newton_tol = 1e-12;
        return solve_wall(kDefault, Grid(60.0, 256), o);
    }();
    return w;
}

State small_state(const Grid& g, Rng& rng, double amp) {
    State s(g);
    RealField a = testsupport::random_smooth_field(g, rng, 6);
    RealField b = testsupport::random_smooth_field(g, rng, 6);
    for (int j = 0; j < g.size(); ++j) {
        s.phi[j] = amp * a[j];
        s.vartheta[j] = amp * b[j];
    }
    return s;
}
} // namespace

TEST_CASE("forcing models") {
    auto sine = ForcingModel::sine(2.0, 0.3, 0.1);
    CHECK(sine.scalar_at(0.5) == doctest::Approx(0.3 * 1.0 + 0.1));
    CHECK(sine.scalar_at(2.5) == doctest::Approx(sine.scalar_at(0.5)));  // wraps

    auto table = ForcingModel::tabulated(1.0, {0.0, 0.25, 0.5, 1.0}, {0.0, 1.0, 0.5, 0.0},
                                         2.0, 0.0);
    CHECK(table.waveform(0.125) == doctest::Approx(0.5));
    CHECK(table.waveform(1.25) == doctest::Approx(table.waveform(0.25)));

    CHECK_THROWS_AS(ForcingModel::tabulated(1.0, {0.0, 1.0}, {0.0, 0.5}, 1.0, 0.0),
                    InvalidParameter);  // h(0) != h(T)
    CHECK_THROWS_AS(ForcingModel::tabulated(1.0, {0.0, 0.5}, {0.0, 0.0}, 1.0, 0.0),
                    InvalidParameter);  // does not span [0, T]
    CHECK_THROWS_AS(ForcingModel::tabulated(1.0, {0.0, 0.5, 0.4, 1.0}, {0.0, 1.0, 1.0, 0.0},
                                            1.0, 0.0),
                    InvalidParameter);  // non-increasing times

    auto space = ForcingModel::tabulated_space(1.0, {0.0, 0.5, 1.0},
                                               {{1.0, 2.0}, {3.0, 4.0}, {1.0, 2.0}}, 1.0, 0.5);
    std::vector<double> row;
    space.field_at(0.25, row);
    REQUIRE(row.size() == 2u);
    CHECK(row[0] == doctest::Approx(2.0 + 0.5));
    CHECK(row[1] == doctest::Approx(3.0 + 0.5));
    CHECK_THROWS_AS(space.waveform(0.1), InvalidParameter);
}

TEST_CASE("stationary wall: rhs vanishes and matches the EL residual") {
    DynamicsContext ctx(coarse_wall());
    ForcingModel zero = ForcingModel::zero(1.0);
    auto [r1, r2] = rhs(ctx, State(ctx.grid()), zero);
    CHECK(norm(r1) < 1e-10);
    CHECK(norm(r2) < 1e-10);
}

TEST_CASE("phi = 0 gives R1 = alpha R2 identically") {
    DynamicsContext ctx(coarse_wall());
    const Grid& g = ctx.grid();
    ForcingModel zero = ForcingModel::zero(1.0);
    Rng rng(3);
    State s(g);
    RealField b = testsupport::random_smooth_field(g, rng, 8);
    for (int j = 0; j < g.size(); ++j) s.vartheta[j] = 0.1 * b[j];
    auto [r1, r2] = rhs(ctx, s, zero);
    double worst = 0.0;
    for (int j = 0; j < g.size(); ++j)
        worst = std::max(worst, std::abs(r1[j] - kDefault.alpha * r2[j]));
    CHECK(worst < 1e-13 * std::max(1.0, max_abs(r2)));
}

TEST_CASE("linearization consistency: quadratic remainder slope") {
    DynamicsContext ctx(coarse_wall());
    const Grid& g = ctx.grid();
    const int n = g.size();
    ForcingModel zero = ForcingModel::zero(1.0);
    auto l0 = assemble_L0(coarse_wall(), kDefault.alpha);
    Rng rng(11);
    State dir = small_state(g, rng, 1.0);
    Eigen::VectorXd d = stack_fields(dir.phi, dir.vartheta);
    Eigen::VectorXd ld = l0.apply(d);

    std::vector<double> hs{1e-2, 1e-3, 1e-4}, errs;
    for (double h : hs) {
        State s(g);
        for (int j = 0; j < n; ++j) {
            s.phi[j] = h * dir.phi[j];
            s.vartheta[j] = h * dir.vartheta[j];
        }
        auto [r1, r2] = rhs(ctx, s, zero);
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double e1 = r1[j] - h * ld[j];
            const double e2 = r2[j] - h * ld[n + j];
            acc += e1 * e1 + e2 * e2;
        }
        errs.push_back(std::sqrt(g.spacing() * acc));
    }
    const double slope1 = std::log10(errs[0] / errs[1]);
    const double slope2 = std::log10(errs[1] / errs[2]);
    CHECK(slope1 >= 1.9);
    CHECK(slope2 >= 1.9);
}

TEST_CASE("finite-difference Jacobian of rhs matches the assembled L0") {
    DynamicsContext ctx(coarse_wall());
    const Grid& g = ctx.grid();
    const int n = g.size();
    ForcingModel zero = ForcingModel::zero(1.0);
    auto l0 = assemble_L0(coarse_wall(), kDefault.alpha);
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
    CHECK((fd - l0.entries()).norm() / l0.entries().norm() < 1e-5);
}

TEST_CASE("gamma derivative of rhs is (1/eps)(alpha cos, cos)") {
    DynamicsContext ctx(coarse_wall());
    const Grid& g = ctx.grid();
    auto c = OperatorCoefficients::from_wall(coarse_wall());
    const double h = 1e-6;
    ForcingModel gp = ForcingModel::zero(1.0);
    gp.set_gamma(h);
    ForcingModel gm = ForcingModel::zero(1.0);
    gm.set_gamma(-h);
    State s0(g);
    auto [p1, p2] = rhs(ctx, s0, gp);
    auto [m1, m2] = rhs(ctx, s0, gm);
    double worst = 0.0;
    for (int j = 0; j < g.size(); ++j) {
        worst = std::max(worst, std::abs((p1[j] - m1[j]) / (2.0 * h) -
                                         kDefault.alpha / kDefault.epsilon * c.cos_theta[j]));
        worst = std::max(worst, std::abs((p2[j] - m2[j]) / (2.0 * h) -
                                         1.0 / kDefault.epsilon * c.cos_theta[j]));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("validity region guard") {
    DynamicsContext ctx(coarse_wall());
    const Grid& g = ctx.grid();
    ForcingModel zero = ForcingModel::zero(1.0);
    State s(g);
    for (int j = 0; j < g.size(); ++j) s.phi[j] = 1.0;  // beyond pi/4
    s.time = 3.25;
    CHECK_THROWS_AS(rhs(ctx, s, zero), ValidityExit);
    try {
        rhs(ctx, s, zero);
    } catch (const ValidityExit& e) {
        CHECK(e.exit_time == 3.25);
    }
}

TEST_CASE("stepper: fixed point, Euler local order against the semigroup") {
    const WallProfile& wall = coarse_wall();
    DynamicsContext ctx(wall);
    const Grid& g = ctx.grid();
    const int n = g.size();
    ForcingModel zero = ForcingModel::zero(1.0);

    // zero state stays zero to the wall-residual floor
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.scheme = Scheme::imex_euler;
    Stepper st(ctx, cfg, zero);
    st.reset(State(g));
    st.advance();
    CHECK(max_abs(st.state().phi) < 1e-12);
    CHECK(max_abs(st.state().vartheta) < 1e-12);

    // one Euler step from tiny data vs exp(dt L0): local error O(dt^2)
    auto l0 = assemble_L0(wall, kDefault.alpha);
    Rng rng(7);
    State dir = small_state(g, rng, 1e-6);
    Eigen::VectorXd u0 = stack_fields(dir.phi, dir.vartheta);
    std::vector<double> errs;
    for (double dt : {2e-3, 1e-3, 5e-4}) {
        IntegratorConfig c2;
        c2.dt = dt;
        c2.scheme = Scheme::imex_euler;
        Stepper s2(ctx, c2, zero);
        s2.reset(dir);
        s2.advance();
        Eigen::VectorXd got = stack_fields(s2.state().phi, s2.state().vartheta);
        Eigen::VectorXd want = semigroup_action(l0, dt, u0);
        errs.push_back((got - want).norm());
    }
    CHECK(errs[0] / errs[1] > 3.0);  // ~4 for a first-order local pair
    CHECK(errs[1] / errs[2] > 3.0);
}

TEST_CASE("IMEX-BDF2 formula: local order three on the linear problem") {
    // independent statement of the scheme applied to u' = L0 u with exact
    // starting history, compared against the matrix exponential
    const WallProfile& wall = coarse_wall();
    const Grid& g = wall.grid();
    const int n = g.size();
    auto l0 = assemble_L0(wall, kDefault.alpha);
    const double kappa = kDefault.kappa, alpha = kDefault.alpha;

    Rng rng(13);
    State dir = small_state(g, rng, 1.0);
    Eigen::VectorXd u0 = stack_fields(dir.phi, dir.vartheta);

    auto implicit_solve = [&](double dt, const Eigen::VectorXd& rhsv, double lead) {
        // (lead I + dt kappa xi^2 R) u = rhs, mode by mode
        auto& tr = spectral::transform_for(n);
        std::vector<spectral::Complex> a, b;
        std::vector<double> top(n), bot(n);
        for (int j = 0; j < n; ++j) {
            top[j] = rhsv[j];
            bot[j] = rhsv[n + j];
        }
        tr.forward(std::span<const double>(top), a);
        tr.forward(std::span<const double>(bot), b);
        for (int k = 0; k < n; ++k) {
            const double xi = g.frequency(k);
            const double aa = dt * kappa * xi * xi;
            const double l = lead + aa, off = alpha * aa;
            const double det = l * l + off * off;
            const auto b1 = a[k], b2 = b[k];
            a[k] = (l * b1 - off * b2) / det;
            b[k] = (off * b1 + l * b2) / det;
        }
        tr.inverse(a, top);
        tr.inverse(b, bot);
        Eigen::VectorXd out(2 * n);
        for (int j = 0; j < n; ++j) {
            out[j] = top[j];
            out[n + j] = bot[j];
        }
        return out;
    };
    auto explicit_part = [&](const Eigen::VectorXd& u) {
        Eigen::VectorXd e = l0.apply(u);
        auto& tr = spectral::transform_for(n);
        std::vector<spectral::Complex> a, b;
        std::vector<double> top(n), bot(n);
        for (int j = 0; j < n; ++j) {
            top[j] = u[j];
            bot[j] = u[n + j];
        }
        tr.forward(std::span<const double>(top), a);
        tr.forward(std::span<const double>(bot), b);
        for (int k = 0; k < n; ++k) {
            const double xi = g.frequency(k);
            const double kx = kappa * xi * xi;
            const auto ph = a[k], vh = b[k];
            a[k] = -kx * (ph + alpha * vh);
            b[k] = -kx * (-alpha * ph + vh);
        }
        tr.inverse(a, top);
        tr.inverse(b, bot);
        for (int j = 0; j < n; ++j) {
            e[j] -= top[j];
            e[n + j] -= bot[j];
        }
        return e;
    };

    std::vector<double> errs;
    for (double dt : {2e-3, 1e-3, 5e-4}) {
        Eigen::VectorXd u1 = semigroup_action(l0, dt, u0);  // exact history
        Eigen::VectorXd b =
            2.0 * u1 - 0.5 * u0 + dt * (2.0 * explicit_part(u1) - explicit_part(u0));
        Eigen::VectorXd u2 = implicit_solve(dt, b, 1.5);
        errs.push_back((u2 - semigroup_action(l0, 2.0 * dt, u0)).norm());
    }
    CHECK(errs[0] / errs[1] > 6.0);  // ~8 for second-order local pair
    CHECK(errs[1] / errs[2] > 6.0);
}

TEST_CASE("BDF2 self-convergence on a forced run") {
    DynamicsContext ctx(coarse_wall());
    const Grid& g = ctx.grid();
    ForcingModel forcing = ForcingModel::sine(1.0, 0.02, 0.0);
    auto run = [&](double dt) {
        IntegratorConfig cfg;
        cfg.dt = dt;
        Stepper st(ctx, cfg, forcing);
        st.reset(State(g));
        const long steps = std::lround(1.0 / dt);
        for (long s = 0; s < steps; ++s) st.advance();
        return stack_fields(st.state().phi, st.state().vartheta);
    };
    Eigen::VectorXd a = run(1.0 / 500), b = run(1.0 / 1000), c = run(1.0 / 2000);
    const double e1 = (a - b).norm(), e2 = (b - c).norm();
    CHECK(std::log2(e1 / e2) >= 1.9);
}

TEST_CASE("evolve: stationarity, drift direction, decay to a translate") {
    DynamicsContext ctx(coarse_wall());
    const Grid& g = ctx.grid();
    IntegratorConfig cfg;
    cfg.dt = 1e-3;

    // stationary wall stays put over t = 10
    auto flat = evolve(ctx, State(g), 10.0, ForcingModel::zero(1.0), cfg, 3);
    CHECK_FALSE(flat.validity_exit);
    const auto& last = flat.snapshots.back();
    CHECK(std::sqrt(inner_product(last.phi, last.phi) +
                    inner_product(last.vartheta, last.vartheta)) < 1e-10);

    // constant gamma drives a monotone drift along the translation mode
    ForcingModel gamma_only = ForcingModel::zero(1.0);
    gamma_only.set_gamma(0.01);
    auto drift = evolve(ctx, State(g), 2.0, gamma_only, cfg, 3, 100);
    const auto& series = drift.diagnostics.kernel_drift;
    REQUIRE(series.size() >= 5u);
    for (std::size_t i = 1; i < series.size(); ++i) CHECK(series[i] > series[i - 1]);
    CHECK(series.back() > 0.0);

    // small perpendicular perturbation decays toward a translate of the wall
    Rng rng(19);
    State s(g);
    RealField u = testsupport::random_smooth_field(g, rng, 6);
    const double c = inner_product(u, ctx.theta_wall_prime()) /
                     inner_product(ctx.theta_wall_prime(), ctx.theta_wall_prime());
    for (int j = 0; j < g.size(); ++j) s.vartheta[j] = 0.01 * (u[j] - c * ctx.theta_wall_prime()[j]);
    auto traj = evolve(ctx, s, 10.0, ForcingModel::zero(1.0), cfg, 3);
    auto dist_to_family = [&](const TrajectorySample& snap) {
        const double a = inner_product(snap.vartheta, ctx.theta_wall_prime()) /
                         inner_product(ctx.theta_wall_prime(), ctx.theta_wall_prime());
        double acc = 0.0;
        for (int j = 0; j < g.size(); ++j) {
            const double d = snap.vartheta[j] - a * ctx.theta_wall_prime()[j];
            acc += d * d + snap.phi[j] * snap.phi[j];
        }
        return std::sqrt(g.spacing() * acc);
    };
    CHECK(dist_to_family(traj.snapshots.back()) < 0.1 * dist_to_family(traj.snapshots.front()));
}

TEST_CASE("phi stays zero without precession, energy decays in-plane") {
    SolverOptions o;
    o.newton_tol = 1e-12;
    auto wall = solve_wall(RescaledParameters{1.0, 0.1, 0.0}, Grid(60.0, 256), o);
    DynamicsContext ctx(wall);
    const Grid& g = ctx.grid();
    IntegratorConfig cfg;
    cfg.dt = 1e-3;

    // alpha = 0, scalar field, phi0 = 0: every R1 term carries alpha or phi
    ForcingModel forced = ForcingModel::sine(1.0, 0.05, 0.0);
    Rng rng(23);
    State s(g);
    RealField u = testsupport::random_smooth_field(g, rng, 6);
    for (int j = 0; j < g.size(); ++j) s.vartheta[j] = 0.05 * u[j];
    auto traj = evolve(ctx, s, 1.0, forced, cfg, 3);
    CHECK(max_abs(traj.snapshots.back().phi) < 1e-12);

    // unforced in-plane flow: energy is non-increasing
    auto relax = evolve(ctx, s, 2.0, ForcingModel::zero(1.0), cfg, 3, 200);
    const auto& energy = relax.diagnostics.energy_total;
    for (std::size_t i = 1; i < energy.size(); ++i) CHECK(energy[i] <= energy[i - 1] + 1e-12);
}

TEST_CASE("dealiased stray arguments converge to the plain route under refinement") {
    // the two evaluations differ by the fold-back of the product spectra
    // beyond the cutoff, so the gap must collapse as the grid refines
    ForcingModel zero = ForcingModel::zero(1.0);
    SolverOptions o;
    o.newton_tol = 1e-12;
    auto gap_at = [&](int n) {
        auto wall = solve_wall(kDefault, Grid(60.0, n), o);
        DynamicsContext ctx(wall);
        const Grid& g = ctx.grid();
        Rng rng(37);
        State s(g);
        RealField a = testsupport::random_smooth_field(g, rng, 6);
        RealField b = testsupport::random_smooth_field(g, rng, 6);
        for (int j = 0; j < n; ++j) {
            s.phi[j] = 0.05 * a[j];
            s.vartheta[j] = 0.05 * b[j];
        }
        auto [p1, p2] = rhs(ctx, s, zero, M_PI / 4.0, false);
        auto [d1, d2] = rhs(ctx, s, zero, M_PI / 4.0, true);
        double worst = 0.0;
        for (int j = 0; j < n; ++j)
            worst = std::max({worst, std::abs(p1[j] - d1[j]), std::abs(p2[j] - d2[j])});
        return worst;
    };
    const double coarse = gap_at(256);
    const double fine = gap_at(1024);
    CHECK(coarse < 1e-3);
    CHECK(fine < 0.1 * coarse);

    // and the stepper runs with the flag on
    auto wall = solve_wall(kDefault, Grid(60.0, 256), o);
    DynamicsContext ctx(wall);
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.dealias = true;
    Rng rng(39);
    Stepper st(ctx, cfg, zero);
    st.reset(small_state(ctx.grid(), rng, 0.02));
    for (int i = 0; i < 10; ++i) st.advance();
    CHECK(std::isfinite(max_abs(st.state().vartheta)));
}

TEST_CASE("Euler scheme integrates end to end at first order") {
    DynamicsContext ctx(coarse_wall());
    const Grid& g = ctx.grid();
    ForcingModel forcing = ForcingModel::sine(1.0, 0.02, 0.0);
    auto run = [&](long steps) {
        IntegratorConfig cfg;
        cfg.dt = 1.0 / steps;
        cfg.scheme = Scheme::imex_euler;
        Stepper st(ctx, cfg, forcing);
        st.reset(State(g));
        for (long s = 0; s < steps; ++s) st.advance();
        return stack_fields(st.state().phi, st.state().vartheta);
    };
    Eigen::VectorXd a = run(250), b = run(500), c = run(1000);
    const double slope = std::log2((a - b).norm() / (b - c).norm());
    CHECK(slope > 0.9);
    CHECK(slope < 1.3);
}

TEST_CASE("space-dependent forcing reduces to the scalar case for flat rows") {
    DynamicsContext ctx(coarse_wall());
    const Grid& g = ctx.grid();
    const int n = g.size();
    Rng rng(41);
    State s = small_state(g, rng, 0.02);

    // h(t, x) = triangle(t), constant in x, must equal the scalar table
    std::vector<double> t{0.0, 0.5, 1.0}, h{0.0, 1.0, 0.0};
    std::vector<std::vector<double>> rows{std::vector<double>(n, 0.0),
                                          std::vector<double>(n, 1.0),
                                          std::vector<double>(n, 0.0)};
    auto scalar = ForcingModel::tabulated(1.0, t, h, 0.02, 0.003);
    auto spatial = ForcingModel::tabulated_space(1.0, t, rows, 0.02, 0.003);
    s.time = 0.31;
    auto [a1, a2] = rhs(ctx, s, scalar);
    auto [b1, b2] = rhs(ctx, s, spatial);
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
        worst = std::max({worst, std::abs(a1[j] - b1[j]), std::abs(a2[j] - b2[j])});
    CHECK(worst == 0.0);
}

TEST_CASE("evolve flags instability as a validity exit") {
    DynamicsContext ctx(coarse_wall());
    const Grid& g = ctx.grid();
    IntegratorConfig cfg;
    cfg.dt = 0.5;  // grossly oversized for the explicit terms
    Rng rng(29);
    State s = small_state(g, rng, 0.05);
    auto traj = evolve(ctx, s, 50.0, ForcingModel::zero(1.0), cfg, 3);
    CHECK(traj.validity_exit);
    CHECK(traj.exit_time > 0.0);
}

TEST_CASE("evolve rejects t_final that is not a step multiple") {
    DynamicsContext ctx(coarse_wall());
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    CHECK_THROWS_AS(evolve(ctx, State(ctx.grid()), 0.0105, ForcingModel::zero(1.0), cfg),
                    InvalidParameter);
}
