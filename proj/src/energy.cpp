#include "neelwall/energy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace neel {

double theta_ref(double x) { return std::asin(std::tanh(x)); }

double theta_ref_prime(double x) {
    const double e = std::exp(-std::abs(x));
    return 2.0 * e / (1.0 + e * e);  // sech, overflow-safe
}

double theta_ref_second(double x) { return -theta_ref_prime(x) * std::tanh(x); }

ReferenceTrig::ReferenceTrig(double half_length, int n_nodes, double scale)
    : cref(n_nodes), sref(n_nodes) {
    const double h = 2.0 * half_length / n_nodes;
    for (int j = 0; j < n_nodes; ++j) {
        const double r = scale * theta_ref(-half_length + h * j);
        cref[j] = std::cos(r);
        sref[j] = std::sin(r);
    }
    sref[0] = 0.0;  // periodic-interpolant midpoint across the seam jump
}

void ReferenceTrig::evaluate(std::span<const double> u, std::span<double> cos_out,
                             std::span<double> sin_out) const {
    for (std::size_t j = 0; j < cref.size(); ++j) {
        const double cu = std::cos(u[j]), su = std::sin(u[j]);
        cos_out[j] = cref[j] * cu - sref[j] * su;
        sin_out[j] = sref[j] * cu + cref[j] * su;
    }
}

namespace {
constexpr double kHalfPi = M_PI / 2.0;

double clamp_angle(double t) { return std::clamp(t, -kHalfPi, kHalfPi); }

// theta_ref'' sampled on the grid; the tanh factor jumps across the seam, so
// the seam node takes the interpolant midpoint 0 (keeps the residual odd).
double ref_second_sample(const Grid& g, int j) {
    return j == 0 ? 0.0 : theta_ref_second(g.node(j));
}

// Everything el_residual and energy need from one profile evaluation. The
// stray field acts on the plain grid samples of cos(theta): with the
// multiplier applied on the same grid the residual is exactly the gradient
// of the discrete energy and its linearization is exactly symmetric.
struct ProfileEval {
    RealField w;            // decaying part
    RealField theta_prime;  // w' + scale * sech
    RealField cos_theta;    // seam-consistent trig on the grid
    RealField sin_theta;
    RealField stray;        // (1/eps) S_eps[cos theta]

    ProfileEval(const PhaseProfile& profile, const StrayFieldOperator& op)
        : w(profile.decaying_part()),
          theta_prime(spectral::derivative(w)),
          cos_theta(profile.grid()),
          sin_theta(profile.grid()),
          stray(profile.grid()) {
        const Grid& g = profile.grid();
        const int n = g.size();
        const double scale = profile.reference_scale();
        ReferenceTrig trig(g.half_length(), n, scale);
        trig.evaluate(w.values(), cos_theta.values(), sin_theta.values());
        for (int j = 0; j < n; ++j) theta_prime[j] += scale * theta_ref_prime(g.node(j));
        stray = op.apply(cos_theta);
    }
};
} // namespace

PhaseProfile::PhaseProfile(const Grid& grid, std::vector<double> theta)
    : theta_(grid, std::move(theta)) {
    for (int j = 0; j < grid.size(); ++j) {
        if (std::abs(theta_[j]) > kHalfPi + 1e-9)
            throw InvalidParameter("phase profile leaves [-pi/2, pi/2]");
        theta_[j] = clamp_angle(theta_[j]);
    }
    // Boundary convention decides the decomposition.
    const double edge = std::abs(theta_[0]);
    if (edge > kHalfPi - 0.5) {
        ref_scale_ = 1.0;
    } else if (edge < 0.5) {
        ref_scale_ = 0.0;
    } else {
        throw InvalidParameter("phase profile matches neither the wall (+-pi/2) nor a "
                               "decaying boundary convention");
    }
}

PhaseProfile PhaseProfile::reference(const Grid& grid) {
    RealField t(grid);
    for (int j = 0; j < grid.size(); ++j) t[j] = theta_ref(grid.node(j));
    return PhaseProfile(std::move(t), 1.0);
}

PhaseProfile PhaseProfile::from_decaying_part(const RealField& w) {
    const Grid& g = w.grid();
    RealField t(g);
    for (int j = 0; j < g.size(); ++j) t[j] = theta_ref(g.node(j)) + w[j];
    return PhaseProfile(std::move(t), 1.0);
}

RealField PhaseProfile::decaying_part() const {
    const Grid& g = grid();
    RealField w(g);
    if (ref_scale_ == 0.0) {
        for (int j = 0; j < g.size(); ++j) w[j] = theta_[j];
    } else {
        for (int j = 0; j < g.size(); ++j) w[j] = theta_[j] - theta_ref(g.node(j));
    }
    return w;
}

EnergyTerms energy(const PhaseProfile& profile, const RescaledParameters& params) {
    params.validate();
    StrayFieldOperator op(profile.grid(), params.epsilon);
    ProfileEval ev(profile, op);
    EnergyTerms terms;
    terms.exchange = params.kappa * inner_product(ev.theta_prime, ev.theta_prime);
    terms.anisotropy = inner_product(ev.cos_theta, ev.cos_theta);
    terms.stray = inner_product(ev.stray, ev.cos_theta);
    return terms;
}

namespace {
RealField residual_from_eval(const PhaseProfile& profile, const RescaledParameters& params,
                             const ProfileEval& ev) {
    const Grid& g = profile.grid();
    const double scale = profile.reference_scale();
    RealField res = spectral::second_derivative(ev.w);
    for (int j = 0; j < g.size(); ++j) {
        res[j] = params.kappa * (res[j] + scale * ref_second_sample(g, j)) +
                 ev.sin_theta[j] * (ev.cos_theta[j] + ev.stray[j]);
    }
    return res;
}
} // namespace

RealField el_residual(const PhaseProfile& profile, const RescaledParameters& params) {
    params.validate();
    StrayFieldOperator op(profile.grid(), params.epsilon);
    ProfileEval ev(profile, op);
    return residual_from_eval(profile, params, ev);
}

RealField odd_projection(const RealField& u) {
    const int n = u.size();
    RealField out(u.grid());
    out[0] = 0.0;
    out[n / 2] = 0.0;
    for (int j = 1; j < n / 2; ++j) {
        const double v = 0.5 * (u[n - j] - u[j]);
        out[n - j] = v;   // node at +|x|
        out[j] = -v;      // mirror at -|x|
    }
    return out;
}

namespace {

// First column of the circulant matrix realizing a real even Fourier
// multiplier on the grid.
std::vector<double> circulant_column(const Grid& g, const std::vector<double>& mult) {
    const int n = g.size();
    std::vector<spectral::Complex> spec(n);
    for (int k = 0; k < n; ++k) spec[k] = mult[k];
    std::vector<double> col;
    spectral::transform_for(n).inverse(spec, col);
    return col;
}

struct WallWorkspace {
    Grid grid;
    RescaledParameters params;
    StrayFieldOperator op;
    std::vector<double> lap_col;    // circulant column of the spectral Laplacian
    std::vector<double> stray_col;  // circulant column of (1/eps) S_eps

    WallWorkspace(const Grid& g, const RescaledParameters& p)
        : grid(g), params(p), op(g, p.epsilon) {
        std::vector<double> lap(g.size());
        for (int k = 0; k < g.size(); ++k) {
            const double xi = g.frequency(k);
            lap[k] = -xi * xi;
        }
        lap_col = circulant_column(g, lap);
        stray_col = circulant_column(g, op.effective_multiplier());
    }
};

// Dense Jacobian of the residual restricted to odd fields, parameterized by
// the interior nodes p = N/2+1 .. N-1: the exact linearization
//   v -> kappa v'' + cos(2 theta) v + stray_diag v - sin(theta) S[sin(theta) v]
// with stray_diag = (1/eps) S_eps[cos theta] cos theta. Mirror symmetry of
// the circulant kernels folds the odd extension into index differences.
Eigen::MatrixXd odd_jacobian(const WallWorkspace& ws, const ProfileEval& ev) {
    const int n = ws.grid.size();
    const int m = n / 2 - 1;
    Eigen::MatrixXd J(m, m);
    std::vector<double> diag(n);
    for (int j = 0; j < n; ++j) {
        const double c = ev.cos_theta[j], s = ev.sin_theta[j];
        diag[j] = (c * c - s * s) + ev.stray[j] * ev.cos_theta[j];
    }
    for (int a = 0; a < m; ++a) {
        const int i = n / 2 + 1 + a;
        const double si = ev.sin_theta[i];
        for (int b = 0; b < m; ++b) {
            const int p = n / 2 + 1 + b;
            const int d1 = (i - p + n) % n;
            const int d2 = (i - (n - p) + n) % n;
            double entry = ws.params.kappa * (ws.lap_col[d1] - ws.lap_col[d2]) -
                           si * ev.sin_theta[p] * (ws.stray_col[d1] + ws.stray_col[d2]);
            if (i == p) entry += diag[i];
            J(a, b) = entry;
        }
    }
    return J;
}

RealField odd_extend(const Grid& g, const Eigen::VectorXd& interior) {
    const int n = g.size();
    RealField u(g);
    for (int b = 0; b < n / 2 - 1; ++b) {
        const int p = n / 2 + 1 + b;
        u[p] = interior[b];
        u[n - p] = -interior[b];
    }
    return u;
}

// Pull theta = theta_ref + w back into [-pi/2, pi/2] (solver iterates only).
void clamp_iterate(const Grid& g, RealField& w) {
    for (int j = 0; j < g.size(); ++j) {
        const double ref = theta_ref(g.node(j));
        w[j] = clamp_angle(ref + w[j]) - ref;
    }
}

} // namespace

WallProfile solve_wall(const RescaledParameters& params, const Grid& grid,
                       const SolverOptions& options) {
    params.validate();
    WallWorkspace ws(grid, params);
    const int n = grid.size();

    RealField w(grid);  // start from the reference profile
    auto profile_of = [&](const RealField& wf) { return PhaseProfile::from_decaying_part(wf); };

    auto eval_energy = [&](const PhaseProfile& pr) {
        ProfileEval ev(pr, ws.op);
        EnergyTerms t;
        t.exchange = params.kappa * inner_product(ev.theta_prime, ev.theta_prime);
        t.anisotropy = inner_product(ev.cos_theta, ev.cos_theta);
        t.stray = inner_product(ev.stray, ev.cos_theta);
        return t.total();
    };

    // Phase 1: descent on w with odd projection, preconditioned by
    // (1 + kappa xi^2)^{-1}; Armijo backtracking on the energy.
    PhaseProfile profile = profile_of(w);
    double E = eval_energy(profile);
    RealField residual = el_residual(profile, params);
    double res_norm = norm(residual);
    int grad_iters = 0;
    double step = 1.0;
    while (res_norm > options.grad_flow_tol && grad_iters < options.max_grad_steps) {
        RealField gdir = odd_projection(residual);
        auto spec = spectral::forward(gdir);
        for (int k = 0; k < n; ++k) {
            const double xi = grid.frequency(k);
            spec[k] /= 1.0 + params.kappa * xi * xi;
        }
        RealField dir = spectral::inverse(grid, spec);
        const double slope = 2.0 * inner_product(gdir, dir);  // -dE/ds at s=0
        if (!(slope > 0.0)) break;  // numerically flat; hand over to Newton

        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            RealField w_try(grid);
            for (int j = 0; j < n; ++j) w_try[j] = w[j] + step * dir[j];
            w_try = odd_projection(w_try);
            clamp_iterate(grid, w_try);
            PhaseProfile trial = profile_of(w_try);
            const double E_try = eval_energy(trial);
            if (E_try <= E - options.armijo * step * slope) {
                w = trial.decaying_part();
                profile = std::move(trial);
                E = E_try;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        step = std::min(step * 1.5, 8.0);
        residual = el_residual(profile, params);
        res_norm = norm(residual);
        ++grad_iters;
    }

    // Phase 2: damped Newton on the odd interior nodes. The kernel direction
    // theta' is even, so the odd restriction of the linearization is
    // invertible.
    int newton_iters = 0;
    int polish_left = options.newton_polish_steps;
    while (newton_iters < options.max_newton_steps) {
        if (res_norm <= options.newton_tol) {
            if (polish_left == 0) break;
            --polish_left;
        }
        ProfileEval ev(profile, ws.op);
        Eigen::MatrixXd J = odd_jacobian(ws, ev);
        Eigen::VectorXd rhs(n / 2 - 1);
        for (int b = 0; b < n / 2 - 1; ++b) rhs[b] = -residual[n / 2 + 1 + b];
        Eigen::VectorXd delta = J.partialPivLu().solve(rhs);

        double damping = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings <= 8; ++halvings) {
            RealField upd = odd_extend(grid, damping * delta);
            RealField w_try(grid);
            for (int j = 0; j < n; ++j) w_try[j] = w[j] + upd[j];
            w_try = odd_projection(w_try);
            clamp_iterate(grid, w_try);
            PhaseProfile trial = profile_of(w_try);
            RealField res_try = el_residual(trial, params);
            const double rn = norm(res_try);
            if (rn < res_norm) {
                w = trial.decaying_part();
                profile = std::move(trial);
                residual = std::move(res_try);
                res_norm = rn;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        ++newton_iters;
        if (!accepted) {
            if (res_norm <= options.newton_tol) break;  // at the rounding floor
            throw SolverFailure("wall Newton iteration stalled", res_norm);
        }
    }
    if (res_norm > options.newton_tol)
        throw SolverFailure("wall solve did not reach the residual target", res_norm);

    ProfileEval ev(profile, ws.op);
    RealField second = spectral::second_derivative(ev.w);
    for (int j = 0; j < n; ++j) second[j] += ref_second_sample(grid, j);

    WallProfile wall{profile,
                     ev.theta_prime,
                     std::move(second),
                     params,
                     EnergyTerms{params.kappa * inner_product(ev.theta_prime, ev.theta_prime),
                                 inner_product(ev.cos_theta, ev.cos_theta),
                                 inner_product(ev.stray, ev.cos_theta)},
                     res_norm,
                     0.0,
                     grad_iters,
                     newton_iters,
                     std::nullopt};

    // Tail diagnostic over |x| >= L/2. The periodic-odd closure pins
    // cos(theta) to ~0 at +-L itself, so the boundary sample says nothing;
    // what measures truncation is how much wall tail is still alive in the
    // outer half of the domain.
    double tail = 0.0;
    for (int j = 0; j < n / 4; ++j) {
        tail = std::max(tail, std::abs(ev.cos_theta[j]));
        tail = std::max(tail, std::abs(ev.cos_theta[n - 1 - j]));
    }
    wall.tail_value = tail;
    if (tail > options.tail_warning)
        wall.warning = "domain too small: |cos theta| = " + std::to_string(tail) +
                       " near the boundary";
    return wall;
}

} // namespace neel
