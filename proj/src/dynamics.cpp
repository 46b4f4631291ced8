#include "neelwall/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace neel {

ForcingModel ForcingModel::zero(double period) {
    ForcingModel f;
    f.kind_ = ForcingKind::zero;
    f.period_ = period;
    return f;
}

ForcingModel ForcingModel::sine(double period, double lambda, double gamma) {
    if (!(period > 0.0)) throw InvalidParameter("forcing period must be positive");
    ForcingModel f;
    f.kind_ = ForcingKind::sine;
    f.period_ = period;
    f.lambda_ = lambda;
    f.gamma_ = gamma;
    return f;
}

ForcingModel ForcingModel::cosine(double period, double lambda, double gamma) {
    ForcingModel f = sine(period, lambda, gamma);
    f.kind_ = ForcingKind::cosine;
    return f;
}

namespace {
void check_table_times(const std::vector<double>& t, double period) {
    if (t.size() < 2) throw InvalidParameter("tabulated forcing needs at least two samples");
    if (t.front() != 0.0 || std::abs(t.back() - period) > 1e-12 * period)
        throw InvalidParameter("tabulated forcing must span [0, T]");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw InvalidParameter("tabulated times must increase");
}
} // namespace

ForcingModel ForcingModel::tabulated(double period, std::vector<double> t, std::vector<double> h,
                                     double lambda, double gamma) {
    if (!(period > 0.0)) throw InvalidParameter("forcing period must be positive");
    if (t.size() != h.size())
        throw InvalidParameter("tabulated forcing needs matching (t, h) samples");
    check_table_times(t, period);
    if (h.front() != h.back())
        throw InvalidParameter("tabulated forcing must be periodic: h(0) == h(T)");
    ForcingModel f;
    f.kind_ = ForcingKind::tabulated;
    f.period_ = period;
    f.lambda_ = lambda;
    f.gamma_ = gamma;
    f.times_ = std::move(t);
    f.values_ = std::move(h);
    return f;
}

ForcingModel ForcingModel::tabulated_space(double period, std::vector<double> t,
                                           std::vector<std::vector<double>> rows, double lambda,
                                           double gamma) {
    if (!(period > 0.0)) throw InvalidParameter("forcing period must be positive");
    if (t.size() != rows.size())
        throw InvalidParameter("tabulated forcing needs one row per time sample");
    check_table_times(t, period);
    for (const auto& r : rows)
        if (r.size() != rows.front().size() || r.empty())
            throw InvalidParameter("tabulated rows must share one length");
    if (rows.front() != rows.back())
        throw InvalidParameter("tabulated forcing must be periodic: h(0,.) == h(T,.)");
    ForcingModel f;
    f.kind_ = ForcingKind::tabulated_space;
    f.period_ = period;
    f.lambda_ = lambda;
    f.gamma_ = gamma;
    f.times_ = std::move(t);
    f.rows_ = std::move(rows);
    return f;
}

ForcingModel::Bracket ForcingModel::bracket(double t) const {
    double s = std::fmod(t, period_);
    if (s < 0.0) s += period_;
    auto it = std::upper_bound(times_.begin(), times_.end(), s);
    if (it == times_.begin()) return {0, 0.0};
    if (it == times_.end()) return {times_.size() - 2, 1.0};
    const std::size_t i = static_cast<std::size_t>(it - times_.begin());
    return {i - 1, (s - times_[i - 1]) / (times_[i] - times_[i - 1])};
}

double ForcingModel::waveform(double t) const {
    switch (kind_) {
        case ForcingKind::zero: return 0.0;
        case ForcingKind::sine: return std::sin(2.0 * M_PI * t / period_);
        case ForcingKind::cosine: return std::cos(2.0 * M_PI * t / period_);
        case ForcingKind::tabulated: {
            const Bracket b = bracket(t);
            return (1.0 - b.weight) * values_[b.left] + b.weight * values_[b.left + 1];
        }
        case ForcingKind::tabulated_space:
            throw InvalidParameter("space-dependent forcing has no scalar waveform");
    }
    return 0.0;
}

void ForcingModel::field_at(double t, std::vector<double>& out) const {
    if (!space_dependent()) throw InvalidParameter("forcing is not space-dependent");
    const Bracket b = bracket(t);
    const auto& lo = rows_[b.left];
    const auto& hi = rows_[b.left + 1];
    out.resize(lo.size());
    for (std::size_t j = 0; j < lo.size(); ++j)
        out[j] = lambda_ * ((1.0 - b.weight) * lo[j] + b.weight * hi[j]) + gamma_;
}

DynamicsContext::DynamicsContext(const WallProfile& wall)
    : wall_(wall),
      grid_(wall.grid()),
      params_(wall.params),
      stray_(grid_, wall.params.epsilon),
      wall_w_(wall_.profile.decaying_part()),
      wall_w_fine_(spectral::refine_samples(wall_w_)),
      trig_(grid_.half_length(), grid_.size(), wall_.profile.reference_scale()),
      trig_fine_(grid_.half_length(), 2 * grid_.size(), wall_.profile.reference_scale()) {}

std::pair<RealField, RealField> rhs(const DynamicsContext& ctx, const State& state,
                                    const ForcingModel& forcing, double max_phi, bool dealias) {
    const Grid& g = ctx.grid();
    if (state.grid() != g) throw DimensionMismatch("state grid does not match context");
    const int n = g.size();
    const RescaledParameters& p = ctx.params();
    const double eps = p.epsilon, kappa = p.kappa, alpha = p.alpha;

    if (max_abs(state.phi) > max_phi)
        throw ValidityExit("out-of-plane angle left the validity region |phi| <= " +
                               std::to_string(max_phi),
                           state.time);

    // Spectral derivatives of both unknowns.
    auto& tr = spectral::transform_for(n);
    std::vector<spectral::Complex> phi_hat, vth_hat, tmp(n);
    tr.forward(state.phi.values(), phi_hat);
    tr.forward(state.vartheta.values(), vth_hat);

    std::vector<double> phi_x, phi_xx, vth_x, vth_xx;
    auto derive = [&](const std::vector<spectral::Complex>& spec, std::vector<double>& d1,
                      std::vector<double>& d2) {
        for (int k = 0; k < n; ++k) {
            const double xi = g.frequency(k);
            tmp[k] = (k == n / 2) ? 0.0 : spec[k] * spectral::Complex(0.0, xi);
        }
        tr.inverse(tmp, d1);
        for (int k = 0; k < n; ++k) {
            const double xi = g.frequency(k);
            tmp[k] = spec[k] * (-xi * xi);
        }
        tr.inverse(tmp, d2);
    };
    derive(phi_hat, phi_x, phi_xx);
    derive(vth_hat, vth_x, vth_xx);

    // Seam-consistent trig of theta on the grid.
    std::vector<double> u(n), ct_arr(n), st_arr(n);
    for (int j = 0; j < n; ++j) u[j] = ctx.wall_decaying()[j] + state.vartheta[j];
    ctx.trig().evaluate(u, ct_arr, st_arr);

    // Stray-field arguments sin(phi) and cos(phi)cos(theta).
    RealField stray_sin_phi(g), stray_cc(g);
    if (dealias) {
        auto& tr2 = spectral::transform_for(2 * n);
        std::vector<double> phi_fine, vth_fine;
        tr2.inverse(spectral::pad_spectrum(phi_hat), phi_fine);
        tr2.inverse(spectral::pad_spectrum(vth_hat), vth_fine);
        const auto& w_fine = ctx.wall_decaying_refined();
        std::vector<double> sin_phi_fine(2 * n), cc_fine(2 * n), st_fine(2 * n);
        for (int j = 0; j < 2 * n; ++j) vth_fine[j] += w_fine[j];  // u = w + vartheta
        ctx.trig_refined().evaluate(vth_fine, cc_fine, st_fine);
        for (int j = 0; j < 2 * n; ++j) {
            sin_phi_fine[j] = std::sin(phi_fine[j]);
            cc_fine[j] *= std::cos(phi_fine[j]);
        }
        stray_sin_phi = ctx.stray().apply_refined(sin_phi_fine);
        stray_cc = ctx.stray().apply_refined(cc_fine);
    } else {
        RealField sp(g), cc(g);
        for (int j = 0; j < n; ++j) {
            sp[j] = std::sin(state.phi[j]);
            cc[j] = std::cos(state.phi[j]) * ct_arr[j];
        }
        stray_sin_phi = ctx.stray().apply(sp);
        stray_cc = ctx.stray().apply(cc);
    }

    const bool spatial = forcing.space_dependent();
    double h_scalar = 0.0;
    std::vector<double> h_field;
    if (spatial) {
        if (forcing.space_size() != n)
            throw DimensionMismatch("space-dependent forcing rows do not match the grid");
        forcing.field_at(state.time, h_field);
    } else {
        h_scalar = forcing.scalar_at(state.time);
    }

    RealField r1(g), r2(g);
    const auto& theta_w_x = ctx.theta_wall_prime();
    const auto& theta_w_xx = ctx.theta_wall_second();
    for (int j = 0; j < n; ++j) {
        const double phi = state.phi[j];
        const double tx = theta_w_x[j] + vth_x[j];
        const double txx = theta_w_xx[j] + vth_xx[j];
        const double sp = std::sin(phi), cp = std::cos(phi);
        const double sec = 1.0 / cp, tan = sp / cp;
        const double st = st_arr[j], ct = ct_arr[j];
        const double s2t = 2.0 * st * ct, c2t = ct * ct - st * st;
        const double h = spatial ? h_field[j] : h_scalar;
        const double As = stray_sin_phi[j], Ac = stray_cc[j];

        r1[j] = (alpha / eps) * h * ct + As * cp + Ac * sp * ct + alpha * Ac * st -
                (1.0 / eps) * h * sp * st - 2.0 * alpha * kappa * sp * phi_x[j] * tx +
                (0.5 * sp * cp / eps) *
                    (-2.0 - eps + eps * c2t + 2.0 * eps * kappa * tx * tx) +
                kappa * phi_xx[j] + 0.5 * alpha * cp * s2t + alpha * kappa * cp * txx;

        r2[j] = -alpha * As + (1.0 / eps) * h * ct * sec +
                (0.5 * alpha / eps) * sp * (2.0 + eps - eps * c2t) + 0.5 * s2t +
                (alpha / eps) * h * tan * st + Ac * sec * st - alpha * Ac * tan * ct -
                2.0 * kappa * tan * phi_x[j] * tx - alpha * kappa * sp * tx * tx -
                alpha * kappa * sec * phi_xx[j] + kappa * txx;
    }
    return {std::move(r1), std::move(r2)};
}

Stepper::Stepper(const DynamicsContext& ctx, const IntegratorConfig& config,
                 const ForcingModel& forcing)
    : ctx_(ctx), config_(config), forcing_(forcing), state_(ctx.grid()) {
    config_.validate();
    refresh_spectrum();
}

void Stepper::reset(const State& initial) {
    state_ = initial;
    have_history_ = false;
    refresh_spectrum();
}

void Stepper::refresh_spectrum() {
    const int n = ctx_.grid().size();
    auto& tr = spectral::transform_for(n);
    std::vector<spectral::Complex> a, b;
    tr.forward(state_.phi.values(), a);
    tr.forward(state_.vartheta.values(), b);
    state_spec_.resize(2 * n);
    std::copy(a.begin(), a.end(), state_spec_.begin());
    std::copy(b.begin(), b.end(), state_spec_.begin() + n);
}

// Explicit part: full right-hand side minus the implicit leading block
// kappa(Delta, a Delta; -a Delta, Delta), assembled in Fourier space.
std::vector<spectral::Complex> Stepper::explicit_term(const State& s) const {
    const Grid& g = ctx_.grid();
    const int n = g.size();
    const double kappa = ctx_.params().kappa, alpha = ctx_.params().alpha;
    auto [r1, r2] = rhs(ctx_, s, forcing_, config_.max_phi, config_.dealias);
    auto& tr = spectral::transform_for(n);
    std::vector<spectral::Complex> r1h, r2h;
    tr.forward(r1.values(), r1h);
    tr.forward(r2.values(), r2h);
    std::vector<spectral::Complex> e(2 * n);
    for (int k = 0; k < n; ++k) {
        const double xi = g.frequency(k);
        const double kxi2 = kappa * xi * xi;
        const auto ph = state_spec_[k], vh = state_spec_[n + k];
        e[k] = r1h[k] + kxi2 * (ph + alpha * vh);
        e[n + k] = r2h[k] + kxi2 * (-alpha * ph + vh);
    }
    return e;
}

const State& Stepper::advance() {
    const Grid& g = ctx_.grid();
    const int n = g.size();
    const double dt = config_.dt;
    const double alpha = ctx_.params().alpha;
    auto e_now = explicit_term(state_);

    const bool bdf2 = config_.scheme == Scheme::imex_bdf2 && have_history_;
    std::vector<spectral::Complex> next(2 * n);
    for (int k = 0; k < n; ++k) {
        const double xi = g.frequency(k);
        const double a = dt * ctx_.params().kappa * xi * xi;
        spectral::Complex b1, b2;
        double lead;
        if (bdf2) {
            lead = 1.5 + a;
            b1 = 2.0 * state_spec_[k] - 0.5 * prev_state_spec_[k] +
                 dt * (2.0 * e_now[k] - prev_explicit_[k]);
            b2 = 2.0 * state_spec_[n + k] - 0.5 * prev_state_spec_[n + k] +
                 dt * (2.0 * e_now[n + k] - prev_explicit_[n + k]);
        } else {
            lead = 1.0 + a;
            b1 = state_spec_[k] + dt * e_now[k];
            b2 = state_spec_[n + k] + dt * e_now[n + k];
        }
        const double off = alpha * a;
        const double det = lead * lead + off * off;
        next[k] = (lead * b1 - off * b2) / det;
        next[n + k] = (off * b1 + lead * b2) / det;
    }

    prev_state_spec_ = std::move(state_spec_);
    prev_explicit_ = std::move(e_now);
    have_history_ = true;
    state_spec_ = std::move(next);

    auto& tr = spectral::transform_for(n);
    std::vector<double> vals;
    tr.inverse(std::span<const spectral::Complex>(state_spec_.data(), n), vals);
    for (double v : vals)
        if (!std::isfinite(v))
            throw ValidityExit("integration diverged", state_.time + dt);
    state_.phi = RealField(g, vals);
    tr.inverse(std::span<const spectral::Complex>(state_spec_.data() + n, n), vals);
    for (double v : vals)
        if (!std::isfinite(v))
            throw ValidityExit("integration diverged", state_.time + dt);
    state_.vartheta = RealField(g, std::move(vals));
    state_.time += dt;
    return state_;
}

namespace {
double dynamic_energy(const DynamicsContext& ctx, const RealField& vartheta) {
    const Grid& g = ctx.grid();
    const int n = g.size();
    RealField tx = spectral::derivative(vartheta);
    for (int j = 0; j < n; ++j) tx[j] += ctx.theta_wall_prime()[j];
    std::vector<double> u(n), ct_arr(n), st_arr(n);
    for (int j = 0; j < n; ++j) u[j] = ctx.wall_decaying()[j] + vartheta[j];
    ctx.trig().evaluate(u, ct_arr, st_arr);
    RealField ct(g, std::move(ct_arr));

    std::vector<double> u_fine;
    spectral::transform_for(2 * n).inverse(spectral::pad_spectrum(spectral::forward(vartheta)),
                                           u_fine);
    std::vector<double> cos_fine(2 * n), sin_fine(2 * n);
    for (int j = 0; j < 2 * n; ++j) u_fine[j] += ctx.wall_decaying_refined()[j];
    ctx.trig_refined().evaluate(u_fine, cos_fine, sin_fine);
    RealField stray = ctx.stray().apply_refined(cos_fine);
    return ctx.params().kappa * inner_product(tx, tx) + inner_product(ct, ct) +
           inner_product(stray, ct);
}
} // namespace

Trajectory evolve(const DynamicsContext& ctx, const State& initial, double t_final,
                  const ForcingModel& forcing, const IntegratorConfig& config,
                  int n_snapshots, int diagnostics_stride) {
    config.validate();
    if (!(t_final > 0.0)) throw InvalidParameter("t_final must be positive");
    const double steps_real = t_final / config.dt;
    const long n_steps = std::lround(steps_real);
    if (n_steps < 1 || std::abs(steps_real - n_steps) > 1e-8 * std::max(1.0, steps_real))
        throw InvalidParameter("t_final must be a multiple of dt");

    Trajectory out;
    std::vector<long> snap_steps;
    n_snapshots = std::max(2, n_snapshots);
    for (int i = 0; i < n_snapshots; ++i)
        snap_steps.push_back(std::lround(static_cast<double>(i) * n_steps / (n_snapshots - 1)));

    Stepper stepper(ctx, config, forcing);
    stepper.reset(initial);

    auto record_diag = [&](const State& s) {
        out.diagnostics.times.push_back(s.time);
        out.diagnostics.max_phi.push_back(max_abs(s.phi));
        out.diagnostics.energy_total.push_back(dynamic_energy(ctx, s.vartheta));
        out.diagnostics.kernel_drift.push_back(inner_product(s.vartheta, ctx.theta_wall_prime()));
        out.diagnostics.state_norm.push_back(
            std::sqrt(inner_product(s.phi, s.phi) + inner_product(s.vartheta, s.vartheta)));
    };

    std::size_t snap_idx = 0;
    auto maybe_snapshot = [&](long step, const State& s) {
        while (snap_idx < snap_steps.size() && snap_steps[snap_idx] == step) {
            out.snapshots.push_back(TrajectorySample{s.time, s.phi, s.vartheta});
            ++snap_idx;
        }
    };

    record_diag(initial);
    maybe_snapshot(0, initial);
    for (long step = 1; step <= n_steps; ++step) {
        try {
            stepper.advance();
        } catch (const ValidityExit& e) {
            out.validity_exit = true;
            out.exit_time = e.exit_time;
            return out;
        }
        if (step % diagnostics_stride == 0 || step == n_steps) record_diag(stepper.state());
        maybe_snapshot(step, stepper.state());
    }
    return out;
}

} // namespace neel
