//==============================================================================
// capi.cpp
// extern-C surface over the core library. Configuration documents are JSON;
// unknown keys are rejected so that typos fail loudly. All exceptions are
// mapped to status codes with a thread-local message.
//==============================================================================
#include "neelwall.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "json.hpp"
#include "neelwall/archive.hpp"
#include "neelwall/dynamics.hpp"
#include "neelwall/linops.hpp"
#include "neelwall/periodic.hpp"

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

thread_local std::string g_last_error;

nw_status to_status(const neel::Error& e) {
    using neel::ErrorCode;
    switch (e.code()) {
        case ErrorCode::invalid_parameter: return NW_ERR_INVALID_ARGUMENT;
        case ErrorCode::dimension_mismatch: return NW_ERR_DIMENSION;
        case ErrorCode::solver_failure: return NW_ERR_SOLVER_FAILURE;
        case ErrorCode::validity_exit: return NW_ERR_VALIDITY_EXIT;
        case ErrorCode::io_failure: return NW_ERR_IO;
        case ErrorCode::resource_limit: return NW_ERR_RESOURCE;
        case ErrorCode::numerical_failure: return NW_ERR_INTERNAL;
    }
    return NW_ERR_INTERNAL;
}

template <typename Fn>
nw_status guarded(Fn&& fn) {
    try {
        fn();
        return NW_OK;
    } catch (const neel::Error& e) {
        g_last_error = e.what();
        return to_status(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return NW_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// ---------------------------------------------------------------------------
// Configuration parsing
// ---------------------------------------------------------------------------

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw neel::InvalidParameter(std::string(where) + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw neel::InvalidParameter("unknown key '" + it.key() + "' in " + where);
    }
}

json parse_config(const char* text) {
    if (text == nullptr) throw neel::InvalidParameter("config must not be null");
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw neel::InvalidParameter("config is not valid JSON");
    check_keys(j, "config",
               {"parameters", "physical", "grid", "wall", "forcing", "evolve", "spectrum",
                "periodic", "output"});
    return j;
}

neel::RescaledParameters parse_parameters(const json& cfg) {
    if (cfg.contains("physical")) {
        if (cfg.contains("parameters"))
            throw neel::InvalidParameter("give either 'parameters' or 'physical', not both");
        const json& p = cfg["physical"];
        check_keys(p, "physical", {"d", "delta", "Q", "alpha"});
        neel::PhysicalParameters phys;
        phys.d = p.value("d", phys.d);
        phys.delta = p.value("delta", phys.delta);
        phys.Q = p.value("Q", phys.Q);
        phys.alpha = p.value("alpha", phys.alpha);
        return neel::rescale(phys);
    }
    neel::RescaledParameters out;
    if (cfg.contains("parameters")) {
        const json& p = cfg["parameters"];
        check_keys(p, "parameters", {"kappa", "epsilon", "alpha"});
        out.kappa = p.value("kappa", out.kappa);
        out.epsilon = p.value("epsilon", out.epsilon);
        out.alpha = p.value("alpha", out.alpha);
    }
    out.validate();
    return out;
}

neel::Grid parse_grid(const json& cfg) {
    double half_length = 200.0;
    int n = 4096;
    if (cfg.contains("grid")) {
        const json& g = cfg["grid"];
        check_keys(g, "grid", {"half_length", "n"});
        half_length = g.value("half_length", half_length);
        n = g.value("n", n);
    }
    return neel::Grid(half_length, n);
}

neel::SolverOptions parse_wall_options(const json& cfg) {
    neel::SolverOptions opt;
    if (cfg.contains("wall")) {
        const json& w = cfg["wall"];
        check_keys(w, "wall",
                   {"grad_flow_tol", "newton_tol", "max_grad_steps", "max_newton_steps",
                    "tail_warning"});
        opt.grad_flow_tol = w.value("grad_flow_tol", opt.grad_flow_tol);
        opt.newton_tol = w.value("newton_tol", opt.newton_tol);
        opt.max_grad_steps = w.value("max_grad_steps", opt.max_grad_steps);
        opt.max_newton_steps = w.value("max_newton_steps", opt.max_newton_steps);
        opt.tail_warning = w.value("tail_warning", opt.tail_warning);
    }
    return opt;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::vector<double>> read_csv_numeric(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw neel::IoFailure("cannot open forcing table '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        std::vector<double> row;
        bool numeric = true;
        for (const auto& c : cells) {
            if (c.empty()) continue;
            try {
                row.push_back(std::stod(c));
            } catch (...) {
                numeric = false;
                break;
            }
        }
        if (!numeric) continue;  // header row
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw neel::IoFailure("forcing table '" + path + "' holds no samples");
    return rows;
}

neel::ForcingModel parse_forcing(const json& cfg, const neel::Grid& grid) {
    double period = 1.0, lambda = 0.0, gamma = 0.0;
    std::string kind = "zero", table, space_table;
    if (cfg.contains("forcing")) {
        const json& f = cfg["forcing"];
        check_keys(f, "forcing", {"kind", "period", "lambda", "gamma", "table", "space_table"});
        kind = f.value("kind", kind);
        period = f.value("period", period);
        lambda = f.value("lambda", lambda);
        gamma = f.value("gamma", gamma);
        table = f.value("table", table);
        space_table = f.value("space_table", space_table);
    }
    if (kind == "zero") {
        auto out = neel::ForcingModel::zero(period);
        out.set_gamma(gamma);
        out.set_lambda(lambda);
        return out;
    }
    if (kind == "sine") return neel::ForcingModel::sine(period, lambda, gamma);
    if (kind == "cosine") return neel::ForcingModel::cosine(period, lambda, gamma);
    if (kind == "tabulated") {
        if (!space_table.empty()) {
            auto rows = read_csv_numeric(space_table);
            // first numeric row carries the x nodes
            if (rows.size() < 3)
                throw neel::InvalidParameter("space table needs x-row plus >= 2 time rows");
            const auto& xs = rows.front();
            if (static_cast<int>(xs.size()) != grid.size())
                throw neel::DimensionMismatch("space table x-row does not match the grid");
            for (int j = 0; j < grid.size(); ++j)
                if (std::abs(xs[j] - grid.node(j)) > 1e-9 * grid.half_length())
                    throw neel::InvalidParameter("space table x-nodes differ from grid nodes");
            std::vector<double> t;
            std::vector<std::vector<double>> values;
            for (std::size_t i = 1; i < rows.size(); ++i) {
                if (rows[i].size() != xs.size() + 1)
                    throw neel::InvalidParameter("space table row length mismatch");
                t.push_back(rows[i][0]);
                values.emplace_back(rows[i].begin() + 1, rows[i].end());
            }
            return neel::ForcingModel::tabulated_space(period, std::move(t), std::move(values),
                                                       lambda, gamma);
        }
        if (table.empty())
            throw neel::InvalidParameter("tabulated forcing needs 'table' or 'space_table'");
        auto rows = read_csv_numeric(table);
        std::vector<double> t, h;
        for (const auto& r : rows) {
            if (r.size() != 2) throw neel::InvalidParameter("forcing table must have 2 columns");
            t.push_back(r[0]);
            h.push_back(r[1]);
        }
        return neel::ForcingModel::tabulated(period, std::move(t), std::move(h), lambda, gamma);
    }
    throw neel::InvalidParameter("unknown forcing kind '" + kind + "'");
}

neel::Scheme parse_scheme(const std::string& s) {
    if (s == "bdf2") return neel::Scheme::imex_bdf2;
    if (s == "euler") return neel::Scheme::imex_euler;
    throw neel::InvalidParameter("unknown scheme '" + s + "' (euler | bdf2)");
}

} // namespace

// ---------------------------------------------------------------------------
// Handles
// ---------------------------------------------------------------------------

struct nw_wall {
    neel::WallProfile wall;
};

struct nw_trajectory {
    neel::Trajectory traj;
    neel::RealField theta_wall;
    neel::Grid grid;
};

struct nw_orbits {
    neel::OrbitArchive archive;
    std::unique_ptr<neel::PeriodicSolver> solver;  // built lazily for verification
};

extern "C" {

const char* nw_version(void) { return kVersion; }

const char* nw_last_error_message(void) { return g_last_error.c_str(); }

void nw_string_free(char* s) { delete[] s; }

nw_status nw_symbol(double xi, double epsilon, double* out) {
    if (out == nullptr) return NW_ERR_INVALID_ARGUMENT;
    return guarded([&] { *out = neel::symbol(xi, epsilon); });
}

nw_status nw_rescaled_symbol(double xi, double epsilon, double* out) {
    if (out == nullptr) return NW_ERR_INVALID_ARGUMENT;
    return guarded([&] { *out = neel::rescaled_symbol(xi, epsilon); });
}

nw_status nw_wall_solve(const char* config_json, nw_wall** out) {
    if (out == nullptr) return NW_ERR_INVALID_ARGUMENT;
    *out = nullptr;
    return guarded([&] {
        json cfg = parse_config(config_json);
        auto params = parse_parameters(cfg);
        auto grid = parse_grid(cfg);
        auto opts = parse_wall_options(cfg);
        *out = new nw_wall{neel::solve_wall(params, grid, opts)};
    });
}

nw_status nw_wall_load(const char* path, nw_wall** out) {
    if (out == nullptr || path == nullptr) return NW_ERR_INVALID_ARGUMENT;
    *out = nullptr;
    return guarded([&] { *out = new nw_wall{neel::load_wall(path)}; });
}

nw_status nw_wall_save(const nw_wall* wall, const char* path) {
    if (wall == nullptr || path == nullptr) return NW_ERR_INVALID_ARGUMENT;
    return guarded([&] { neel::save_wall(wall->wall, path); });
}

void nw_wall_free(nw_wall* wall) { delete wall; }

int nw_wall_grid_size(const nw_wall* wall) { return wall ? wall->wall.grid().size() : 0; }

double nw_wall_half_length(const nw_wall* wall) {
    return wall ? wall->wall.grid().half_length() : 0.0;
}

nw_status nw_wall_nodes(const nw_wall* wall, double* out) {
    if (wall == nullptr || out == nullptr) return NW_ERR_INVALID_ARGUMENT;
    for (int j = 0; j < wall->wall.grid().size(); ++j) out[j] = wall->wall.grid().node(j);
    return NW_OK;
}

nw_status nw_wall_theta(const nw_wall* wall, double* out) {
    if (wall == nullptr || out == nullptr) return NW_ERR_INVALID_ARGUMENT;
    const auto& t = wall->wall.profile.theta();
    for (int j = 0; j < t.size(); ++j) out[j] = t[j];
    return NW_OK;
}

nw_status nw_wall_theta_prime(const nw_wall* wall, double* out) {
    if (wall == nullptr || out == nullptr) return NW_ERR_INVALID_ARGUMENT;
    for (int j = 0; j < wall->wall.derivative.size(); ++j) out[j] = wall->wall.derivative[j];
    return NW_OK;
}

nw_status nw_wall_diagnostics(const nw_wall* wall, char** json_out) {
    if (wall == nullptr || json_out == nullptr) return NW_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const auto& w = wall->wall;
        json j;
        j["kappa"] = w.params.kappa;
        j["epsilon"] = w.params.epsilon;
        j["alpha"] = w.params.alpha;
        j["energy"] = {{"exchange", w.energy.exchange},
                       {"anisotropy", w.energy.anisotropy},
                       {"stray", w.energy.stray},
                       {"total", w.energy.total()}};
        j["el_residual_norm"] = w.el_residual_norm;
        j["tail_value"] = w.tail_value;
        j["grad_flow_iterations"] = w.grad_flow_iterations;
        j["newton_iterations"] = w.newton_iterations;
        if (w.warning) j["warning"] = *w.warning;
        *json_out = dup_string(j.dump(2));
    });
}

} // extern "C"

// ---------------------------------------------------------------------------
// Spectrum command
// ---------------------------------------------------------------------------

namespace {

json report_to_value(const neel::SpectrumReport& rep) {
    return json::parse(rep.to_json());
}

double kernel_pair_residual(const neel::LinearOperatorMatrix& l0, const neel::WallProfile& wall) {
    const neel::Grid& g = wall.grid();
    neel::RealField zero(g);
    Eigen::VectorXd v = neel::stack_fields(zero, wall.derivative);
    Eigen::VectorXd image = l0.apply(v);
    return std::sqrt(g.spacing() * image.squaredNorm()) / neel::norm(wall.derivative);
}

} // namespace

extern "C" nw_status nw_spectrum_run(const char* config_json, char** json_out) {
    if (json_out == nullptr) return NW_ERR_INVALID_ARGUMENT;
    *json_out = nullptr;
    return guarded([&] {
        json cfg = parse_config(config_json);
        auto params = parse_parameters(cfg);
        auto wall_opts = parse_wall_options(cfg);

        int coarse_n = 1024, l0_n = 512, trials = 100, bl_size = 50;
        unsigned long long seed = 7;
        double coarse_L = 130.0, l0_L = 60.0;
        std::vector<double> alphas{0.1, 0.5, 2.0};
        std::vector<double> bl_alphas{0.1, 1.0, 10.0};
        if (cfg.contains("spectrum")) {
            const json& s = cfg["spectrum"];
            check_keys(s, "spectrum",
                       {"coarse_n", "coarse_half_length", "l0_n", "l0_half_length", "alphas",
                        "block_lemma"});
            coarse_n = s.value("coarse_n", coarse_n);
            coarse_L = s.value("coarse_half_length", coarse_L);
            l0_n = s.value("l0_n", l0_n);
            l0_L = s.value("l0_half_length", l0_L);
            if (s.contains("alphas")) alphas = s["alphas"].get<std::vector<double>>();
            if (s.contains("block_lemma")) {
                const json& b = s["block_lemma"];
                check_keys(b, "block_lemma", {"trials", "size", "alphas", "seed"});
                trials = b.value("trials", trials);
                bl_size = b.value("size", bl_size);
                seed = b.value("seed", seed);
                if (b.contains("alphas")) bl_alphas = b["alphas"].get<std::vector<double>>();
            }
        }

        json out;
        out["parameters"] = {{"kappa", params.kappa},
                             {"epsilon", params.epsilon},
                             {"alpha", params.alpha}};
        bool all_pass = true;

        // L1 / L2 at the working coarse resolution (wall re-solved there).
        auto wall = neel::solve_wall(params, neel::Grid(coarse_L, coarse_n), wall_opts);
        out["grid"] = {{"half_length", coarse_L}, {"n", coarse_n}};
        out["wall"] = {{"el_residual_norm", wall.el_residual_norm},
                       {"tail_value", wall.tail_value}};

        auto l1 = neel::assemble_L1(wall);
        auto rep1 = neel::spectrum(l1);
        const double l1_max = rep1.eigenvalues.back().real();
        rep1.claims["all_eigenvalues_negative"] = l1_max < 0.0;
        all_pass &= rep1.claims["all_eigenvalues_negative"];
        out["l1"] = report_to_value(rep1);
        out["l1"]["largest_eigenvalue"] = l1_max;

        auto l2 = neel::assemble_L2(wall);
        auto rep2 = neel::spectrum(l2);
        Eigen::Map<const Eigen::VectorXd> tp(wall.derivative.data().data(),
                                             wall.derivative.size());
        const double kres = std::sqrt(wall.grid().spacing() * l2.apply(tp).squaredNorm()) /
                            neel::norm(wall.derivative);
        rep2.claims["kernel_residual_below_1e6"] = kres <= 1e-6;
        rep2.claims["kernel_dimension_one"] = rep2.kernel_dimension == 1;
        rep2.claims["gap_positive"] = rep2.spectral_gap > 0.0;
        all_pass &= rep2.claims["kernel_residual_below_1e6"] &&
                    rep2.claims["kernel_dimension_one"] && rep2.claims["gap_positive"];
        out["l2"] = report_to_value(rep2);
        out["l2"]["kernel_residual"] = kres;

        // L0 at its own (smaller) resolution for the dense nonsymmetric solves.
        auto wall0 = neel::solve_wall(params, neel::Grid(l0_L, l0_n), wall_opts);
        out["l0_grid"] = {{"half_length", l0_L}, {"n", l0_n}};
        json l0_list = json::array();
        for (double a : alphas) {
            auto l0 = neel::assemble_L0(wall0, a);
            auto rep = neel::spectrum(l0);
            const double kres0 = kernel_pair_residual(l0, wall0);
            rep.claims["kernel_pair_residual_below_1e6"] = kres0 <= 1e-6;
            rep.claims["imaginary_axis_clear"] = rep.imaginary_axis_violations.empty();
            all_pass &= rep.claims["kernel_pair_residual_below_1e6"] &&
                        rep.claims["imaginary_axis_clear"];
            json entry = report_to_value(rep);
            entry["alpha"] = a;
            entry["kernel_pair_residual"] = kres0;
            l0_list.push_back(std::move(entry));
        }
        out["l0"] = std::move(l0_list);

        // Randomized certification of the abstract block lemma.
        std::mt19937_64 rng(seed);
        auto uniform = [&rng] { return 2.0 * (rng() >> 11) * 0x1.0p-53 - 1.0; };
        int total_violations = 0;
        double axis_margin = std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < trials; ++trial) {
            Eigen::MatrixXd a(bl_size, bl_size), b(bl_size, bl_size);
            for (int i = 0; i < bl_size; ++i)
                for (int j = 0; j < bl_size; ++j) {
                    a(i, j) = uniform();
                    b(i, j) = uniform();
                }
            a = (0.5 * (a + a.transpose())).eval();
            b = (0.5 * (b + b.transpose())).eval();
            for (double al : bl_alphas) {
                auto rep = neel::block_lemma_check(a, b, al);
                total_violations += static_cast<int>(rep.imaginary_axis_violations.size());
                for (auto& l : rep.eigenvalues)
                    if (std::abs(l) > rep.tolerances.zero_tol * rep.scale)
                        axis_margin = std::min(axis_margin, std::abs(l.real()));
            }
        }
        out["block_lemma"] = {{"trials", trials},
                              {"size", bl_size},
                              {"alphas", bl_alphas},
                              {"seed", seed},
                              {"violations", total_violations},
                              {"axis_margin", axis_margin}};
        all_pass &= total_violations == 0;
        out["all_claims_pass"] = all_pass;
        *json_out = dup_string(out.dump(2));
    });
}

// ---------------------------------------------------------------------------
// Evolve command
// ---------------------------------------------------------------------------

namespace {

neel::State parse_initial_state(const json& cfg, const neel::WallProfile& wall) {
    const neel::Grid& g = wall.grid();
    neel::State state(g);
    if (!cfg.contains("evolve") || !cfg["evolve"].contains("initial")) return state;
    const json& ini = cfg["evolve"]["initial"];
    check_keys(ini, "evolve.initial", {"kind", "amplitude", "width", "component"});
    const std::string kind = ini.value("kind", "zero");
    const double amp = ini.value("amplitude", 0.01);
    const double width = ini.value("width", 1.0);
    const std::string comp = ini.value("component", "vartheta");
    if (kind == "zero") return state;
    if (kind == "kernel") {
        for (int j = 0; j < g.size(); ++j) state.vartheta[j] = amp * wall.derivative[j];
        return state;
    }
    if (kind == "gaussian") {
        for (int j = 0; j < g.size(); ++j) {
            const double x = g.node(j) / width;
            const double bump = amp * std::exp(-x * x);
            if (comp == "phi" || comp == "both") state.phi[j] = bump;
            if (comp == "vartheta" || comp == "both") state.vartheta[j] = bump;
        }
        return state;
    }
    throw neel::InvalidParameter("unknown initial kind '" + kind + "'");
}

} // namespace

extern "C" {

nw_status nw_evolve_run(const char* config_json, nw_trajectory** out) {
    if (out == nullptr) return NW_ERR_INVALID_ARGUMENT;
    *out = nullptr;
    return guarded([&] {
        json cfg = parse_config(config_json);
        auto params = parse_parameters(cfg);
        auto grid = parse_grid(cfg);
        auto wall = neel::solve_wall(params, grid, parse_wall_options(cfg));
        auto forcing = parse_forcing(cfg, grid);

        neel::IntegratorConfig ic;
        double t_final = 10.0;
        int snapshots = 11;
        if (cfg.contains("evolve")) {
            const json& e = cfg["evolve"];
            check_keys(e, "evolve", {"t_final", "dt", "scheme", "snapshots", "max_phi", "initial"});
            t_final = e.value("t_final", t_final);
            ic.dt = e.value("dt", ic.dt);
            if (e.contains("scheme")) ic.scheme = parse_scheme(e["scheme"].get<std::string>());
            ic.max_phi = e.value("max_phi", ic.max_phi);
            snapshots = e.value("snapshots", snapshots);
        }
        neel::DynamicsContext ctx(wall);
        neel::State initial = parse_initial_state(cfg, wall);
        auto traj = neel::evolve(ctx, initial, t_final, forcing, ic, snapshots);
        *out = new nw_trajectory{std::move(traj), wall.profile.theta(), grid};
    });
}

void nw_trajectory_free(nw_trajectory* t) { delete t; }

int nw_trajectory_snapshot_count(const nw_trajectory* t) {
    return t ? static_cast<int>(t->traj.snapshots.size()) : 0;
}

int nw_trajectory_grid_size(const nw_trajectory* t) { return t ? t->grid.size() : 0; }

double nw_trajectory_half_length(const nw_trajectory* t) {
    return t ? t->grid.half_length() : 0.0;
}

double nw_trajectory_snapshot_time(const nw_trajectory* t, int i) {
    if (t == nullptr || i < 0 || i >= static_cast<int>(t->traj.snapshots.size())) return -1.0;
    return t->traj.snapshots[i].time;
}

nw_status nw_trajectory_snapshot(const nw_trajectory* t, int i, double* phi, double* vartheta,
                                 double* theta) {
    if (t == nullptr || i < 0 || i >= static_cast<int>(t->traj.snapshots.size()))
        return NW_ERR_INVALID_ARGUMENT;
    const auto& s = t->traj.snapshots[i];
    for (int j = 0; j < t->grid.size(); ++j) {
        if (phi) phi[j] = s.phi[j];
        if (vartheta) vartheta[j] = s.vartheta[j];
        if (theta) theta[j] = t->theta_wall[j] + s.vartheta[j];
    }
    return NW_OK;
}

int nw_trajectory_validity_exit(const nw_trajectory* t, double* exit_time) {
    if (t == nullptr) return 0;
    if (exit_time) *exit_time = t->traj.exit_time;
    return t->traj.validity_exit ? 1 : 0;
}

nw_status nw_trajectory_diagnostics(const nw_trajectory* t, char** json_out) {
    if (t == nullptr || json_out == nullptr) return NW_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const auto& d = t->traj.diagnostics;
        json j;
        j["times"] = d.times;
        j["max_phi"] = d.max_phi;
        j["energy_total"] = d.energy_total;
        j["kernel_drift"] = d.kernel_drift;
        j["state_norm"] = d.state_norm;
        j["validity_exit"] = t->traj.validity_exit;
        if (t->traj.validity_exit) j["exit_time"] = t->traj.exit_time;
        *json_out = dup_string(j.dump(2));
    });
}

// ---------------------------------------------------------------------------
// Periodic command
// ---------------------------------------------------------------------------

nw_status nw_periodic_run(const char* config_json, nw_orbits** out) {
    if (out == nullptr) return NW_ERR_INVALID_ARGUMENT;
    *out = nullptr;
    return guarded([&] {
        json cfg = parse_config(config_json);
        auto params = parse_parameters(cfg);
        auto grid = parse_grid(cfg);
        auto wall = neel::solve_wall(params, grid, parse_wall_options(cfg));
        auto forcing = parse_forcing(cfg, grid);

        neel::IntegratorConfig ic;
        neel::NewtonOptions no;
        double lambda_max = 0.05;
        int steps = 10;
        ic.dt = forcing.period() / 2000.0;
        no.coarse_modes = std::min(no.coarse_modes, grid.size());
        if (cfg.contains("periodic")) {
            const json& p = cfg["periodic"];
            check_keys(p, "periodic",
                       {"lambda_max", "steps", "dt", "scheme", "coarse_modes", "tol", "step_tol",
                        "max_iterations", "jacobian", "monodromy_radius"});
            lambda_max = p.value("lambda_max", lambda_max);
            steps = p.value("steps", steps);
            ic.dt = p.value("dt", ic.dt);
            if (p.contains("scheme")) ic.scheme = parse_scheme(p["scheme"].get<std::string>());
            no.coarse_modes = p.value("coarse_modes", no.coarse_modes);
            no.tol = p.value("tol", no.tol);
            no.step_tol = p.value("step_tol", no.step_tol);
            no.max_iterations = p.value("max_iterations", no.max_iterations);
            no.monodromy_radius = p.value("monodromy_radius", no.monodromy_radius);
            if (p.contains("jacobian")) {
                const std::string j = p["jacobian"].get<std::string>();
                if (j == "semigroup")
                    no.strategy = neel::JacobianStrategy::semigroup;
                else if (j == "fd")
                    no.strategy = neel::JacobianStrategy::finite_difference;
                else
                    throw neel::InvalidParameter("unknown jacobian strategy '" + j + "'");
            }
        }

        auto solver = std::make_unique<neel::PeriodicSolver>(
            neel::PoincareSetup{wall, forcing, ic, no});
        auto result = neel::continuation(*solver, lambda_max, steps);

        neel::OrbitArchive archive;
        archive.params = params;
        archive.half_length = grid.half_length();
        archive.n_points = grid.size();
        archive.period = forcing.period();
        archive.dt = ic.dt;
        archive.scheme = ic.scheme == neel::Scheme::imex_bdf2 ? "bdf2" : "euler";
        switch (forcing.kind()) {
            case neel::ForcingKind::zero: archive.forcing_kind = "zero"; break;
            case neel::ForcingKind::sine: archive.forcing_kind = "sine"; break;
            case neel::ForcingKind::cosine: archive.forcing_kind = "cosine"; break;
            default: archive.forcing_kind = "tabulated"; break;
        }
        archive.orbits = std::move(result.orbits);
        archive.completed = result.completed;
        archive.message = result.message;
        *out = new nw_orbits{std::move(archive), std::move(solver)};
    });
}

nw_status nw_orbits_load(const char* path, nw_orbits** out) {
    if (out == nullptr || path == nullptr) return NW_ERR_INVALID_ARGUMENT;
    *out = nullptr;
    return guarded([&] { *out = new nw_orbits{neel::load_orbits(path), nullptr}; });
}

nw_status nw_orbits_save(const nw_orbits* o, const char* path) {
    if (o == nullptr || path == nullptr) return NW_ERR_INVALID_ARGUMENT;
    return guarded([&] { neel::save_orbits(o->archive, path); });
}

void nw_orbits_free(nw_orbits* o) { delete o; }

int nw_orbits_count(const nw_orbits* o) {
    return o ? static_cast<int>(o->archive.orbits.size()) : 0;
}

int nw_orbits_completed(const nw_orbits* o) { return o && o->archive.completed ? 1 : 0; }

int nw_orbits_grid_size(const nw_orbits* o) { return o ? o->archive.n_points : 0; }

nw_status nw_orbits_summary(const nw_orbits* o, int i, double* lambda, double* gamma,
                            double* residual, int* newton_iterations) {
    if (o == nullptr || i < 0 || i >= static_cast<int>(o->archive.orbits.size()))
        return NW_ERR_INVALID_ARGUMENT;
    const auto& orbit = o->archive.orbits[i];
    if (lambda) *lambda = orbit.lambda;
    if (gamma) *gamma = orbit.gamma;
    if (residual) *residual = orbit.residual_norm;
    if (newton_iterations) *newton_iterations = orbit.newton_iterations;
    return NW_OK;
}

nw_status nw_orbits_initial_state(const nw_orbits* o, int i, double* phi0, double* vartheta0) {
    if (o == nullptr || i < 0 || i >= static_cast<int>(o->archive.orbits.size()))
        return NW_ERR_INVALID_ARGUMENT;
    const auto& orbit = o->archive.orbits[i];
    for (int j = 0; j < orbit.phi0.size(); ++j) {
        if (phi0) phi0[j] = orbit.phi0[j];
        if (vartheta0) vartheta0[j] = orbit.vartheta0[j];
    }
    return NW_OK;
}

nw_status nw_orbits_verify(const nw_orbits* o, int i, char** json_out) {
    if (o == nullptr || json_out == nullptr || i < 0 ||
        i >= static_cast<int>(o->archive.orbits.size()))
        return NW_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        nw_orbits* mut = const_cast<nw_orbits*>(o);
        if (!mut->solver) {
            // Rebuild the setup from the archive (scalar forcing kinds only).
            const auto& a = o->archive;
            neel::ForcingModel forcing;
            if (a.forcing_kind == "sine")
                forcing = neel::ForcingModel::sine(a.period, 0.0, 0.0);
            else if (a.forcing_kind == "cosine")
                forcing = neel::ForcingModel::cosine(a.period, 0.0, 0.0);
            else if (a.forcing_kind == "zero")
                forcing = neel::ForcingModel::zero(a.period);
            else
                throw neel::InvalidParameter(
                    "cannot verify archived orbits with tabulated forcing");
            auto wall = neel::solve_wall(a.params, neel::Grid(a.half_length, a.n_points));
            neel::IntegratorConfig ic;
            ic.dt = a.dt;
            ic.scheme = a.scheme == "euler" ? neel::Scheme::imex_euler : neel::Scheme::imex_bdf2;
            neel::NewtonOptions no;
            no.coarse_modes = std::min(no.coarse_modes, a.n_points);
            mut->solver = std::make_unique<neel::PeriodicSolver>(
                neel::PoincareSetup{std::move(wall), forcing, ic, no});
        }
        auto v = mut->solver->verify(o->archive.orbits[i]);
        json j;
        j["lambda"] = o->archive.orbits[i].lambda;
        j["gamma"] = o->archive.orbits[i].gamma;
        j["residual_T"] = v.residual_T;
        j["residual_2T"] = v.residual_2T;
        j["residual_3T"] = v.residual_3T;
        j["pin"] = v.pin;
        j["magnetization_deviation"] = v.magnetization_deviation;
        *json_out = dup_string(j.dump(2));
    });
}

} // extern "C"
