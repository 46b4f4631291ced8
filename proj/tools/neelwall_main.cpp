//==============================================================================
// neelwall_main.cpp
// Command line front end over the shared C API: wall, spectrum, evolve and
// periodic subcommands. Reads one JSON configuration document, applies
// --set overrides, runs the requested computation, and writes CSV/SVG/JSON
// artifacts plus a manifest into the output directory.
//
// Exit codes: 0 success, 1 configuration error, 2 solver failure,
//             3 validity exit during time integration, 4 no nontrivial orbit.
//==============================================================================
#include <cstdio>
#include <cstdint>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "neelwall.h"
#include "svg.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliError {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{1, "cannot open config '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError{1, "cannot write '" + path.string() + "'"};
    out << text;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
    json cfg = json::object();
    if (!path.empty()) {
        cfg = json::parse(read_file(path), nullptr, false);
        if (cfg.is_discarded()) throw CliError{1, "config is not valid JSON: " + path};
    }
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw CliError{1, "--set expects key=value, got " + kv};
        const std::string key = kv.substr(0, eq);
        const std::string raw = kv.substr(eq + 1);
        json value = json::parse(raw, nullptr, false);
        if (value.is_discarded()) value = raw;  // bare strings allowed
        json* node = &cfg;
        std::istringstream parts(key);
        std::string part;
        std::vector<std::string> segs;
        while (std::getline(parts, part, '.')) segs.push_back(part);
        if (segs.empty()) throw CliError{1, "--set has an empty key"};
        for (std::size_t i = 0; i + 1 < segs.size(); ++i) node = &(*node)[segs[i]];
        (*node)[segs.back()] = value;
    }
    return cfg;
}

std::string status_name(nw_status s) {
    switch (s) {
        case NW_OK: return "ok";
        case NW_ERR_INVALID_ARGUMENT: return "invalid argument";
        case NW_ERR_DIMENSION: return "dimension mismatch";
        case NW_ERR_SOLVER_FAILURE: return "solver failure";
        case NW_ERR_VALIDITY_EXIT: return "validity exit";
        case NW_ERR_IO: return "io failure";
        case NW_ERR_RESOURCE: return "resource limit";
        default: return "internal error";
    }
}

[[noreturn]] void fail_from_status(nw_status s) {
    int code = 2;
    if (s == NW_ERR_INVALID_ARGUMENT || s == NW_ERR_DIMENSION || s == NW_ERR_IO) code = 1;
    if (s == NW_ERR_VALIDITY_EXIT) code = 3;
    throw CliError{code, status_name(s) + ": " + nw_last_error_message()};
}

fs::path prepare_output(const json& cfg, std::string flag_value) {
    std::string dir = flag_value;
    if (dir.empty() && cfg.contains("output")) dir = cfg["output"].get<std::string>();
    if (dir.empty()) {
        const char* env = std::getenv("NEELWALL_OUT");
        dir = env ? env : "neelwall_out";
    }
    fs::create_directories(dir);
    return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const json& cfg,
                    const std::vector<std::string>& artifacts, const json& extra) {
    json m;
    m["command"] = command;
    m["version"] = nw_version();
    m["config"] = cfg;
    m["config_hash"] = fnv1a(cfg.dump());
    m["artifacts"] = artifacts;
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

std::string take_string(char* s) {
    std::string out = s ? s : "";
    nw_string_free(s);
    return out;
}

// ---------------------------------------------------------------------------
// wall
// ---------------------------------------------------------------------------
int cmd_wall(const json& cfg, const fs::path& dir) {
    nw_wall* wall = nullptr;
    nw_status st = nw_wall_solve(cfg.dump().c_str(), &wall);
    if (st != NW_OK) fail_from_status(st);

    const int n = nw_wall_grid_size(wall);
    std::vector<double> x(n), theta(n), prime(n);
    nw_wall_nodes(wall, x.data());
    nw_wall_theta(wall, theta.data());
    nw_wall_theta_prime(wall, prime.data());

    char* diag_text = nullptr;
    nw_wall_diagnostics(wall, &diag_text);
    json diag = json::parse(take_string(diag_text));

    nw_wall_save(wall, (dir / "wall.json").string().c_str());

    std::ostringstream csv;
    csv << "x,theta,theta_prime,cos_theta\n";
    csv.precision(17);
    for (int j = 0; j < n; ++j)
        csv << x[j] << "," << theta[j] << "," << prime[j] << "," << std::cos(theta[j]) << "\n";
    write_file(dir / "profile.csv", csv.str());

    svgplot::Series s1{x, theta, "#1f77b4", "theta"};
    svgplot::Series s2{x, prime, "#d62728", "theta'"};
    svgplot::write_lines((dir / "wall_profile.svg").string(), "static wall profile", {s1, s2});

    std::printf("wall solved on [%g, %g] with %d nodes\n", -nw_wall_half_length(wall),
                nw_wall_half_length(wall), n);
    std::printf("  %-22s %.6e\n", "exchange energy", diag["energy"]["exchange"].get<double>());
    std::printf("  %-22s %.6e\n", "anisotropy energy", diag["energy"]["anisotropy"].get<double>());
    std::printf("  %-22s %.6e\n", "stray energy", diag["energy"]["stray"].get<double>());
    std::printf("  %-22s %.6e\n", "total energy", diag["energy"]["total"].get<double>());
    std::printf("  %-22s %.3e\n", "EL residual", diag["el_residual_norm"].get<double>());
    std::printf("  %-22s %.3e\n", "tail value", diag["tail_value"].get<double>());
    if (diag.contains("warning"))
        std::printf("  warning: %s\n", diag["warning"].get<std::string>().c_str());
    nw_wall_free(wall);

    write_manifest(dir, "wall", cfg, {"wall.json", "profile.csv", "wall_profile.svg"},
                   json{{"diagnostics", diag}});
    return 0;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------
int cmd_spectrum(const json& cfg, const fs::path& dir) {
    char* text = nullptr;
    nw_status st = nw_spectrum_run(cfg.dump().c_str(), &text);
    if (st != NW_OK) fail_from_status(st);
    json rep = json::parse(take_string(text));
    write_file(dir / "spectrum.json", rep.dump(2) + "\n");

    // eigenvalue scatter: L1/L2 on the real axis, L0 per alpha in color
    std::vector<svgplot::Series> series;
    auto pull = [&](const json& r, const std::string& color, const std::string& label) {
        svgplot::Series s;
        s.color = color;
        s.label = label;
        for (const auto& ev : r["eigenvalues"]) {
            s.x.push_back(ev[0].get<double>());
            s.y.push_back(ev[1].get<double>());
        }
        series.push_back(std::move(s));
    };
    pull(rep["l1"], "#2ca02c", "L1");
    pull(rep["l2"], "#1f77b4", "L2");
    const char* colors[] = {"#d62728", "#9467bd", "#8c564b", "#e377c2"};
    int ci = 0;
    for (const auto& entry : rep["l0"]) {
        pull(entry, colors[ci % 4], "L0 alpha=" + std::to_string(entry["alpha"].get<double>()));
        ++ci;
    }
    svgplot::write_scatter((dir / "eigenvalues.svg").string(), "linearized operator spectra",
                           series);

    auto flag = [](bool ok) { return ok ? "pass" : "FAIL"; };
    const json& l1 = rep["l1"]["claims"];
    const json& l2 = rep["l2"]["claims"];
    std::printf("spectral claims at kappa=%g, eps=%g:\n", rep["parameters"]["kappa"].get<double>(),
                rep["parameters"]["epsilon"].get<double>());
    std::printf("  [%s] L1 all eigenvalues negative (largest %.4e)\n",
                flag(l1["all_eigenvalues_negative"].get<bool>()),
                rep["l1"]["largest_eigenvalue"].get<double>());
    std::printf("  [%s] L2 kernel dimension is one\n",
                flag(l2["kernel_dimension_one"].get<bool>()));
    std::printf("  [%s] L2 spectral gap positive (%.4e)\n", flag(l2["gap_positive"].get<bool>()),
                rep["l2"]["spectral_gap"].get<double>());
    std::printf("  [%s] L2 kernel residual <= 1e-6 (measured %.3e)\n",
                flag(l2["kernel_residual_below_1e6"].get<bool>()),
                rep["l2"]["kernel_residual"].get<double>());
    for (const auto& entry : rep["l0"]) {
        std::printf("  [%s] L0(alpha=%g) imaginary axis clear of nonzero eigenvalues\n",
                    flag(entry["claims"]["imaginary_axis_clear"].get<bool>()),
                    entry["alpha"].get<double>());
        std::printf("  [%s] L0(alpha=%g) kernel pair residual <= 1e-6 (measured %.3e)\n",
                    flag(entry["claims"]["kernel_pair_residual_below_1e6"].get<bool>()),
                    entry["alpha"].get<double>(), entry["kernel_pair_residual"].get<double>());
    }
    std::printf("  [%s] block lemma randomized check (%d violations)\n",
                flag(rep["block_lemma"]["violations"].get<int>() == 0),
                rep["block_lemma"]["violations"].get<int>());

    write_manifest(dir, "spectrum", cfg, {"spectrum.json", "eigenvalues.svg"},
                   json{{"all_claims_pass", rep["all_claims_pass"]}});
    return 0;
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------
int cmd_evolve(const json& cfg, const fs::path& dir) {
    nw_trajectory* traj = nullptr;
    nw_status st = nw_evolve_run(cfg.dump().c_str(), &traj);
    if (st != NW_OK) fail_from_status(st);

    const int n = nw_trajectory_grid_size(traj);
    const int snaps = nw_trajectory_snapshot_count(traj);
    std::vector<double> phi(n), vth(n), theta(n);
    std::vector<std::string> artifacts;

    std::vector<double> xs(n);
    {
        const double L = nw_trajectory_half_length(traj);
        for (int j = 0; j < n; ++j) xs[j] = -L + 2.0 * L * j / n;
    }

    std::vector<std::vector<double>> heat;
    std::vector<double> heat_t;
    for (int i = 0; i < snaps; ++i) {
        nw_trajectory_snapshot(traj, i, phi.data(), vth.data(), theta.data());
        std::ostringstream csv;
        csv << "x,phi,vartheta,theta\n";
        csv.precision(17);
        for (int j = 0; j < n; ++j)
            csv << xs[j] << "," << phi[j] << "," << vth[j] << "," << theta[j] << "\n";
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_%03d.csv", i);
        write_file(dir / name, csv.str());
        artifacts.push_back(name);
        heat.push_back(vth);
        heat_t.push_back(nw_trajectory_snapshot_time(traj, i));
    }

    char* diag_text = nullptr;
    nw_trajectory_diagnostics(traj, &diag_text);
    json diag = json::parse(take_string(diag_text));
    {
        std::ostringstream csv;
        csv << "t,max_phi,energy_total,kernel_drift,state_norm\n";
        csv.precision(17);
        const auto& ts = diag["times"];
        for (std::size_t i = 0; i < ts.size(); ++i)
            csv << ts[i].get<double>() << "," << diag["max_phi"][i].get<double>() << ","
                << diag["energy_total"][i].get<double>() << ","
                << diag["kernel_drift"][i].get<double>() << ","
                << diag["state_norm"][i].get<double>() << "\n";
        write_file(dir / "diagnostics.csv", csv.str());
        artifacts.push_back("diagnostics.csv");
    }

    if (!heat.empty()) {
        svgplot::write_heatmap((dir / "vartheta_spacetime.svg").string(),
                               "phase perturbation over space and time", xs, heat_t, heat);
        artifacts.push_back("vartheta_spacetime.svg");
    }

    double exit_time = 0.0;
    const bool validity = nw_trajectory_validity_exit(traj, &exit_time) != 0;
    nw_trajectory_free(traj);

    json extra{{"validity_exit", validity}};
    if (validity) extra["exit_time"] = exit_time;
    write_manifest(dir, "evolve", cfg, artifacts, extra);

    if (validity) {
        std::printf("integration left the validity region at t = %.6f\n", exit_time);
        return 3;
    }
    std::printf("evolve finished: %d snapshots, %d nodes\n", snaps, n);
    return 0;
}

// ---------------------------------------------------------------------------
// periodic
// ---------------------------------------------------------------------------
int cmd_periodic(const json& cfg, const fs::path& dir) {
    nw_orbits* orbits = nullptr;
    nw_status st = nw_periodic_run(cfg.dump().c_str(), &orbits);
    if (st != NW_OK) fail_from_status(st);

    const int count = nw_orbits_count(orbits);
    const bool completed = nw_orbits_completed(orbits) != 0;
    nw_orbits_save(orbits, (dir / "orbits.json").string().c_str());

    std::ostringstream gamma_csv, verify_csv;
    gamma_csv << "lambda,gamma\n";
    gamma_csv.precision(17);
    verify_csv << "lambda,gamma,residual,newton_iterations,residual_T,residual_2T,residual_3T,"
                  "pin,magnetization_deviation\n";
    verify_csv.precision(17);

    svgplot::Series curve;
    curve.label = "gamma(lambda)";
    int converged_nontrivial = 0;
    for (int i = 0; i < count; ++i) {
        double lambda, gamma, residual;
        int iters;
        nw_orbits_summary(orbits, i, &lambda, &gamma, &residual, &iters);
        gamma_csv << lambda << "," << gamma << "\n";
        curve.x.push_back(lambda);
        curve.y.push_back(gamma);
        if (lambda > 0.0) ++converged_nontrivial;

        char* vtext = nullptr;
        if (nw_orbits_verify(orbits, i, &vtext) == NW_OK) {
            json v = json::parse(take_string(vtext));
            verify_csv << lambda << "," << gamma << "," << residual << "," << iters << ","
                       << v["residual_T"].get<double>() << "," << v["residual_2T"].get<double>()
                       << "," << v["residual_3T"].get<double>() << "," << v["pin"].get<double>()
                       << "," << v["magnetization_deviation"].get<double>() << "\n";
        }
        std::printf("  lambda=%.6f gamma=%+.6e residual=%.2e iterations=%d\n", lambda, gamma,
                    residual, iters);
    }
    write_file(dir / "gamma_curve.csv", gamma_csv.str());
    write_file(dir / "verification.csv", verify_csv.str());
    svgplot::write_lines((dir / "gamma_curve.svg").string(),
                         "compatibility offset gamma(lambda)", {curve});
    nw_orbits_free(orbits);

    write_manifest(dir, "periodic", cfg,
                   {"orbits.json", "gamma_curve.csv", "gamma_curve.svg", "verification.csv"},
                   json{{"completed", completed}, {"orbit_count", count}});

    if (converged_nontrivial == 0) {
        std::printf("no nontrivial orbit converged\n");
        return 4;
    }
    std::printf("%d orbits (%s)\n", count, completed ? "completed" : "partial family");
    return completed ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-dimensional wall dynamics laboratory"};
    app.require_subcommand(1);

    std::string config_path, output_dir;
    std::vector<std::string> overrides;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON configuration file");
        cmd->add_option("--output", output_dir, "output directory (default: $NEELWALL_OUT)");
        cmd->add_option("--set", overrides,
                        "override a config key, e.g. --set parameters.epsilon=0.2");
        return cmd;
    };
    auto* wall = add_common(app.add_subcommand("wall", "solve the static wall profile"));
    auto* spectrum =
        add_common(app.add_subcommand("spectrum", "certify the linearized operator spectra"));
    auto* evolve = add_common(app.add_subcommand("evolve", "integrate the forced dynamics"));
    auto* periodic =
        add_common(app.add_subcommand("periodic", "continue periodic orbits in the amplitude"));

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg = load_config(config_path, overrides);
        fs::path dir = prepare_output(cfg, output_dir);
        if (wall->parsed()) return cmd_wall(cfg, dir);
        if (spectrum->parsed()) return cmd_spectrum(cfg, dir);
        if (evolve->parsed()) return cmd_evolve(cfg, dir);
        if (periodic->parsed()) return cmd_periodic(cfg, dir);
    } catch (const CliError& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return e.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
