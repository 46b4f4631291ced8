#include "neelwall/archive.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace neel {

using nlohmann::json;

std::string hex_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double parse_hex_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw IoFailure("malformed numeric literal '" + s + "'");
    return v;
}

namespace {

json encode_samples(const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(hex_double(x));
    return arr;
}

std::vector<double> decode_samples(const json& arr, int expected) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != expected)
        throw IoFailure("sample array has unexpected length");
    std::vector<double> v;
    v.reserve(arr.size());
    for (const auto& e : arr) v.push_back(parse_hex_double(e.get<std::string>()));
    return v;
}

json encode_params(const RescaledParameters& p) {
    return {{"kappa", hex_double(p.kappa)},
            {"epsilon", hex_double(p.epsilon)},
            {"alpha", hex_double(p.alpha)}};
}

RescaledParameters decode_params(const json& j) {
    return RescaledParameters{parse_hex_double(j.at("kappa").get<std::string>()),
                              parse_hex_double(j.at("epsilon").get<std::string>()),
                              parse_hex_double(j.at("alpha").get<std::string>())};
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoFailure("short write to '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw IoFailure("malformed JSON archive");
    return j;
}

} // namespace

std::string wall_to_json(const WallProfile& wall) {
    const Grid& g = wall.grid();
    json j;
    j["format"] = "neelwall-profile";
    j["version"] = 1;
    j["parameters"] = encode_params(wall.params);
    j["grid"] = {{"half_length", hex_double(g.half_length())}, {"n", g.size()}};
    j["theta"] = encode_samples(wall.profile.theta().data());
    j["theta_prime"] = encode_samples(wall.derivative.data());
    j["theta_second"] = encode_samples(wall.second_derivative.data());
    j["diagnostics"] = {{"el_residual_norm", hex_double(wall.el_residual_norm)},
                        {"tail_value", hex_double(wall.tail_value)},
                        {"exchange", hex_double(wall.energy.exchange)},
                        {"anisotropy", hex_double(wall.energy.anisotropy)},
                        {"stray", hex_double(wall.energy.stray)},
                        {"grad_flow_iterations", wall.grad_flow_iterations},
                        {"newton_iterations", wall.newton_iterations}};
    if (wall.warning) j["diagnostics"]["warning"] = *wall.warning;
    return j.dump(1);
}

WallProfile wall_from_json(const std::string& text) {
    json j = parse_json(text);
    if (j.value("format", "") != "neelwall-profile" || j.value("version", 0) != 1)
        throw IoFailure("not a neelwall profile archive");
    Grid g(parse_hex_double(j.at("grid").at("half_length").get<std::string>()),
           j.at("grid").at("n").get<int>());
    const int n = g.size();
    const json& d = j.at("diagnostics");
    WallProfile wall{PhaseProfile(g, decode_samples(j.at("theta"), n)),
                     RealField(g, decode_samples(j.at("theta_prime"), n)),
                     RealField(g, decode_samples(j.at("theta_second"), n)),
                     decode_params(j.at("parameters")),
                     EnergyTerms{parse_hex_double(d.at("exchange").get<std::string>()),
                                 parse_hex_double(d.at("anisotropy").get<std::string>()),
                                 parse_hex_double(d.at("stray").get<std::string>())},
                     parse_hex_double(d.at("el_residual_norm").get<std::string>()),
                     parse_hex_double(d.at("tail_value").get<std::string>()),
                     d.value("grad_flow_iterations", 0),
                     d.value("newton_iterations", 0),
                     std::nullopt};
    if (d.contains("warning")) wall.warning = d.at("warning").get<std::string>();
    return wall;
}

void save_wall(const WallProfile& wall, const std::string& path) {
    write_file(path, wall_to_json(wall));
}

WallProfile load_wall(const std::string& path) { return wall_from_json(read_file(path)); }

std::string orbits_to_json(const OrbitArchive& archive) {
    json j;
    j["format"] = "neelwall-orbits";
    j["version"] = 1;
    j["parameters"] = encode_params(archive.params);
    j["grid"] = {{"half_length", hex_double(archive.half_length)}, {"n", archive.n_points}};
    j["period"] = hex_double(archive.period);
    j["dt"] = hex_double(archive.dt);
    j["scheme"] = archive.scheme;
    j["forcing_kind"] = archive.forcing_kind;
    j["completed"] = archive.completed;
    if (!archive.message.empty()) j["message"] = archive.message;
    json list = json::array();
    for (const auto& orbit : archive.orbits) {
        json o;
        o["lambda"] = hex_double(orbit.lambda);
        o["gamma"] = hex_double(orbit.gamma);
        o["residual_norm"] = hex_double(orbit.residual_norm);
        o["newton_iterations"] = orbit.newton_iterations;
        o["monodromy_spectral_radius_on_range"] =
            hex_double(orbit.monodromy_spectral_radius_on_range);
        o["phi0"] = encode_samples(orbit.phi0.data());
        o["vartheta0"] = encode_samples(orbit.vartheta0.data());
        list.push_back(std::move(o));
    }
    j["orbits"] = std::move(list);
    return j.dump(1);
}

OrbitArchive orbits_from_json(const std::string& text) {
    json j = parse_json(text);
    if (j.value("format", "") != "neelwall-orbits" || j.value("version", 0) != 1)
        throw IoFailure("not a neelwall orbit archive");
    OrbitArchive a;
    a.params = decode_params(j.at("parameters"));
    a.half_length = parse_hex_double(j.at("grid").at("half_length").get<std::string>());
    a.n_points = j.at("grid").at("n").get<int>();
    a.period = parse_hex_double(j.at("period").get<std::string>());
    a.dt = parse_hex_double(j.at("dt").get<std::string>());
    a.scheme = j.value("scheme", "bdf2");
    a.forcing_kind = j.value("forcing_kind", "");
    a.completed = j.value("completed", true);
    a.message = j.value("message", "");
    Grid g(a.half_length, a.n_points);
    for (const auto& o : j.at("orbits")) {
        PeriodicOrbit orbit(g);
        orbit.lambda = parse_hex_double(o.at("lambda").get<std::string>());
        orbit.gamma = parse_hex_double(o.at("gamma").get<std::string>());
        orbit.residual_norm = parse_hex_double(o.at("residual_norm").get<std::string>());
        orbit.newton_iterations = o.value("newton_iterations", 0);
        orbit.monodromy_spectral_radius_on_range =
            parse_hex_double(o.at("monodromy_spectral_radius_on_range").get<std::string>());
        orbit.phi0 = RealField(g, decode_samples(o.at("phi0"), g.size()));
        orbit.vartheta0 = RealField(g, decode_samples(o.at("vartheta0"), g.size()));
        a.orbits.push_back(std::move(orbit));
    }
    return a;
}

void save_orbits(const OrbitArchive& archive, const std::string& path) {
    write_file(path, orbits_to_json(archive));
}

OrbitArchive load_orbits(const std::string& path) { return orbits_from_json(read_file(path)); }

} // namespace neel
