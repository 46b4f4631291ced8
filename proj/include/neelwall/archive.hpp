//==============================================================================
// archive.hpp
// Self-describing JSON records for wall profiles and orbit families. All
// floating-point payloads are written as C99 hex-float strings so that a
// save/load round trip reproduces bit-identical values.
//==============================================================================
#pragma once

#include <string>
#include <vector>

#include "neelwall/energy.hpp"
#include "neelwall/periodic.hpp"

namespace neel {

std::string wall_to_json(const WallProfile& wall);
WallProfile wall_from_json(const std::string& text);
void save_wall(const WallProfile& wall, const std::string& path);
WallProfile load_wall(const std::string& path);

struct OrbitArchive {
    RescaledParameters params;
    double half_length = 0.0;
    int n_points = 0;
    double period = 0.0;
    double dt = 0.0;
    std::string scheme = "bdf2";
    std::string forcing_kind;
    std::vector<PeriodicOrbit> orbits;
    bool completed = true;
    std::string message;
};

std::string orbits_to_json(const OrbitArchive& archive);
OrbitArchive orbits_from_json(const std::string& text);
void save_orbits(const OrbitArchive& archive, const std::string& path);
OrbitArchive load_orbits(const std::string& path);

// Hex-float encoding helpers (shared with the CLI manifests).
std::string hex_double(double v);
double parse_hex_double(const std::string& s);

} // namespace neel
