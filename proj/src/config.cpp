#include "chfilm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "chfilm/bulk_solver.hpp"

namespace chfilm {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "surface.kind",       "surface.R",
        "surface.a",          "surface.tau",
        "surface.stabilization", "surface.tol_lin",
        "surface.T",          "thickness.preset",
        "thickness.params",   "potential.preset",
        "potential.coeffs",   "potential.C0",
        "potential.C2",       "potential.C3",
        "grid.n1",            "grid.n2",
        "grid.n3",            "epsilon",
        "bulk.tau",           "bulk.stabilization",
        "bulk.tol_lin",       "bulk.seed",
        "bulk.T",             "bulk.snapshot_times",
        "oracle.modes",       "oracle.tau",
        "study.epsilons",     "study.T",
        "study.v0",           "study.alpha",
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
    if (known_keys().count(key) == 0)
        throw ConfigError("unknown configuration key: " + key);
    values_[key] = value;
}

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected key = value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

std::string Config::get_string(const std::string& key,
                               const std::string& dflt) const {
    const auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
}

double Config::get_double(const std::string& key, double dflt) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(it->second, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key " + key + ": not a number: " + it->second);
    }
    if (trim(it->second.substr(pos)) != "")
        throw ConfigError("key " + key + ": trailing garbage: " + it->second);
    return v;
}

int Config::get_int(const std::string& key, int dflt) const {
    if (!has(key)) return dflt;
    const double v = get_double(key, 0.0);
    const int i = static_cast<int>(std::llround(v));
    if (v != static_cast<double>(i))
        throw ConfigError("key " + key + ": expected an integer");
    return i;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t dflt) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ConfigError("key " + key + ": not an unsigned integer: " +
                          it->second);
    }
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& dflt) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    std::vector<double> out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("key " + key + ": empty list element");
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("key " + key + ": not a number: " + item);
        }
    }
    if (out.empty()) throw ConfigError("key " + key + ": empty list");
    return out;
}

SurfaceChart make_chart(const Config& cfg) {
    const std::string kind = cfg.get_string("surface.kind", "torus");
    if (kind == "torus")
        return SurfaceChart::torus(cfg.get_double("surface.R", 2.0),
                                   cfg.get_double("surface.a", 1.0));
    if (kind == "flat_sheet") return SurfaceChart::flat_sheet();
    if (kind == "unit_sphere_patch") return SurfaceChart::unit_sphere_patch();
    throw ConfigError("surface.kind: unknown chart: " + kind);
}

ThicknessProfile make_profile(const Config& cfg) {
    const std::string preset = cfg.get_string("thickness.preset", "constant");
    const std::vector<double> params =
        cfg.get_list("thickness.params",
                     preset == "constant" ? std::vector<double>{0.0, 1.0}
                                          : std::vector<double>{0.2, 1.0});
    if (params.size() != 2)
        throw ConfigError("thickness.params: expected two values");
    if (preset == "constant") return ThicknessProfile::constant(params[0], params[1]);
    if (preset == "sinusoidal")
        return ThicknessProfile::sinusoidal(params[0], params[1]);
    throw ConfigError("thickness.preset: unknown preset: " + preset);
}

Potential make_potential(const Config& cfg) {
    const std::string preset =
        cfg.get_string("potential.preset", "quartic_double_well");
    if (preset == "quartic_double_well") return Potential::quartic_double_well();
    if (preset == "polynomial") {
        if (!cfg.has("potential.coeffs"))
            throw ConfigError("potential.coeffs required for polynomial preset");
        return Potential::polynomial(cfg.get_list("potential.coeffs", {}),
                                     cfg.get_double("potential.C0", 0.0),
                                     cfg.get_double("potential.C2", 1.0),
                                     cfg.get_double("potential.C3", 6.0));
    }
    throw ConfigError("potential.preset: unknown preset: " + preset);
}

SurfaceField make_v0(const Config& cfg, int n1, int n2, std::uint64_t seed) {
    const std::string preset = cfg.get_string("study.v0", "sine");
    if (preset == "random") return random_surface_field(n1, n2, 0.0, 0.1, seed);
    SurfaceField v(n1, n2);
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
            const double s1 = static_cast<double>(i) / n1;
            const double s2 = static_cast<double>(j) / n2;
            if (preset == "sine")
                v.at(i, j) = 0.1 * std::sin(2.0 * M_PI * s1);
            else if (preset == "stripe")
                v.at(i, j) = std::tanh((0.25 - std::abs(s2 - 0.5)) / 0.1);
            else
                throw ConfigError("study.v0: unknown preset: " + preset);
        }
    return v;
}

}  // namespace chfilm
