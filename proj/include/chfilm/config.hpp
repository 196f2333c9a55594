#ifndef CHFILM_CONFIG_HPP
#define CHFILM_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chfilm/geometry.hpp"
#include "chfilm/potential.hpp"
#include "chfilm/pullback.hpp"
#include "chfilm/surface_geometry.hpp"

namespace chfilm {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat `key = value` configuration with dotted section names. Unknown keys
// are hard errors: silent typos corrupt convergence studies.
class Config {
public:
    static Config parse_string(const std::string& text);
    static Config parse_file(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get_string(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key, double dflt) const;
    int get_int(const std::string& key, int dflt) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& dflt) const;

    void set(const std::string& key, const std::string& value);

private:
    std::map<std::string, std::string> values_;
};

// Factories from config keys (with the documented defaults).
SurfaceChart make_chart(const Config& cfg);
ThicknessProfile make_profile(const Config& cfg);
Potential make_potential(const Config& cfg);
SurfaceField make_v0(const Config& cfg, int n1, int n2, std::uint64_t seed);

}  // namespace chfilm

#endif
