#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "nfrbf/harness.hpp"

namespace nfrbf {

/// Flat key-value text with sections:
///
///   # comment (also ';')
///   [section]
///   key = value
///
/// Keys are addressed as "section.key" (keys before any section have no prefix). Duplicate
/// keys and malformed lines are rejected with their line number.
class IniFile {
public:
    static IniFile parse(std::string_view text, const std::string& origin = "<string>");
    static IniFile load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Throws InvalidInput naming the first key not in `known`.
    void require_known(const std::set<std::string>& known) const;

private:
    std::map<std::string, std::string> values_;
    std::string origin_;
};

/// Showcase configuration from an ini file. Sections: scenario (name, gamma, frequency, mesh,
/// seed, bumps, band_width), kernel (a_e, sigma_e, a_i, sigma_i, distance), firing (kind, lo,
/// hi, gain, threshold), depression (enabled, tau, beta), rbf (phs, deg, k), time (dt, T,
/// stride), output (dir, geodesic_cache). Unset keys keep the scenario defaults; relative
/// paths are resolved against `base_dir`.
ShowcaseConfig showcase_from_ini(const IniFile& ini, const std::filesystem::path& base_dir = {});

/// Single-line `key=value` rendering of a showcase configuration, for logs.
std::string describe(const ShowcaseConfig& config);

}  // namespace nfrbf
