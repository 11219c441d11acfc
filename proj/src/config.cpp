#include "nfrbf/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nfrbf/error.hpp"

namespace nfrbf {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

}  // namespace

IniFile IniFile::parse(std::string_view text, const std::string& origin) {
    IniFile ini;
    ini.origin_ = origin;
    std::string section;
    std::istringstream is{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        const auto where = [&]() { return origin + ":" + std::to_string(line_no); };
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) throw InvalidInput(where() + ": malformed section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidInput(where() + ": expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw InvalidInput(where() + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (!ini.values_.emplace(full, value).second) throw InvalidInput(where() + ": duplicate key '" + full + "'");
    }
    return ini;
}

IniFile IniFile::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot read config " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return parse(os.str(), path.string());
}

std::string IniFile::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double IniFile::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used == it->second.size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidInput(origin_ + ": '" + key + "' is not a number: " + it->second);
}

long IniFile::get_int(const std::string& key, long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    long v = 0;
    const auto& s = it->second;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw InvalidInput(origin_ + ": '" + key + "' is not an integer: " + s);
    return v;
}

bool IniFile::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw InvalidInput(origin_ + ": '" + key + "' is not a boolean: " + it->second);
}

void IniFile::require_known(const std::set<std::string>& known) const {
    for (const auto& [k, v] : values_)
        if (!known.count(k)) throw InvalidInput(origin_ + ": unknown key '" + k + "'");
}

ShowcaseConfig showcase_from_ini(const IniFile& ini, const std::filesystem::path& base_dir) {
    ini.require_known({"scenario.name", "scenario.gamma", "scenario.frequency", "scenario.mesh", "scenario.seed",
                       "scenario.bumps", "scenario.band_width", "kernel.a_e", "kernel.sigma_e", "kernel.a_i",
                       "kernel.sigma_i", "kernel.distance", "firing.kind", "firing.lo", "firing.hi", "firing.gain",
                       "firing.threshold", "depression.enabled", "depression.tau", "depression.beta", "rbf.phs",
                       "rbf.deg", "rbf.k", "time.dt", "time.T", "time.stride", "output.dir",
                       "output.geodesic_cache"});
    if (!ini.has("scenario.name")) throw InvalidInput("config needs [scenario] name");
    ShowcaseConfig c = showcase_defaults(ini.get_string("scenario.name", ""));
    const auto path = [&](const std::string& key) -> std::filesystem::path {
        if (!ini.has(key)) return {};
        std::filesystem::path p = ini.get_string(key, "");
        return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };

    c.gamma = ini.get_double("scenario.gamma", c.gamma);
    c.frequency = static_cast<int>(ini.get_int("scenario.frequency", c.frequency));
    if (ini.has("scenario.mesh")) c.mesh_path = path("scenario.mesh");
    c.seed = static_cast<std::uint64_t>(ini.get_int("scenario.seed", static_cast<long>(c.seed)));
    c.bumps = static_cast<int>(ini.get_int("scenario.bumps", c.bumps));
    c.band_width = ini.get_double("scenario.band_width", c.band_width);

    c.kernel.a_e = ini.get_double("kernel.a_e", c.kernel.a_e);
    c.kernel.sigma_e = ini.get_double("kernel.sigma_e", c.kernel.sigma_e);
    c.kernel.a_i = ini.get_double("kernel.a_i", c.kernel.a_i);
    c.kernel.sigma_i = ini.get_double("kernel.sigma_i", c.kernel.sigma_i);
    if (!(c.kernel.sigma_e > 0.0 && c.kernel.sigma_i > 0.0)) throw InvalidInput("kernel widths must be positive");
    const std::string dist = ini.get_string("kernel.distance", "geodesic");
    if (dist == "geodesic")
        c.kernel.distance = DistanceKind::geodesic;
    else if (dist == "euclidean")
        c.kernel.distance = DistanceKind::euclidean;
    else
        throw InvalidInput("kernel.distance must be geodesic or euclidean");

    const std::string firing = ini.get_string("firing.kind", c.firing.kind == FiringRate::Kind::sigmoid ? "sigmoid" : "spline");
    if (firing == "spline")
        c.firing = FiringRate::smooth_spline(ini.get_double("firing.lo", 0.06), ini.get_double("firing.hi", 0.54));
    else if (firing == "sigmoid")
        c.firing = FiringRate::sigmoid(ini.get_double("firing.gain", 5.0), ini.get_double("firing.threshold", 0.5));
    else
        throw InvalidInput("firing.kind must be spline or sigmoid");

    if (ini.get_bool("depression.enabled", c.depression.has_value())) {
        Depression d = c.depression.value_or(Depression{});
        d.tau = ini.get_double("depression.tau", d.tau);
        d.beta = ini.get_double("depression.beta", d.beta);
        if (!(d.tau > 0.0) || !(d.beta >= 0.0)) throw InvalidInput("depression needs tau > 0 and beta >= 0");
        c.depression = d;
    } else {
        c.depression.reset();
    }

    c.rbf.phs.order = static_cast<int>(ini.get_int("rbf.phs", c.rbf.phs.order));
    c.rbf.deg = static_cast<int>(ini.get_int("rbf.deg", c.rbf.deg));
    c.rbf.k = static_cast<int>(ini.get_int("rbf.k", c.rbf.k));
    check_compatibility(c.rbf.phs, PolySpec::make(c.rbf.deg, 2), c.rbf.k);

    c.dt = ini.get_double("time.dt", c.dt);
    c.T = ini.get_double("time.T", c.T);
    c.stride = ini.get_int("time.stride", c.stride);
    if (!(c.dt > 0.0) || !(c.T >= 0.0) || c.stride < 0) throw InvalidInput("time needs dt > 0, T >= 0, stride >= 0");
    if (ini.has("output.dir")) c.out_dir = path("output.dir");
    if (ini.has("output.geodesic_cache")) c.geodesic_cache = path("output.geodesic_cache");
    return c;
}

std::string describe(const ShowcaseConfig& c) {
    std::ostringstream os;
    os << std::setprecision(17) << "scenario=" << c.scenario << " gamma=" << c.gamma << " frequency=" << c.frequency
       << " mesh=" << c.mesh_path.string() << " seed=" << c.seed << " bumps=" << c.bumps
       << " band_width=" << c.band_width << " a_e=" << c.kernel.a_e << " sigma_e=" << c.kernel.sigma_e
       << " a_i=" << c.kernel.a_i << " sigma_i=" << c.kernel.sigma_i
       << " distance=" << (c.kernel.distance == DistanceKind::geodesic ? "geodesic" : "euclidean")
       << " firing=" << (c.firing.kind == FiringRate::Kind::sigmoid ? "sigmoid" : "spline");
    if (c.depression)
        os << " tau=" << c.depression->tau << " beta=" << c.depression->beta;
    else
        os << " depression=off";
    os << " phs=" << c.rbf.phs.order << " deg=" << c.rbf.deg << " k=" << c.rbf.k << " dt=" << c.dt << " T=" << c.T
       << " stride=" << c.stride << " out=" << c.out_dir.string() << " geodesic_cache=" << c.geodesic_cache.string();
    return os.str();
}

}  // namespace nfrbf
