#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace acclab {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

// from_chars keeps parsing independent of the global locale.
double to_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw ConfigError(key + ": '" + raw + "' is not a number");
    return v;
}

int to_int(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw ConfigError(key + ": '" + raw + "' is not an integer");
    return v;
}

const std::map<std::string, std::set<std::string>> kKeys = {
    {"model", {"n", "c", "profile", "cap_match_radius", "outer_bc", "mode_count", "potential"}},
    {"schedule", {"eps"}},
    {"solver",
     {"N", "scheme", "per_mode", "cluster_count", "extrapolation_points", "tolerance", "require_complete"}},
    {"probes", {"regime", "x", "xprime", "times", "N", "h_rho", "R_z", "count"}},
    {"outputs", {"dir", "prefix", "formats"}},
};

} // namespace

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty()) out.push_back(to_double("list", item));
    return out;
}

void ExperimentConfig::validate() const {
    try {
        model.validate();
    } catch (const GeometryError& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    if (mode_count < 1) throw ConfigError("model.mode_count must be >= 1");
    if (schedule.empty()) throw ConfigError("schedule.eps is empty");
    for (double e : schedule)
        if (!(e > 0 && e < 1)) throw ConfigError("schedule.eps entries must lie in (0, 1)");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (!(schedule[i] < schedule[i - 1])) throw ConfigError("schedule.eps must be strictly decreasing");
    if (scheme != "fv_lumped") throw ConfigError("solver.scheme '" + scheme + "' is not supported (fv_lumped)");
    if (N < 16) throw ConfigError("solver.N must be >= 16");
    if (per_mode < 1 || cluster_count < 1) throw ConfigError("solver.per_mode and solver.cluster_count must be >= 1");
    if (extrapolation_points < 2) throw ConfigError("solver.extrapolation_points must be >= 2");
    if (!(tolerance > 0)) throw ConfigError("solver.tolerance must be > 0");
    if (require_complete < 0) throw ConfigError("solver.require_complete must be >= 0");
    if (!(probe.x > 0) || !(probe.xp > 0)) throw ConfigError("probes.x and probes.xprime must be > 0");
    for (double t : probe.times)
        if (!(t > 0)) throw ConfigError("probes.times must be > 0");
    if (!(probe.h_rho > 0) || !(probe.R_z > 0)) throw ConfigError("probes.h_rho and probes.R_z must be > 0");
    if (probe.N < 16 || probe.count < 1) throw ConfigError("probes.N must be >= 16 and probes.count >= 1");
    if (!write_csv && !write_json) throw ConfigError("outputs.formats selects nothing");
}

SpectrumOptions ExperimentConfig::spectrum_options(int jobs) const {
    SpectrumOptions o;
    o.N = N;
    o.per_mode = per_mode;
    o.jobs = jobs;
    o.require_complete = require_complete;
    o.rel_tol = tolerance;
    return o;
}

FlowOptions ExperimentConfig::flow_options(int jobs) const {
    FlowOptions o;
    o.spectrum = spectrum_options(jobs);
    o.cluster_count = cluster_count;
    o.extrapolation_points = extrapolation_points;
    return o;
}

ExperimentConfig parse_config(const std::string& ini_text) {
    pt::ptree tree;
    std::istringstream in(ini_text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.message() + " at line " + std::to_string(e.line()));
    }
    for (const auto& [section, body] : tree) {
        auto it = kKeys.find(section);
        if (it == kKeys.end()) throw ConfigError("unknown section [" + section + "]");
        if (body.empty()) throw ConfigError("key '" + section + "' outside a section");
        for (const auto& kv : body)
            if (!it->second.count(kv.first)) throw ConfigError("unknown key " + section + "." + kv.first);
    }
    auto get = [&](const std::string& key) { return tree.get_optional<std::string>(pt::ptree::path_type(key, '.')); };

    ExperimentConfig c;
    int n = 3, ell_max = 0;
    double slope = 1.0, cap = 2.0;
    Profile profile = Profile::capped;
    OuterBC bc = OuterBC::dirichlet;
    try {
        if (auto v = get("model.n")) n = to_int("model.n", *v);
        if (auto v = get("model.c")) slope = to_double("model.c", *v);
        if (auto v = get("model.profile")) profile = profile_from_name(trim(*v));
        if (auto v = get("model.outer_bc")) bc = outer_bc_from_name(trim(*v));
        if (auto v = get("model.cap_match_radius")) cap = to_double("model.cap_match_radius", *v);
        if (auto v = get("model.mode_count")) c.mode_count = to_int("model.mode_count", *v);
    } catch (const GeometryError& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    if (c.mode_count < 1) throw ConfigError("model.mode_count must be >= 1");
    ell_max = c.mode_count - 1;
    if (n < 3) throw ConfigError("model.n must be >= 3");
    try {
        c.model = WarpFamily::make(n, slope, profile, ell_max, bc, cap);
    } catch (const GeometryError& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    if (auto v = get("model.potential")) c.model.potential = to_double("model.potential", *v);

    if (auto v = get("schedule.eps")) c.schedule = parse_list(*v);

    if (auto v = get("solver.N")) c.N = to_int("solver.N", *v);
    if (auto v = get("solver.scheme")) c.scheme = trim(*v);
    if (auto v = get("solver.per_mode")) c.per_mode = to_int("solver.per_mode", *v);
    if (auto v = get("solver.cluster_count")) c.cluster_count = to_int("solver.cluster_count", *v);
    if (auto v = get("solver.extrapolation_points"))
        c.extrapolation_points = to_int("solver.extrapolation_points", *v);
    if (auto v = get("solver.tolerance")) c.tolerance = to_double("solver.tolerance", *v);
    if (auto v = get("solver.require_complete")) c.require_complete = to_int("solver.require_complete", *v);

    try {
        if (auto v = get("probes.regime")) c.probe.regime = regime_from_name(trim(*v));
    } catch (const HeatError& e) {
        throw ConfigError(std::string("probes: ") + e.what());
    }
    if (auto v = get("probes.x")) c.probe.x = to_double("probes.x", *v);
    if (auto v = get("probes.xprime")) c.probe.xp = to_double("probes.xprime", *v);
    if (auto v = get("probes.times")) c.probe.times = parse_list(*v);
    if (auto v = get("probes.N")) c.probe.N = to_int("probes.N", *v);
    if (auto v = get("probes.h_rho")) c.probe.h_rho = to_double("probes.h_rho", *v);
    if (auto v = get("probes.R_z")) c.probe.R_z = to_double("probes.R_z", *v);
    if (auto v = get("probes.count")) c.probe.count = to_int("probes.count", *v);

    if (auto v = get("outputs.dir")) c.out_dir = trim(*v);
    if (auto v = get("outputs.prefix")) c.prefix = trim(*v);
    if (auto v = get("outputs.formats")) {
        c.write_csv = c.write_json = false;
        std::stringstream ss(*v);
        std::string f;
        while (std::getline(ss, f, ',')) {
            f = trim(f);
            if (f == "csv") c.write_csv = true;
            else if (f == "json") c.write_json = true;
            else if (!f.empty()) throw ConfigError("outputs.formats: unknown format '" + f + "'");
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace acclab
