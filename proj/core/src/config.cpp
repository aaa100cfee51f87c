#include "ionheat/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ionheat/constants.hpp"
#include "ionheat/errors.hpp"

namespace ionheat {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct ValueWithUnit {
    double value;
    std::string unit;  // possibly empty
};

ValueWithUnit split_value_unit(const std::string& raw, const std::string& where) {
    const std::string s = trim(raw);
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE)
        throw ConfigError(where + ": not a number: '" + raw + "'");
    return {v, trim(std::string(end))};
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            cfg.store_[section];  // sections may legitimately be empty
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        if (section.empty()) throw ConfigError(where + ": key outside any [section]");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        auto& sec = cfg.store_[section];
        if (sec.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        sec[key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

std::string Config::serialize() const {
    std::string out;
    for (const auto& [section, entries] : store_) {
        out += "[" + section + "]\n";
        for (const auto& [key, value] : entries) out += key + " = " + value + "\n";
        out += "\n";
    }
    return out;
}

std::uint64_t Config::hash() const {
    const std::string text = serialize();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto sec = store_.find(section);
    return sec != store_.end() && sec->second.count(key) > 0;
}

const std::string& Config::raw(const std::string& section, const std::string& key) const {
    const auto sec = store_.find(section);
    if (sec == store_.end())
        throw ConfigError(origin_ + ": missing section [" + section + "]");
    const auto it = sec->second.find(key);
    if (it == sec->second.end())
        throw ConfigError(origin_ + ": missing key '" + key + "' in [" + section + "]");
    return it->second;
}

double Config::number(const std::string& section, const std::string& key) const {
    const std::string where = origin_ + ": [" + section + "] " + key;
    const ValueWithUnit v = split_value_unit(raw(section, key), where);
    if (!v.unit.empty() && v.unit != "/s")
        throw ConfigError(where + ": unexpected unit '" + v.unit + "' on a plain number");
    return v.value;
}

double Config::number_or(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? number(section, key) : fallback;
}

long Config::integer(const std::string& section, const std::string& key) const {
    const double v = number(section, key);
    const long l = static_cast<long>(v);
    if (static_cast<double>(l) != v)
        throw ConfigError(origin_ + ": [" + section + "] " + key + ": expected an integer");
    return l;
}

long Config::integer_or(const std::string& section, const std::string& key, long fallback) const {
    return has(section, key) ? integer(section, key) : fallback;
}

std::uint64_t Config::uinteger_or(const std::string& section, const std::string& key,
                                  std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string where = origin_ + ": [" + section + "] " + key;
    const std::string s = trim(raw(section, key));
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError(where + ": expected an unsigned integer");
    return v;
}

bool Config::flag_or(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = trim(raw(section, key));
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw ConfigError(origin_ + ": [" + section + "] " + key + ": expected a boolean");
}

std::string Config::text_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? trim(raw(section, key)) : fallback;
}

namespace {

double frequency_from(const ValueWithUnit& v, const std::string& where) {
    if (v.unit == "rad/s") return v.value;
    double mult = 0.0;
    if (v.unit == "Hz") mult = 1.0;
    else if (v.unit == "kHz") mult = 1e3;
    else if (v.unit == "MHz") mult = 1e6;
    else if (v.unit == "GHz") mult = 1e9;
    else if (v.unit.empty())
        throw ConfigError(where + ": frequencies require a unit suffix (Hz, kHz, MHz, GHz, rad/s)");
    else
        throw ConfigError(where + ": unknown frequency unit '" + v.unit + "'");
    return constants::two_pi * v.value * mult;
}

}  // namespace

double Config::frequency(const std::string& section, const std::string& key) const {
    const std::string where = origin_ + ": [" + section + "] " + key;
    return frequency_from(split_value_unit(raw(section, key), where), where);
}

double Config::frequency_or(const std::string& section, const std::string& key,
                            double fallback) const {
    return has(section, key) ? frequency(section, key) : fallback;
}

std::vector<double> Config::frequency_list(const std::string& section, const std::string& key) const {
    const std::string where = origin_ + ": [" + section + "] " + key;
    const std::string& value = raw(section, key);
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const std::size_t pos = value.find(',', start);
        const std::string item =
            pos == std::string::npos ? value.substr(start) : value.substr(start, pos - start);
        if (!trim(item).empty()) out.push_back(frequency_from(split_value_unit(item, where), where));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (out.empty()) throw ConfigError(where + ": empty list");
    return out;
}

std::vector<double> Config::number_list(const std::string& section, const std::string& key) const {
    const std::string where = origin_ + ": [" + section + "] " + key;
    const std::string& value = raw(section, key);
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const std::size_t pos = value.find(',', start);
        const std::string item =
            pos == std::string::npos ? value.substr(start) : value.substr(start, pos - start);
        if (!trim(item).empty()) {
            const ValueWithUnit v = split_value_unit(item, where);
            if (!v.unit.empty()) throw ConfigError(where + ": unexpected unit in number list");
            out.push_back(v.value);
        }
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (out.empty()) throw ConfigError(where + ": empty list");
    return out;
}

double Config::time_s(const std::string& section, const std::string& key) const {
    const std::string where = origin_ + ": [" + section + "] " + key;
    const ValueWithUnit v = split_value_unit(raw(section, key), where);
    if (v.unit == "s" || v.unit.empty()) return v.value;
    if (v.unit == "ms") return v.value * 1e-3;
    if (v.unit == "us") return v.value * 1e-6;
    if (v.unit == "ns") return v.value * 1e-9;
    throw ConfigError(where + ": unknown time unit '" + v.unit + "'");
}

double Config::time_s_or(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? time_s(section, key) : fallback;
}

double Config::length_m(const std::string& section, const std::string& key) const {
    const std::string where = origin_ + ": [" + section + "] " + key;
    const ValueWithUnit v = split_value_unit(raw(section, key), where);
    if (v.unit == "m" || v.unit.empty()) return v.value;
    if (v.unit == "mm") return v.value * 1e-3;
    if (v.unit == "um") return v.value * 1e-6;
    if (v.unit == "nm") return v.value * 1e-9;
    throw ConfigError(where + ": unknown length unit '" + v.unit + "'");
}

double Config::mass_kg(const std::string& section, const std::string& key) const {
    const std::string where = origin_ + ": [" + section + "] " + key;
    const ValueWithUnit v = split_value_unit(raw(section, key), where);
    if (v.unit == "kg" || v.unit.empty()) return v.value;
    if (v.unit == "amu") return v.value * constants::atomic_mass_unit;
    throw ConfigError(where + ": unknown mass unit '" + v.unit + "'");
}

std::vector<std::string> Config::sections() const {
    std::vector<std::string> out;
    out.reserve(store_.size());
    for (const auto& [name, entries] : store_) out.push_back(name);
    return out;
}

RunConfig run_config_from(const Config& config) {
    RunConfig rc;
    rc.raw = config;

    rc.species.mass = config.mass_kg("ion", "mass");
    rc.species.transition_wavelength = config.length_m("ion", "wavelength");
    rc.species.natural_linewidth = config.frequency("ion", "linewidth");
    rc.species.zeeman_splitting = config.frequency("ion", "zeeman_splitting");
    rc.species.validate();

    rc.trap.secular_frequency = config.frequency("trap", "frequency");
    rc.trap.lamb_dicke_x = config.number("trap", "eta_x");
    rc.trap.lamb_dicke_y = config.number_or("trap", "eta_y", rc.trap.lamb_dicke_x);
    rc.trap.mode_frequency_ratio = config.number_or("trap", "mode_ratio", 1.0);
    rc.trap.validate();

    rc.laser.saturation = config.number("laser", "saturation");
    rc.laser.detuning = config.frequency_or("laser", "detuning", 0.0);
    rc.laser.absorption_geometry = config.number_or("laser", "absorption_geometry", 0.25);
    rc.laser.scatter_duration = config.time_s_or("laser", "scatter_duration", 1e-3);
    rc.laser.validate();

    rc.seed = config.uinteger_or("run", "seed", 1);
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    return run_config_from(Config::parse_file(path));
}

FockDistribution initial_state_from_config(const Config& config, int n_max) {
    const std::string kind = config.text_or("initial", "kind", "ground");
    const int levels = static_cast<int>(config.integer_or("initial", "levels", n_max));
    if (kind == "ground") return fock_state(0, levels);
    if (kind == "thermal") return thermal_distribution(config.number("initial", "nbar"), levels);
    if (kind == "double_thermal") {
        const double p0 = config.number("initial", "p0");
        const double p1 = config.number("initial", "p1");
        DoubleThermalConstraint c;
        const std::string fixed = config.text_or("initial", "fixed", "hot_nbar");
        if (fixed == "hot_nbar")
            c = DoubleThermalConstraint::fix_hot_nbar(config.number_or("initial", "hot_nbar", 10.0));
        else if (fixed == "cold_nbar")
            c = DoubleThermalConstraint::fix_cold_nbar(config.number("initial", "cold_nbar"));
        else if (fixed == "weight")
            c = DoubleThermalConstraint::fix_weight(config.number("initial", "weight"));
        else
            throw ConfigError("[initial] fixed: unknown constraint '" + fixed + "'");
        return double_thermal_from_levels(p0, p1, c, levels);
    }
    throw ConfigError("[initial] kind: unknown initial state '" + kind + "'");
}

}  // namespace ionheat
