#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ionheat/fock.hpp"
#include "ionheat/params.hpp"

namespace ionheat {

/// Flat [section] / key = value configuration text. Frequencies must carry an
/// explicit unit suffix (Hz, kHz, MHz, GHz or rad/s); Hz-family values are
/// ordinary frequencies and are converted to angular ones on read, which
/// keeps stray factors of 2*pi out of configs.
class Config {
public:
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");
    static Config parse_file(const std::string& path);

    /// Canonical form: sections and keys sorted, normalized spacing. Parsing
    /// the serialization reproduces this object.
    std::string serialize() const;

    /// FNV-1a over the canonical serialization.
    std::uint64_t hash() const;

    bool has(const std::string& section, const std::string& key) const;
    const std::string& raw(const std::string& section, const std::string& key) const;

    double number(const std::string& section, const std::string& key) const;
    double number_or(const std::string& section, const std::string& key, double fallback) const;
    long integer(const std::string& section, const std::string& key) const;
    long integer_or(const std::string& section, const std::string& key, long fallback) const;
    std::uint64_t uinteger_or(const std::string& section, const std::string& key,
                              std::uint64_t fallback) const;
    bool flag_or(const std::string& section, const std::string& key, bool fallback) const;
    std::string text_or(const std::string& section, const std::string& key,
                        const std::string& fallback) const;

    /// Angular frequency in rad/s; unit suffix required.
    double frequency(const std::string& section, const std::string& key) const;
    double frequency_or(const std::string& section, const std::string& key, double fallback) const;
    /// Comma-separated frequencies, each with its own suffix.
    std::vector<double> frequency_list(const std::string& section, const std::string& key) const;
    /// Comma-separated plain numbers.
    std::vector<double> number_list(const std::string& section, const std::string& key) const;

    double time_s(const std::string& section, const std::string& key) const;    // s/ms/us/ns
    double time_s_or(const std::string& section, const std::string& key, double fallback) const;
    double length_m(const std::string& section, const std::string& key) const;  // m/mm/um/nm
    double mass_kg(const std::string& section, const std::string& key) const;   // kg/amu

    std::vector<std::string> sections() const;

    bool operator==(const Config& other) const { return store_ == other.store_; }

private:
    std::string origin_ = "<empty>";
    std::map<std::string, std::map<std::string, std::string>> store_;
};

/// Parameter blocks every command needs, validated on load.
struct RunConfig {
    Config raw;
    IonSpecies species;
    TrapConfig trap;
    LaserConfig laser;
    std::uint64_t seed = 0;
};

RunConfig load_run_config(const std::string& path);
RunConfig run_config_from(const Config& config);

/// Initial motional state from the [initial] section: kind = ground |
/// thermal | double_thermal with their parameters.
FockDistribution initial_state_from_config(const Config& config,
                                           int n_max = default_fock_truncation);

}  // namespace ionheat
