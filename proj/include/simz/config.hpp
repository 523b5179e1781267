#ifndef SIMZ_CONFIG_HPP
#define SIMZ_CONFIG_HPP

#include <filesystem>
#include <map>
#include <string>

#include "simz/dft_task.hpp"
#include "simz/dipole.hpp"

namespace simz {

// Parsed "[section] key = value" text.  Strict: unknown sections/keys and
// malformed values fail with the full field path.
class IniFile {
public:
    static IniFile parse_file(const std::filesystem::path& path);
    static IniFile parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_long(const std::string& section, const std::string& key) const;
    long get_long(const std::string& section, const std::string& key, long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    // every key must have been consumed by a get_*; leftovers are mistakes
    void reject_unknown() const;

private:
    std::map<std::string, std::string> values_;  // "section.key" -> value
    mutable std::map<std::string, bool> consumed_;
};

struct ExperimentConfig {
    // geometry (lengths in wavelengths where the key names say so)
    double f0_ghz = 28.0;
    double dipole_length_lambda = 0.46;
    double dipole_radius_lambda = 1.0 / 500.0;
    int n_y = 16, n_z = 4;  // inner T-RIS grids
    int l_y = 4, l_z = 2;   // probe grid, also the first pair
    double d_x_lambda = 1.0;
    double d_y_lambda = 0.5;
    double d_z_lambda = 0.75;
    int pairs = 3;  // geometry.q
    double probe_standoff_lambda = 1.0;

    // model
    Variant variant = Variant::DSim;
    double z0_ohm = kDefaultZ0;
    double guard_band_rad = kDefaultGuard;

    // optimizer
    OptimizerConfig optimizer;

    // task
    IndexMap index_map = IndexMap::YFastest;

    // output
    std::filesystem::path output_dir = "out";
    bool dump_strips = false;
    bool dump_gradients = false;
    int sweep_points = 181;

    static ExperimentConfig from_ini(const IniFile& ini);
    static ExperimentConfig load(const std::filesystem::path& path);
    std::string to_ini() const;  // canonical form; reparsing reproduces *this

    DipoleGeometry geometry() const;
    void validate() const;
};

}  // namespace simz

#endif
