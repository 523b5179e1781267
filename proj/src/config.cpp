#include "simz/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "simz/errors.hpp"
#include "simz/matrix_io.hpp"

namespace simz {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

IniFile IniFile::parse_string(const std::string& text) {
    IniFile ini;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(lineno), "unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno), "empty section name");
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
        if (section.empty())
            throw ConfigError(key, "key appears before any [section]");
        std::string path = section + "." + key;
        if (ini.values_.count(path)) throw ConfigError(path, "duplicate key");
        ini.values_[path] = value;
        ini.consumed_[path] = false;
    }
    return ini;
}

IniFile IniFile::parse_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config: " + path.string());
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_string(buf.str());
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    return values_.count(section + "." + key) > 0;
}

std::string IniFile::get_string(const std::string& section, const std::string& key) const {
    std::string path = section + "." + key;
    auto it = values_.find(path);
    if (it == values_.end()) throw ConfigError(path, "missing required key");
    consumed_[path] = true;
    return it->second;
}

std::string IniFile::get_string(const std::string& section, const std::string& key,
                                const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key) const {
    std::string path = section + "." + key;
    std::string raw = get_string(section, key);
    try {
        std::size_t used = 0;
        double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(path, "not a number: '" + raw + "'");
    }
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

long IniFile::get_long(const std::string& section, const std::string& key) const {
    std::string path = section + "." + key;
    std::string raw = get_string(section, key);
    try {
        std::size_t used = 0;
        long v = std::stol(raw, &used);
        if (used != raw.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(path, "not an integer: '" + raw + "'");
    }
}

long IniFile::get_long(const std::string& section, const std::string& key, long fallback) const {
    return has(section, key) ? get_long(section, key) : fallback;
}

bool IniFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    std::string path = section + "." + key;
    std::string raw = get_string(section, key);
    if (raw == "true" || raw == "1" || raw == "yes") return true;
    if (raw == "false" || raw == "0" || raw == "no") return false;
    throw ConfigError(path, "not a boolean: '" + raw + "'");
}

void IniFile::reject_unknown() const {
    for (const auto& [path, consumed] : consumed_)
        if (!consumed) throw ConfigError(path, "unknown key");
}

ExperimentConfig ExperimentConfig::from_ini(const IniFile& ini) {
    ExperimentConfig c;
    c.f0_ghz = ini.get_double("geometry", "f0_ghz", c.f0_ghz);
    c.dipole_length_lambda = ini.get_double("geometry", "dipole_length_lambda",
                                            c.dipole_length_lambda);
    c.dipole_radius_lambda = ini.get_double("geometry", "dipole_radius_lambda",
                                            c.dipole_radius_lambda);
    c.n_y = static_cast<int>(ini.get_long("geometry", "n_y", c.n_y));
    c.n_z = static_cast<int>(ini.get_long("geometry", "n_z", c.n_z));
    c.l_y = static_cast<int>(ini.get_long("geometry", "l_y", c.l_y));
    c.l_z = static_cast<int>(ini.get_long("geometry", "l_z", c.l_z));
    c.d_x_lambda = ini.get_double("geometry", "d_x_lambda", c.d_x_lambda);
    c.d_y_lambda = ini.get_double("geometry", "d_y_lambda", c.d_y_lambda);
    c.d_z_lambda = ini.get_double("geometry", "d_z_lambda", c.d_z_lambda);
    c.pairs = static_cast<int>(ini.get_long("geometry", "q"));
    c.probe_standoff_lambda = ini.get_double("geometry", "probe_standoff_lambda",
                                             c.probe_standoff_lambda);

    c.variant = parse_variant(ini.get_string("model", "variant", "d-sim"));
    c.z0_ohm = ini.get_double("model", "z0_ohm", c.z0_ohm);
    c.guard_band_rad = ini.get_double("model", "guard_band_rad", c.guard_band_rad);

    c.optimizer.max_iters = ini.get_long("optimizer", "max_iters", c.optimizer.max_iters);
    c.optimizer.stop_eps = ini.get_double("optimizer", "stop_eps", c.optimizer.stop_eps);
    c.optimizer.alpha0 = ini.get_double("optimizer", "alpha0", c.optimizer.alpha0);
    c.optimizer.shrink = ini.get_double("optimizer", "shrink", c.optimizer.shrink);
    c.optimizer.armijo_c = ini.get_double("optimizer", "armijo_c", c.optimizer.armijo_c);
    c.optimizer.starts = static_cast<int>(ini.get_long("optimizer", "starts",
                                                       c.optimizer.starts));
    c.optimizer.seed = static_cast<std::uint64_t>(ini.get_long("optimizer", "seed",
                                                               static_cast<long>(c.optimizer.seed)));
    c.optimizer.guard = c.guard_band_rad;

    std::string target = ini.get_string("task", "target", "dft");
    if (target != "dft")
        throw ConfigError("task.target", "only 'dft' is supported, got '" + target + "'");
    c.index_map = parse_index_map(ini.get_string("task", "index_map", "conventional"));

    c.output_dir = ini.get_string("output", "dir", c.output_dir.string());
    c.dump_strips = ini.get_bool("output", "dump_strips", c.dump_strips);
    c.dump_gradients = ini.get_bool("output", "dump_gradients", c.dump_gradients);
    c.sweep_points = static_cast<int>(ini.get_long("output", "sweep_points", c.sweep_points));

    ini.reject_unknown();
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    return from_ini(IniFile::parse_file(path));
}

void ExperimentConfig::validate() const {
    if (f0_ghz <= 0) throw ConfigError("geometry.f0_ghz", "must be positive");
    if (dipole_length_lambda <= 0) throw ConfigError("geometry.dipole_length_lambda",
                                                     "must be positive");
    if (dipole_radius_lambda <= 0 || dipole_radius_lambda >= dipole_length_lambda)
        throw ConfigError("geometry.dipole_radius_lambda", "must lie in (0, dipole length)");
    if (n_y < 1 || n_z < 1) throw ConfigError("geometry.n_y", "grid dims must be at least 1");
    if (l_y < 1 || l_z < 1) throw ConfigError("geometry.l_y", "grid dims must be at least 1");
    if (d_x_lambda <= 0 || d_y_lambda <= 0 || d_z_lambda <= 0)
        throw ConfigError("geometry.d_x_lambda", "spacings must be positive");
    if (pairs < 1) throw ConfigError("geometry.q", "need at least one pair");
    if (probe_standoff_lambda <= 0)
        throw ConfigError("geometry.probe_standoff_lambda", "must be positive");
    if (z0_ohm <= 0) throw ConfigError("model.z0_ohm", "must be positive");
    if (!(guard_band_rad > 0 && guard_band_rad < kPi / 2))
        throw ConfigError("model.guard_band_rad", "must lie in (0, pi/2)");
    if (sweep_points < 2) throw ConfigError("output.sweep_points", "need at least 2 angles");
    optimizer.validate();
    if (index_map == IndexMap::PaperPrinted && l_y != l_z)
        throw ConfigError("task.index_map",
                          "the paper-printed map is only a bijection for l_y == l_z");
}

DipoleGeometry ExperimentConfig::geometry() const {
    DipoleGeometry g;
    g.frequency_hz = f0_ghz * 1e9;
    double lambda = g.wavelength();
    g.dipole_length = dipole_length_lambda * lambda;
    g.wire_radius = dipole_radius_lambda * lambda;
    g.dx = d_x_lambda * lambda;
    g.dy = d_y_lambda * lambda;
    g.dz = d_z_lambda * lambda;
    g.pair_grids.assign(pairs, GridDims{n_y, n_z});
    g.pair_grids.front() = GridDims{l_y, l_z};  // first pair mirrors the probes
    g.probe_grid = GridDims{l_y, l_z};
    g.probe_dy = 0.5 * lambda;
    g.probe_dz = 0.75 * lambda;
    g.probe_standoff = probe_standoff_lambda * lambda;
    g.validate();
    return g;
}

std::string ExperimentConfig::to_ini() const {
    std::ostringstream os;
    os << "[geometry]\n";
    os << "f0_ghz = " << format_double(f0_ghz) << "\n";
    os << "dipole_length_lambda = " << format_double(dipole_length_lambda) << "\n";
    os << "dipole_radius_lambda = " << format_double(dipole_radius_lambda) << "\n";
    os << "n_y = " << n_y << "\n";
    os << "n_z = " << n_z << "\n";
    os << "l_y = " << l_y << "\n";
    os << "l_z = " << l_z << "\n";
    os << "d_x_lambda = " << format_double(d_x_lambda) << "\n";
    os << "d_y_lambda = " << format_double(d_y_lambda) << "\n";
    os << "d_z_lambda = " << format_double(d_z_lambda) << "\n";
    os << "q = " << pairs << "\n";
    os << "probe_standoff_lambda = " << format_double(probe_standoff_lambda) << "\n";
    os << "\n[model]\n";
    os << "variant = " << variant_name(variant) << "\n";
    os << "z0_ohm = " << format_double(z0_ohm) << "\n";
    os << "guard_band_rad = " << format_double(guard_band_rad) << "\n";
    os << "\n[optimizer]\n";
    os << "max_iters = " << optimizer.max_iters << "\n";
    os << "stop_eps = " << format_double(optimizer.stop_eps) << "\n";
    os << "alpha0 = " << format_double(optimizer.alpha0) << "\n";
    os << "shrink = " << format_double(optimizer.shrink) << "\n";
    os << "armijo_c = " << format_double(optimizer.armijo_c) << "\n";
    os << "starts = " << optimizer.starts << "\n";
    os << "seed = " << optimizer.seed << "\n";
    os << "\n[task]\n";
    os << "target = dft\n";
    os << "index_map = "
       << (index_map == IndexMap::YFastest ? "conventional" : "paper-printed") << "\n";
    os << "\n[output]\n";
    os << "dir = " << output_dir.string() << "\n";
    os << "dump_strips = " << (dump_strips ? "true" : "false") << "\n";
    os << "dump_gradients = " << (dump_gradients ? "true" : "false") << "\n";
    os << "sweep_points = " << sweep_points << "\n";
    return os.str();
}

}  // namespace simz
