#include "ringqed_cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ringqed/constants.hpp"
#include "ringqed/format.hpp"

namespace ringqed::cli {
namespace {

using constants::two_pi;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return parts;
}

double parse_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) {
        throw ValidationError("'" + std::string(s) + "' is not a number");
    }
    if (!std::isfinite(v)) throw ValidationError("value must be finite");
    return v;
}

long long parse_integer(std::string_view s) {
    s = trim(s);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) {
        throw ValidationError("'" + std::string(s) + "' is not an integer");
    }
    return v;
}

enum class Dim { none, frequency, length, temperature };

const char* dim_name(Dim d) {
    switch (d) {
    case Dim::frequency: return "frequency";
    case Dim::length: return "length";
    case Dim::temperature: return "temperature";
    default: return "dimensionless";
    }
}

// Base unit written back by dump_config.
const char* base_unit(Dim d) {
    switch (d) {
    case Dim::frequency: return " hz";
    case Dim::length: return " m";
    case Dim::temperature: return " k";
    default: return "";
    }
}

double parse_quantity(std::string_view text, Dim dim) {
    text = trim(text);
    std::size_t split_at = text.size();
    while (split_at > 0 && std::isalpha(static_cast<unsigned char>(text[split_at - 1]))) --split_at;
    // A trailing exponent such as 1e6 has digits after the 'e', so only
    // letters at the very end count as a unit.
    const std::string unit = lower(text.substr(split_at));
    const double v = parse_number(text.substr(0, split_at));
    if (unit.empty()) return v;
    static const std::map<std::string, std::pair<Dim, double>> units{
        {"hz", {Dim::frequency, 1.0}},   {"khz", {Dim::frequency, 1e3}},
        {"mhz", {Dim::frequency, 1e6}},  {"ghz", {Dim::frequency, 1e9}},
        {"m", {Dim::length, 1.0}},       {"mm", {Dim::length, 1e-3}},
        {"um", {Dim::length, 1e-6}},     {"nm", {Dim::length, 1e-9}},
        {"k", {Dim::temperature, 1.0}},  {"mk", {Dim::temperature, 1e-3}},
        {"uk", {Dim::temperature, 1e-6}}};
    const auto it = units.find(unit);
    if (it == units.end()) throw ValidationError("unknown unit '" + unit + "'");
    if (it->second.first != dim) {
        throw ValidationError("unit '" + unit + "' is not a " + dim_name(dim) + " unit");
    }
    // Exact for the base unit so dumps reparse to the same double.
    return it->second.second == 1.0 ? v : v * it->second.second;
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
    return out;
}

// Value constraints checked as each key is read.
enum class Check { any, positive, nonnegative, fraction, unit_interval };

void check_value(double v, Check c) {
    switch (c) {
    case Check::positive:
        if (!(v > 0.0)) throw ValidationError("must be > 0");
        break;
    case Check::nonnegative:
        if (!(v >= 0.0)) throw ValidationError("must be >= 0");
        break;
    case Check::fraction:
        if (!(v > 0.0 && v < 1.0)) throw ValidationError("must lie in (0, 1)");
        break;
    case Check::unit_interval:
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("must lie in [0, 1]");
        break;
    case Check::any: break;
    }
}

struct KeyDef {
    std::string section;
    std::string name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::optional<std::string>(const RunConfig&)> get;
    std::string full() const { return section.empty() ? name : section + "." + name; }
};

KeyDef quantity(std::string sec, std::string name, Dim dim, double RunConfig::*m, Check c = Check::any) {
    return {std::move(sec), std::move(name),
            [=](RunConfig& r, std::string_view v) {
                const double x = parse_quantity(v, dim);
                check_value(x, c);
                r.*m = x;
            },
            [=](const RunConfig& r) -> std::optional<std::string> {
                return format_double(r.*m) + base_unit(dim);
            }};
}

KeyDef optional_quantity(std::string sec, std::string name, Dim dim, std::optional<double> RunConfig::*m,
                         Check c = Check::any) {
    return {std::move(sec), std::move(name),
            [=](RunConfig& r, std::string_view v) {
                const double x = parse_quantity(v, dim);
                check_value(x, c);
                r.*m = x;
            },
            [=](const RunConfig& r) -> std::optional<std::string> {
                if (!(r.*m)) return std::nullopt;
                return format_double(*(r.*m)) + base_unit(dim);
            }};
}

KeyDef integer(std::string sec, std::string name, int RunConfig::*m, int min) {
    return {std::move(sec), std::move(name),
            [=](RunConfig& r, std::string_view v) {
                const long long x = parse_integer(v);
                if (x < min || x > 100'000'000) {
                    throw ValidationError("must be an integer >= " + std::to_string(min));
                }
                r.*m = static_cast<int>(x);
            },
            [=](const RunConfig& r) -> std::optional<std::string> { return std::to_string(r.*m); }};
}

KeyDef number_list(std::string sec, std::string name, std::vector<double> RunConfig::*m, Check c) {
    return {std::move(sec), std::move(name),
            [=](RunConfig& r, std::string_view v) {
                std::vector<double> xs;
                for (auto part : split(v, ',')) {
                    xs.push_back(parse_number(part));
                    check_value(xs.back(), c);
                }
                r.*m = std::move(xs);
            },
            [=](const RunConfig& r) -> std::optional<std::string> {
                std::vector<std::string> parts;
                for (double x : r.*m) parts.push_back(format_double(x));
                return join(parts);
            }};
}

KeyDef integer_list(std::string sec, std::string name, std::vector<int> RunConfig::*m, int min) {
    return {std::move(sec), std::move(name),
            [=](RunConfig& r, std::string_view v) {
                std::vector<int> xs;
                for (auto part : split(v, ',')) {
                    const long long x = parse_integer(part);
                    if (x < min || x > 100'000'000) {
                        throw ValidationError("list entries must be integers >= " + std::to_string(min));
                    }
                    xs.push_back(static_cast<int>(x));
                }
                r.*m = std::move(xs);
            },
            [=](const RunConfig& r) -> std::optional<std::string> {
                std::vector<std::string> parts;
                for (int x : r.*m) parts.push_back(std::to_string(x));
                return join(parts);
            }};
}

const std::vector<KeyDef>& registry() {
    static const std::vector<KeyDef> keys = [] {
        const Dim F = Dim::frequency, L = Dim::length, T = Dim::temperature, N = Dim::none;
        std::vector<KeyDef> k{
            quantity("cavity", "kappa", F, &RunConfig::kappa_hz, Check::positive),
            quantity("cavity", "gamma", F, &RunConfig::gamma_hz, Check::positive),
            optional_quantity("cavity", "cooperativity", N, &RunConfig::cooperativity, Check::nonnegative),
            optional_quantity("cavity", "g", F, &RunConfig::g_hz, Check::nonnegative),
            quantity("cavity", "eta_in", N, &RunConfig::eta_in, Check::fraction),
            quantity("cavity", "eta_out", N, &RunConfig::eta_out, Check::fraction),
            quantity("cavity", "wavelength", L, &RunConfig::wavelength, Check::positive),
            quantity("cavity", "fsr", F, &RunConfig::fsr_hz, Check::positive),
            quantity("cavity", "waist_y", L, &RunConfig::waist_y, Check::positive),
            quantity("cavity", "waist_z", L, &RunConfig::waist_z, Check::positive),

            quantity("thermal", "temperature", T, &RunConfig::temperature, Check::positive),
            quantity("thermal", "trap_frequency", F, &RunConfig::trap_frequency_hz, Check::positive),
            optional_quantity("thermal", "sigma", L, &RunConfig::sigma, Check::nonnegative),

            quantity("drive", "cavity_detuning", F, &RunConfig::cavity_detuning_hz),
            quantity("drive", "atom_detuning", F, &RunConfig::atom_detuning_hz),
            quantity("drive", "e_in", N, &RunConfig::e_in, Check::nonnegative),

            integer("sweep", "n_max", &RunConfig::n_max, 1),
            quantity("sweep", "abs_s", N, &RunConfig::abs_s, Check::unit_interval),
            quantity("sweep", "level", N, &RunConfig::level, Check::positive),
            quantity("sweep", "purity_target", N, &RunConfig::purity_target, Check::fraction),
            optional_quantity("sweep", "delta_min", F, &RunConfig::delta_min_hz),
            optional_quantity("sweep", "delta_max", F, &RunConfig::delta_max_hz),
            integer("sweep", "points", &RunConfig::points, 2),
            quantity("sweep", "nc_min", N, &RunConfig::nc_min, Check::positive),
            quantity("sweep", "nc_max", N, &RunConfig::nc_max, Check::positive),
            quantity("sweep", "detuning_min", F, &RunConfig::detuning_min_hz, Check::positive),
            quantity("sweep", "detuning_max", F, &RunConfig::detuning_max_hz, Check::positive),
            integer("sweep", "resolution", &RunConfig::resolution, 2),
            integer_list("sweep", "atom_numbers", &RunConfig::atom_numbers, 1),
            integer("sweep", "trials", &RunConfig::trials, 2),
            quantity("sweep", "separation_max", N, &RunConfig::separation_max, Check::positive),
            integer("sweep", "separation_points", &RunConfig::separation_points, 8),
            quantity("sweep", "offset_max", L, &RunConfig::offset_max, Check::positive),
            integer("sweep", "offset_points", &RunConfig::offset_points, 3),
            quantity("sweep", "dispersive_min", F, &RunConfig::dispersive_min_hz),
            quantity("sweep", "dispersive_max", F, &RunConfig::dispersive_max_hz),
            integer("sweep", "dispersive_points", &RunConfig::dispersive_points, 2),
            number_list("sweep", "displacements", &RunConfig::displacements, Check::any),
            number_list("sweep", "phase_differences", &RunConfig::phase_differences, Check::any),
            integer("sweep", "samples", &RunConfig::samples, 8),
            quantity("sweep", "point_noise", N, &RunConfig::point_noise, Check::nonnegative),
            quantity("sweep", "t_end_kappa", N, &RunConfig::t_end_kappa, Check::positive),
        };
        k.push_back({"", "atoms",
                     [](RunConfig& r, std::string_view v) { r.atoms = AtomSpec::parse(v); },
                     [](const RunConfig& r) -> std::optional<std::string> { return r.atoms.to_string(); }});
        k.push_back({"", "seed",
                     [](RunConfig& r, std::string_view v) {
                         v = trim(v);
                         std::uint64_t x = 0;
                         const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
                         if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || v.empty()) {
                             throw ValidationError("seed must be an unsigned 64-bit integer");
                         }
                         r.seed = x;
                     },
                     [](const RunConfig& r) -> std::optional<std::string> { return std::to_string(r.seed); }});
        k.push_back({"", "threads",
                     [](RunConfig& r, std::string_view v) {
                         const long long x = parse_integer(v);
                         if (x < 1 || x > 1024) throw ValidationError("threads must be in [1, 1024]");
                         r.threads = static_cast<unsigned>(x);
                     },
                     [](const RunConfig& r) -> std::optional<std::string> { return std::to_string(r.threads); }});
        k.push_back({"", "out",
                     [](RunConfig& r, std::string_view v) {
                         v = trim(v);
                         if (v.empty()) throw ValidationError("out must not be empty");
                         r.out = std::string(v);
                     },
                     [](const RunConfig& r) -> std::optional<std::string> { return r.out; }});
        return k;
    }();
    return keys;
}

const KeyDef* find_key(const std::string& full) {
    for (const auto& k : registry()) {
        if (k.full() == full) return &k;
    }
    return nullptr;
}

void set_key(RunConfig& cfg, const std::string& full, std::string_view value, int line) {
    const KeyDef* def = find_key(full);
    if (!def) throw ConfigError(line, "unknown key '" + full + "'");
    try {
        def->set(cfg, value);
    } catch (const ConfigError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ConfigError(line, full + ": " + e.what());
    }
}

} // namespace

AtomSpec AtomSpec::parse(std::string_view text) {
    text = trim(text);
    const auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') {
        throw ValidationError("atoms must look like lattice(...), target_s(...) or positions(...)");
    }
    const std::string kind = lower(trim(text.substr(0, open)));
    const auto body = text.substr(open + 1, text.size() - open - 2);
    AtomSpec spec;
    if (kind == "positions") {
        spec.kind = Kind::positions;
        for (auto part : split(body, ',')) spec.positions.push_back(parse_number(part));
        if (spec.positions.empty()) throw ValidationError("positions() needs at least one atom");
        spec.n = static_cast<int>(spec.positions.size());
        return spec;
    }
    std::map<std::string, std::string> args;
    for (auto part : split(body, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string_view::npos) throw ValidationError("expected name=value in " + kind + "()");
        const std::string name = lower(trim(part.substr(0, eq)));
        if (!args.emplace(name, std::string(trim(part.substr(eq + 1)))).second) {
            throw ValidationError("repeated argument '" + name + "'");
        }
    }
    auto take = [&](const std::string& name) {
        const auto it = args.find(name);
        if (it == args.end()) throw ValidationError(kind + "() needs " + name + "=");
        std::string v = it->second;
        args.erase(it);
        return v;
    };
    const long long n = parse_integer(take("n"));
    if (n < 1 || n > 1'000'000) throw ValidationError("atom count must be >= 1");
    spec.n = static_cast<int>(n);
    if (kind == "lattice") {
        spec.kind = Kind::lattice;
        spec.spacing = parse_number(take("spacing"));
    } else if (kind == "target_s") {
        spec.kind = Kind::target_s;
        spec.s = parse_number(take("s"));
        if (!(spec.s >= 0.0 && spec.s <= 1.0)) throw ValidationError("s must lie in [0, 1]");
    } else {
        throw ValidationError("unknown atom arrangement '" + kind + "'");
    }
    if (!args.empty()) throw ValidationError("unexpected argument '" + args.begin()->first + "'");
    return spec;
}

std::string AtomSpec::to_string() const {
    switch (kind) {
    case Kind::lattice:
        return "lattice(n=" + std::to_string(n) + ", spacing=" + format_double(spacing) + ")";
    case Kind::target_s:
        return "target_s(n=" + std::to_string(n) + ", s=" + format_double(s) + ")";
    case Kind::positions: {
        std::vector<std::string> parts;
        for (double x : positions) parts.push_back(format_double(x));
        return "positions(" + join(parts) + ")";
    }
    }
    return {};
}

AtomArray AtomSpec::build(double wavelength) const {
    switch (kind) {
    case Kind::lattice: return lattice(n, spacing * wavelength, wavelength);
    case Kind::target_s: return with_target_s(n, s, wavelength);
    case Kind::positions: return AtomArray::from_wavelength_units(positions, wavelength);
    }
    return {};
}

double RunConfig::effective_cooperativity() const {
    if (g_hz) return 4.0 * *g_hz * *g_hz / (kappa_hz * gamma_hz);
    return cooperativity.value_or(12.5);
}

CavityParams RunConfig::cavity() const {
    CavityParams p;
    p.kappa = two_pi * kappa_hz;
    p.gamma = two_pi * gamma_hz;
    p.kappa_in = eta_in * p.kappa;
    p.kappa_out = eta_out * p.kappa;
    p.g = g_hz ? two_pi * *g_hz : g_from_cooperativity(cooperativity.value_or(12.5), p.kappa, p.gamma);
    p.wavelength = wavelength;
    p.fsr = fsr_hz;
    p.waist_y = waist_y;
    p.waist_z = waist_z;
    return p;
}

ThermalModel RunConfig::thermal() const {
    return ThermalModel{temperature, two_pi * trap_frequency_hz, constants::rb87_mass};
}

DriveConfig RunConfig::drive() const {
    return DriveConfig{two_pi * cavity_detuning_hz, two_pi * atom_detuning_hz, e_in};
}

double RunConfig::position_spread() const {
    return sigma ? *sigma : thermal_sigma(thermal());
}

void RunConfig::validate() const {
    if (cooperativity && g_hz) throw ConfigError(0, "set either cavity.cooperativity or cavity.g, not both");
    if (eta_in + eta_out > 1.0) throw ConfigError(0, "cavity.eta_in + cavity.eta_out must not exceed 1");
    if (delta_min_hz.has_value() != delta_max_hz.has_value()) {
        throw ConfigError(0, "sweep.delta_min and sweep.delta_max must be given together");
    }
    if (delta_min_hz && !(*delta_min_hz < *delta_max_hz)) {
        throw ConfigError(0, "sweep.delta_min must be below sweep.delta_max");
    }
    if (!(nc_min < nc_max)) throw ConfigError(0, "sweep.nc_min must be below sweep.nc_max");
    if (!(detuning_min_hz < detuning_max_hz)) {
        throw ConfigError(0, "sweep.detuning_min must be below sweep.detuning_max");
    }
    if (!(dispersive_min_hz < dispersive_max_hz)) {
        throw ConfigError(0, "sweep.dispersive_min must be below sweep.dispersive_max");
    }
    if (atom_numbers.empty()) throw ConfigError(0, "sweep.atom_numbers must not be empty");
    if (displacements.empty()) throw ConfigError(0, "sweep.displacements must not be empty");
    try {
        cavity().validate();
        thermal().validate();
        drive().validate();
        atoms.build(wavelength);
    } catch (const ValidationError& e) {
        throw ConfigError(0, e.what());
    }
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::string section;
    std::set<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
            section = lower(trim(line.substr(1, line.size() - 2)));
            static const std::set<std::string> known{"", "cavity", "thermal", "drive", "sweep"};
            if (!known.count(section)) throw ConfigError(line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "expected key = value");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string full = section.empty() ? key : section + "." + key;
        if (!seen.insert(full).second) throw ConfigError(line_no, "repeated key '" + full + "'");
        set_key(cfg, full, trim(line.substr(eq + 1)), line_no);
        if (end == text.size()) break;
    }
    cfg.validate();
    return cfg;
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError(0, "--set expects key=value");
    set_key(cfg, lower(trim(assignment.substr(0, eq))), trim(assignment.substr(eq + 1)), 0);
}

std::string dump_config(const RunConfig& cfg) {
    std::ostringstream os;
    std::string section;
    // Top-level keys first, since a section header scopes everything after it.
    for (const auto& k : registry()) {
        if (!k.section.empty()) continue;
        if (const auto v = k.get(cfg)) os << k.name << " = " << *v << '\n';
    }
    for (const auto& k : registry()) {
        if (k.section.empty()) continue;
        const auto v = k.get(cfg);
        if (!v) continue;
        if (k.section != section) {
            section = k.section;
            os << "\n[" << section << "]\n";
        }
        os << k.name << " = " << *v << '\n';
    }
    return os.str();
}

} // namespace ringqed::cli
