#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ringqed/array.hpp"
#include "ringqed/errors.hpp"
#include "ringqed/params.hpp"
#include "ringqed/steady.hpp"

namespace ringqed::cli {

// Config problem tied to a line of the input (0 when it came from --set or
// from a cross-field check).
class ConfigError : public ValidationError {
public:
    ConfigError(int line, const std::string& what)
        : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

// Atom arrangement with lengths in units of the wavelength:
//   lattice(n=4, spacing=0.5)   target_s(n=4, s=0.9)   positions(0, 0.5, 1.25)
struct AtomSpec {
    enum class Kind { lattice, target_s, positions };
    Kind kind = Kind::lattice;
    int n = 4;
    double spacing = 0.5;
    double s = 1.0;
    std::vector<double> positions;

    static AtomSpec parse(std::string_view text);
    std::string to_string() const;
    AtomArray build(double wavelength) const;
    bool operator==(const AtomSpec&) const = default;
};

// Everything a subcommand needs. Frequencies are ordinary frequencies in Hz,
// lengths in metres and temperatures in kelvin, exactly as written in the
// file; the angular conversion happens in cavity(), thermal() and drive().
struct RunConfig {
    // [cavity]
    double kappa_hz = 33.6e3;
    double gamma_hz = 6.07e6;
    std::optional<double> cooperativity;  // 12.5 unless g is given
    std::optional<double> g_hz;
    double eta_in = 0.03;
    double eta_out = 0.28;
    double wavelength = 780e-9;
    double fsr_hz = 1472.091e6;
    double waist_y = 6.5e-6;
    double waist_z = 8.7e-6;

    // [thermal]
    double temperature = 5.2e-6;
    double trap_frequency_hz = 120e3;
    std::optional<double> sigma;  // overrides the trap model when set

    // [drive]
    double cavity_detuning_hz = 0.0;
    double atom_detuning_hz = 30e6;
    double e_in = 1.0;

    // [sweep]
    int n_max = 9;
    double abs_s = 0.9;
    double level = 0.05;
    double purity_target = 0.98;
    std::optional<double> delta_min_hz;  // spectrum window, automatic when unset
    std::optional<double> delta_max_hz;
    int points = 801;
    double nc_min = 1.0;
    double nc_max = 1e3;
    double detuning_min_hz = 1e6;
    double detuning_max_hz = 1e9;
    int resolution = 128;
    std::vector<int> atom_numbers{1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 32, 64};
    int trials = 1000;
    double separation_max = 5.0;  // wavelengths
    int separation_points = 600;
    double offset_max = 15e-6;
    int offset_points = 61;
    double dispersive_min_hz = -80e6;
    double dispersive_max_hz = 80e6;
    int dispersive_points = 321;
    std::vector<double> displacements{0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5};  // wavelengths
    std::vector<double> phase_differences{0.4, 1.3, 2.2};
    int samples = 200;
    double point_noise = 0.0;
    double t_end_kappa = 100.0;  // integration time in units of 1/kappa

    // top level
    AtomSpec atoms;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out = ".";

    CavityParams cavity() const;
    ThermalModel thermal() const;
    DriveConfig drive() const;
    // sigma if set, otherwise the thermal spread of the trap model.
    double position_spread() const;
    double effective_cooperativity() const;

    // Cross-field checks; per-key checks happen while parsing.
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

// Flat "key = value" lines with [section] headers, '#' comments, comma
// separated lists and unit suffixes (hz, khz, mhz, ghz, m, um, nm, k, mk, uk).
// Unknown keys, repeated keys, wrong units and out-of-range values are
// rejected with the line number.
RunConfig parse_config(std::string_view text);

// One "section.key=value" (or "key=value" for top-level keys) override.
void apply_override(RunConfig& cfg, std::string_view assignment);

// Effective config in the same format; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& cfg);

} // namespace ringqed::cli
