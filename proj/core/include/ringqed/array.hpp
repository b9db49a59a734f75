#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace ringqed {

struct TransverseOffset {
    double y = 0.0;
    double z = 0.0;
    bool operator==(const TransverseOffset&) const = default;
};

// Ordered axial positions (metres along the cavity axis) of the trapped
// atoms, optionally with per-atom transverse offsets from the cavity axis.
class AtomArray {
public:
    AtomArray() = default;
    explicit AtomArray(std::vector<double> positions);
    AtomArray(std::vector<double> positions, std::vector<TransverseOffset> transverse);

    // Positions given in units of the wavelength.
    static AtomArray from_wavelength_units(std::span<const double> positions, double wavelength);

    std::size_t size() const noexcept { return positions_.size(); }
    bool empty() const noexcept { return positions_.empty(); }
    std::span<const double> positions() const noexcept { return positions_; }
    const std::optional<std::vector<TransverseOffset>>& transverse() const noexcept {
        return transverse_;
    }

    bool operator==(const AtomArray&) const = default;

private:
    std::vector<double> positions_;
    std::optional<std::vector<TransverseOffset>> transverse_;
};

using StructureFactor = std::complex<double>;

// S = (1/N) sum_j exp(2 i k x_j). Throws ValidationError for an empty array.
StructureFactor structure_factor(const AtomArray& a, double wavenumber);

// origin + j * spacing, j = 0..n-1. spacing must be a positive integer
// multiple of wavelength/2 (relative slack 1e-9), so that |S| = 1.
AtomArray lattice(int n, double spacing, double wavelength, double origin = 0.0);

// Deterministic n-atom array with |S| = target. Atoms sit on a lambda/2
// lattice with alternating +d / -d offsets; for odd n the last atom stays
// on its site. n = 1 only admits target = 1.
AtomArray with_target_s(int n, double target, double wavelength);

// Rigid translation along the cavity axis.
AtomArray displace(const AtomArray& a, double shift);

// Adds i.i.d. Gaussian noise of standard deviation sigma to every axial
// position. Pure given the seed.
AtomArray sample_thermal(const AtomArray& a, double sigma, std::uint64_t seed);

// Rounds every axial position to the nearest multiple of `step` (default
// 5 nm, the tweezer positioning resolution).
AtomArray snap_to_grid(const AtomArray& a, double step = 5e-9);

// Gaussian TEM00 amplitude profile relative to the axis value.
double coupling_weight(double y, double z, double waist_y, double waist_z);

// Plain-text position list: one atom per line, "x" or "x y z" in metres.
// Blank lines and lines starting with '#' are ignored.
void write_positions(std::ostream& os, const AtomArray& a);
AtomArray read_positions(std::istream& is);

} // namespace ringqed
