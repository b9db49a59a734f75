#include "ringqed/array.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "ringqed/constants.hpp"
#include "ringqed/errors.hpp"
#include "ringqed/random.hpp"

namespace ringqed {
namespace {

void require_finite(std::span<const double> xs, const char* what) {
    for (double x : xs) {
        if (!std::isfinite(x)) throw ValidationError(std::string(what) + " must be finite");
    }
}

} // namespace

AtomArray::AtomArray(std::vector<double> positions) : positions_(std::move(positions)) {
    require_finite(positions_, "atom positions");
}

AtomArray::AtomArray(std::vector<double> positions, std::vector<TransverseOffset> transverse)
    : positions_(std::move(positions)), transverse_(std::move(transverse)) {
    require_finite(positions_, "atom positions");
    if (transverse_->size() != positions_.size()) {
        throw ValidationError("transverse offsets must have one entry per atom");
    }
    for (const auto& t : *transverse_) {
        if (!std::isfinite(t.y) || !std::isfinite(t.z)) {
            throw ValidationError("transverse offsets must be finite");
        }
    }
}

AtomArray AtomArray::from_wavelength_units(std::span<const double> positions, double wavelength) {
    std::vector<double> x(positions.begin(), positions.end());
    for (double& v : x) v *= wavelength;
    return AtomArray(std::move(x));
}

StructureFactor structure_factor(const AtomArray& a, double k) {
    if (a.empty()) throw ValidationError("empty array has no structure factor");
    std::complex<double> sum{0.0, 0.0};
    for (double x : a.positions()) sum += std::polar(1.0, 2.0 * k * x);
    return sum / static_cast<double>(a.size());
}

AtomArray lattice(int n, double spacing, double wavelength, double origin) {
    if (n < 1) throw ValidationError("lattice needs at least one atom");
    if (!(wavelength > 0.0)) throw ValidationError("wavelength must be > 0");
    const double half = 0.5 * wavelength;
    const double m = spacing / half;
    const double rounded = std::round(m);
    if (rounded < 1.0 || std::abs(m - rounded) > 1e-9 * std::max(1.0, rounded)) {
        throw ValidationError("lattice spacing must be a positive integer multiple of "
                              "wavelength/2; use free placement for other spacings");
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = origin + j * rounded * half;
    return AtomArray(std::move(x));
}

AtomArray with_target_s(int n, double target, double wavelength) {
    if (n < 1) throw ValidationError("with_target_s needs at least one atom");
    if (!(target >= 0.0 && target <= 1.0)) {
        throw ValidationError("target |S| must lie in [0, 1]");
    }
    const double k = constants::two_pi / wavelength;
    const int paired = (n % 2 == 0) ? n : n - 1;
    double d = 0.0;
    if (paired == 0) {
        if (target != 1.0) throw ValidationError("a single atom always has |S| = 1");
    } else {
        // |S| = ((paired) cos(2kd) + (n - paired)) / n
        const double c = (n * target - (n - paired)) / paired;
        d = std::acos(std::clamp(c, -1.0, 1.0)) / (2.0 * k);
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    const double half = 0.5 * wavelength;
    for (int j = 0; j < n; ++j) {
        double offset = 0.0;
        if (j < paired) offset = (j % 2 == 0) ? d : -d;
        x[static_cast<std::size_t>(j)] = j * half + offset;
    }
    return AtomArray(std::move(x));
}

AtomArray displace(const AtomArray& a, double shift) {
    std::vector<double> x(a.positions().begin(), a.positions().end());
    for (double& v : x) v += shift;
    if (a.transverse()) return AtomArray(std::move(x), *a.transverse());
    return AtomArray(std::move(x));
}

AtomArray sample_thermal(const AtomArray& a, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw ValidationError("sigma must be >= 0");
    std::vector<double> x(a.positions().begin(), a.positions().end());
    if (sigma > 0.0) {
        Rng rng(seed);
        std::normal_distribution<double> noise(0.0, sigma);
        for (double& v : x) v += noise(rng);
    }
    if (a.transverse()) return AtomArray(std::move(x), *a.transverse());
    return AtomArray(std::move(x));
}

AtomArray snap_to_grid(const AtomArray& a, double step) {
    if (!(step > 0.0)) throw ValidationError("grid step must be > 0");
    std::vector<double> x(a.positions().begin(), a.positions().end());
    for (double& v : x) v = std::round(v / step) * step;
    if (a.transverse()) return AtomArray(std::move(x), *a.transverse());
    return AtomArray(std::move(x));
}

double coupling_weight(double y, double z, double waist_y, double waist_z) {
    if (!(waist_y > 0.0) || !(waist_z > 0.0)) throw ValidationError("waists must be > 0");
    return std::exp(-(y * y) / (waist_y * waist_y) - (z * z) / (waist_z * waist_z));
}

void write_positions(std::ostream& os, const AtomArray& a) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << std::scientific << std::setprecision(16);
    const auto xs = a.positions();
    for (std::size_t j = 0; j < xs.size(); ++j) {
        out << xs[j];
        if (a.transverse()) out << ' ' << (*a.transverse())[j].y << ' ' << (*a.transverse())[j].z;
        out << '\n';
    }
    os << out.str();
}

AtomArray read_positions(std::istream& is) {
    std::vector<double> x;
    std::vector<TransverseOffset> transverse;
    std::optional<bool> has_transverse;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream in(line);
        in.imbue(std::locale::classic());
        std::vector<double> cols;
        double v = 0.0;
        while (in >> v) cols.push_back(v);
        if (!in.eof() || (cols.size() != 1 && cols.size() != 3)) {
            throw ValidationError("positions line " + std::to_string(line_no) +
                                  ": expected 'x' or 'x y z'");
        }
        const bool three = cols.size() == 3;
        if (has_transverse && *has_transverse != three) {
            throw ValidationError("positions line " + std::to_string(line_no) +
                                  ": mixed 1- and 3-column rows");
        }
        has_transverse = three;
        x.push_back(cols[0]);
        if (three) transverse.push_back({cols[1], cols[2]});
    }
    if (has_transverse.value_or(false)) return AtomArray(std::move(x), std::move(transverse));
    return AtomArray(std::move(x));
}

} // namespace ringqed
