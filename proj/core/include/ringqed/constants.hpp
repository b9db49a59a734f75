#pragma once

#include <numbers>

// CODATA 2018 values, SI units.
namespace ringqed::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double boltzmann = 1.380649e-23;        // J / K
inline constexpr double speed_of_light = 299792458.0;    // m / s
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double rb87_mass = 86.909180527 * atomic_mass_unit;

// D2 line of 87Rb, rounded the way the experiment quotes it.
inline constexpr double default_wavelength = 780e-9;

} // namespace ringqed::constants
