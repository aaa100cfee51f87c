#pragma once

namespace ionheat::constants {

// CODATA 2018 values, SI units.
inline constexpr double hbar = 1.054571817e-34;               // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace ionheat::constants
