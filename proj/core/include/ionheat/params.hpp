#pragma once

#include <cmath>

#include "ionheat/constants.hpp"
#include "ionheat/errors.hpp"

namespace ionheat {

/// Atomic constants of the trapped species. All angular quantities are in
/// rad/s; the wavevector is derived from the transition wavelength and never
/// stored separately.
struct IonSpecies {
    double mass = 0.0;                   // kg
    double transition_wavelength = 0.0;  // m
    double natural_linewidth = 0.0;      // gamma, rad/s
    double zeeman_splitting = 0.0;       // delta_B, rad/s

    double wavevector() const { return constants::two_pi / transition_wavelength; }

    /// Single-photon recoil energy hbar^2 k^2 / (2 m), J.
    double recoil_energy() const {
        const double hk = constants::hbar * wavevector();
        return hk * hk / (2.0 * mass);
    }

    void validate() const {
        if (!(mass > 0.0) || !(transition_wavelength > 0.0) || !(natural_linewidth > 0.0) ||
            !(zeeman_splitting > 0.0)) {
            throw DomainError("IonSpecies: all fields must be strictly positive");
        }
    }

    /// 171Yb+ on the 369.5 nm detection transition.
    static IonSpecies yb171() {
        IonSpecies s;
        s.mass = 170.936331 * constants::atomic_mass_unit;
        s.transition_wavelength = 369.5e-9;
        s.natural_linewidth = constants::two_pi * 19.6e6;
        s.zeeman_splitting = constants::two_pi * 5.288e6;
        return s;
    }
};

/// Secular-mode parameters of the trap along the axis of interest.
struct TrapConfig {
    double secular_frequency = 0.0;  // omega, rad/s
    double lamb_dicke_x = 0.0;       // eta_x
    double lamb_dicke_y = 0.0;       // eta_y
    double mode_frequency_ratio = 1.0;  // omega_x / omega_y

    void validate() const {
        if (!(secular_frequency > 0.0)) throw DomainError("TrapConfig: secular_frequency must be > 0");
        if (!(lamb_dicke_x > 0.0 && lamb_dicke_x < 1.0) || !(lamb_dicke_y > 0.0 && lamb_dicke_y < 1.0))
            throw DomainError("TrapConfig: Lamb-Dicke parameters must be in (0, 1)");
        if (!(mode_frequency_ratio > 0.0)) throw DomainError("TrapConfig: mode_frequency_ratio must be > 0");
    }
};

/// Detection-laser parameters.
struct LaserConfig {
    double saturation = 0.0;           // s = I / I_sat
    double detuning = 0.0;             // signed, rad/s
    double absorption_geometry = 0.0;  // f_x, projection of the beam on x, in [0, 1]
    double scatter_duration = 0.0;     // s

    void validate() const {
        if (!(saturation >= 0.0)) throw DomainError("LaserConfig: saturation must be >= 0");
        if (!(absorption_geometry >= 0.0 && absorption_geometry <= 1.0))
            throw DomainError("LaserConfig: absorption_geometry must be in [0, 1]");
        if (!std::isfinite(detuning)) throw DomainError("LaserConfig: detuning must be finite");
    }
};

}  // namespace ionheat
