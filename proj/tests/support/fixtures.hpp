#pragma once

#include "ionheat/constants.hpp"
#include "ionheat/params.hpp"

namespace ionheat_test {

inline ionheat::IonSpecies yb171() { return ionheat::IonSpecies::yb171(); }

inline ionheat::TrapConfig radial_trap() {
    ionheat::TrapConfig t;
    t.secular_frequency = ionheat::constants::two_pi * 1.09e6;
    t.lamb_dicke_x = 0.104;
    t.lamb_dicke_y = 0.112;
    t.mode_frequency_ratio = 1.48;
    return t;
}

inline ionheat::LaserConfig detection_laser(double detuning = 0.0, double saturation = 1.27) {
    ionheat::LaserConfig l;
    l.saturation = saturation;
    l.detuning = detuning;
    l.absorption_geometry = 0.25;
    l.scatter_duration = 1e-3;
    return l;
}

}  // namespace ionheat_test
