#pragma once

#include <span>
#include <vector>

#include "ionheat/curve.hpp"
#include "ionheat/params.hpp"

namespace ionheat {

/// Photon-scattering model for the hyperfine detection transition, with the
/// derived coefficients of the semiclassical heating/cooling law cached.
struct ScatterModel {
    IonSpecies species;
    LaserConfig laser;

    // Derived quantities, filled by make().
    double modified_saturation = 0.0;  // s'
    double rate = 0.0;                 // full scattering rate Gamma, 1/s
    double effective_rate = 0.0;       // Gamma_0, 1/s (algebraically equal to rate)
    double recoil_energy = 0.0;        // R = (f_x + f_sx) hbar^2 k^2 / (2m), J
    double doppler_coefficient = 0.0;  // D, dimensionless, carries the sign of the detuning

    /// Isotropic mean of the squared emission projection <sin^2(theta) cos^2(phi)>.
    static constexpr double emission_geometry_mean = 1.0 / 3.0;

    static ScatterModel make(const IonSpecies& species, const LaserConfig& laser);
};

/// Zeeman-modified saturation correction s'. Throws DomainError for a zero
/// Zeeman splitting (the rate law is singular there).
double modified_saturation(const IonSpecies& species, const LaserConfig& laser);

/// Scattering rate of the detection transition, 1/s.
double scattering_rate(const IonSpecies& species, const LaserConfig& laser);

struct EffectiveCoefficients {
    double rate;           // Gamma_0, 1/s
    double recoil_energy;  // R, J
    double doppler;        // D, dimensionless, signed like the detuning
};

EffectiveCoefficients effective_coefficients(const IonSpecies& species, const LaserConfig& laser);

/// Closed-form mean occupation under continuous photon scattering:
///   E(t) = (E0 + R/D) exp(Gamma_0 D t) - R/D,   nbar = E / (hbar omega),
/// which cools to the Doppler equilibrium for red detuning, grows without
/// bound for blue detuning, and reduces to exact linear heating
/// nbar(t) = nbar(0) + Gamma_0 R t / (hbar omega) on resonance (explicit
/// branch, not a numeric limit).
double nbar_of_t(const ScatterModel& model, const TrapConfig& trap, double nbar0, double t);

/// Steady-state nbar for red detuning; DomainError if the detuning is not
/// strictly red (no finite equilibrium exists otherwise).
double doppler_equilibrium_nbar(const ScatterModel& model, const TrapConfig& trap);

/// Validity of the weak-Doppler linearization: the r.m.s. Doppler shift
/// k * v_rms implied by nbar must stay below a quarter linewidth.
bool doppler_linearization_ok(const ScatterModel& model, const TrapConfig& trap, double nbar);

/// One detuning in a scan; the saturation may differ per point.
struct DetuningScanPoint {
    double detuning = 0.0;    // rad/s, signed
    double saturation = 0.0;  // s; <= 0 means inherit the template value
};

struct DetuningScanOptions {
    double band_halfwidth = 0.0;  // rad/s; > 0 adds a min/max envelope over detuning +- half-width
    double nbar_ceiling = 0.0;    // > 0 flags curves that exceed this occupation
};

struct ScanCurve {
    double detuning = 0.0;
    double saturation = 0.0;
    double scatter_rate = 0.0;  // Gamma at this point, 1/s
    HeatingCurve curve;         // times in s; band from the detuning envelope
    std::vector<double> gamma_t;  // scattering-event count axis Gamma * t
    bool ceiling_exceeded = false;
    bool doppler_warning = false;  // linearization validity at the largest nbar reached
};

std::vector<ScanCurve> detuning_scan(const IonSpecies& species, const LaserConfig& laser_template,
                                     std::span<const DetuningScanPoint> points,
                                     const TrapConfig& trap, double nbar0,
                                     std::span<const double> t_grid,
                                     const DetuningScanOptions& options = {});

}  // namespace ionheat
