#include "ionheat/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ionheat/constants.hpp"
#include "ionheat/errors.hpp"

namespace ionheat {

double modified_saturation(const IonSpecies& species, const LaserConfig& laser) {
    species.validate();
    laser.validate();
    if (species.zeeman_splitting == 0.0)
        throw DomainError("modified_saturation: zero Zeeman splitting makes the rate law singular");
    const double g = species.natural_linewidth;
    const double db = species.zeeman_splitting;
    const double s = laser.saturation;
    const double t1 = (s * g / db);
    return t1 * t1 / 216.0 + (8.0 / 3.0) * (db / g) * (db / g);
}

double scattering_rate(const IonSpecies& species, const LaserConfig& laser) {
    const double sp = modified_saturation(species, laser);
    const double g = species.natural_linewidth;
    const double d2 = 2.0 * laser.detuning / g;
    return g * (laser.saturation / 18.0) / (1.0 + sp + d2 * d2);
}

EffectiveCoefficients effective_coefficients(const IonSpecies& species, const LaserConfig& laser) {
    const double sp = modified_saturation(species, laser);
    const double g = species.natural_linewidth;
    const double delta = laser.detuning;

    EffectiveCoefficients c;
    c.rate = g * (laser.saturation / 18.0) / (1.0 + sp + 4.0 * delta * delta / (g * g));
    c.recoil_energy =
        (laser.absorption_geometry + ScatterModel::emission_geometry_mean) * species.recoil_energy();
    const double k = species.wavevector();
    c.doppler = 8.0 * delta * constants::hbar * laser.absorption_geometry * k * k /
                (species.mass * (g * g * (1.0 + sp) + 4.0 * delta * delta));
    return c;
}

ScatterModel ScatterModel::make(const IonSpecies& species, const LaserConfig& laser) {
    ScatterModel m;
    m.species = species;
    m.laser = laser;
    m.modified_saturation = ionheat::modified_saturation(species, laser);
    m.rate = ionheat::scattering_rate(species, laser);
    const EffectiveCoefficients c = effective_coefficients(species, laser);
    m.effective_rate = c.rate;
    m.recoil_energy = c.recoil_energy;
    m.doppler_coefficient = c.doppler;
    return m;
}

double nbar_of_t(const ScatterModel& model, const TrapConfig& trap, double nbar0, double t) {
    if (!(t >= 0.0)) throw DomainError("nbar_of_t: time must be >= 0");
    if (!(nbar0 >= 0.0)) throw DomainError("nbar_of_t: nbar0 must be >= 0");
    const double hw = constants::hbar * trap.secular_frequency;
    const double e0 = nbar0 * hw;
    const double g0 = model.effective_rate;
    const double r = model.recoil_energy;
    const double d = model.doppler_coefficient;

    if (model.laser.detuning == 0.0) return (e0 + g0 * r * t) / hw;

    const double x = g0 * d * t;
    if (x > 700.0) return std::numeric_limits<double>::infinity();
    const double e = e0 * std::exp(x) + (r / d) * std::expm1(x);
    return e / hw;
}

double doppler_equilibrium_nbar(const ScatterModel& model, const TrapConfig& trap) {
    if (!(model.laser.detuning < 0.0))
        throw DomainError("doppler_equilibrium_nbar: finite equilibrium requires red detuning");
    const double hw = constants::hbar * trap.secular_frequency;
    return -model.recoil_energy / (model.doppler_coefficient * hw);
}

bool doppler_linearization_ok(const ScatterModel& model, const TrapConfig& trap, double nbar) {
    if (!(nbar >= 0.0)) throw DomainError("doppler_linearization_ok: nbar must be >= 0");
    const double energy = nbar * constants::hbar * trap.secular_frequency;
    const double v_rms = std::sqrt(energy / model.species.mass);
    return model.species.wavevector() * v_rms <= model.species.natural_linewidth / 4.0;
}

std::vector<ScanCurve> detuning_scan(const IonSpecies& species, const LaserConfig& laser_template,
                                     std::span<const DetuningScanPoint> points,
                                     const TrapConfig& trap, double nbar0,
                                     std::span<const double> t_grid,
                                     const DetuningScanOptions& options) {
    if (points.empty()) throw DomainError("detuning_scan: empty detuning list");
    if (t_grid.empty()) throw DomainError("detuning_scan: empty time grid");
    trap.validate();

    std::vector<ScanCurve> curves;
    curves.reserve(points.size());
    for (const DetuningScanPoint& pt : points) {
        LaserConfig laser = laser_template;
        laser.detuning = pt.detuning;
        if (pt.saturation > 0.0) laser.saturation = pt.saturation;

        const ScatterModel center = ScatterModel::make(species, laser);
        ScanCurve sc;
        sc.detuning = pt.detuning;
        sc.saturation = laser.saturation;
        sc.scatter_rate = center.rate;

        std::vector<ScatterModel> band;
        if (options.band_halfwidth > 0.0) {
            for (double shift : {-options.band_halfwidth, options.band_halfwidth}) {
                LaserConfig perturbed = laser;
                perturbed.detuning = pt.detuning + shift;
                band.push_back(ScatterModel::make(species, perturbed));
            }
        }

        double nbar_max = nbar0;
        for (double t : t_grid) {
            const double v = nbar_of_t(center, trap, nbar0, t);
            double lo = v, hi = v;
            for (const ScatterModel& bm : band) {
                const double bv = nbar_of_t(bm, trap, nbar0, t);
                lo = std::min(lo, bv);
                hi = std::max(hi, bv);
            }
            sc.curve.times.push_back(t);
            sc.curve.values.push_back(v);
            sc.curve.ci_low.push_back(lo);
            sc.curve.ci_high.push_back(hi);
            sc.gamma_t.push_back(center.rate * t);
            nbar_max = std::max(nbar_max, v);
        }
        sc.curve.validate();
        if (options.nbar_ceiling > 0.0 && nbar_max > options.nbar_ceiling) sc.ceiling_exceeded = true;
        sc.doppler_warning = !doppler_linearization_ok(center, trap, std::isfinite(nbar_max) ? nbar_max : 0.0) ||
                             !std::isfinite(nbar_max);
        curves.push_back(std::move(sc));
    }
    return curves;
}

}  // namespace ionheat
