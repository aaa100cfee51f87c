#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ionheat/constants.hpp"
#include "ionheat/errors.hpp"

namespace ionheat {

/// SplitMix64 finalizer. Used to derive statistically independent stream
/// seeds from (master_seed, stream_index) without any sequential draws, so
/// per-trajectory streams are reproducible at any degree of parallelism.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream * 0xD6E8FEB86659FD93ULL + 1ULL));
}

/// Random draws used throughout the Monte Carlo machinery. Samplers are
/// implemented here rather than taken from <random> distributions so that a
/// given seed produces the same stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via the Marsaglia polar method (second deviate cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Exponential waiting time at the given rate (1/s).
    double exponential(double rate) {
        if (!(rate > 0.0)) throw DomainError("Rng::exponential: rate must be > 0");
        double u;
        do { u = uniform(); } while (u == 0.0);
        return -std::log(u) / rate;
    }

    /// Binomial draw as a sum of Bernoulli trials; exact and portable for the
    /// shot counts used here (hundreds).
    long binomial(long n, double p) {
        if (n < 0 || !(p >= 0.0 && p <= 1.0)) throw DomainError("Rng::binomial: bad arguments");
        long k = 0;
        for (long i = 0; i < n; ++i)
            if (uniform() < p) ++k;
        return k;
    }

    /// x-projection sin(theta) cos(phi) of an isotropically emitted photon.
    double emission_projection() {
        const double cos_theta = 1.0 - 2.0 * uniform();
        const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
        const double phi = constants::two_pi * uniform();
        return sin_theta * std::cos(phi);
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ionheat
