#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace cmspaces {

// Deterministic random source. Only the raw mt19937_64 stream is used (the
// standard pins its output exactly); all mappings to doubles are done here so
// that a fixed seed yields the same draws on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. No state is cached between calls.
    double gauss() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925287 * u2);
    }

    std::complex<double> complex_gauss() {
        const double re = gauss();
        const double im = gauss();
        return {re, im};
    }

    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// Stateless seed mixer used to derive independent per-item streams from a
// master seed (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace cmspaces
