#pragma once
#include <cmath>
#include <cstdint>
#include <random>

namespace ensopt {

// Deterministic RNG. std::normal_distribution's algorithm is
// implementation-defined, so the gaussian path is spelled out here to keep
// seeded outputs identical across standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    // Independent stream derived from (seed, tag); keeps e.g. the train and
    // debias draws on disjoint seed streams.
    static Rng stream(uint64_t seed, uint64_t tag) {
        uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Unbiased uniform integer in [0, n).
    int uniform_int(int n) {
        const uint64_t span = static_cast<uint64_t>(n);
        const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return static_cast<int>(v % span);
    }

    // Standard normal via Box-Muller; caches the second deviate.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ensopt
