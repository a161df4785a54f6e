#pragma once

#include <cstdint>
#include <random>

namespace evtk {

/// Seeded generator with bounded-draw helpers that do not depend on the
/// standard distributions, so identical seeds replay identically on any
/// platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed ^ 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next() % span);
    }

    /// Uniform real in [0, 1).
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Knuth Poisson sampler; intended for small means.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0)
            return 0;
        const double limit = std::exp(-mean);
        double product = uniform();
        std::uint64_t count = 0;
        while (product > limit) {
            product *= uniform();
            ++count;
        }
        return count;
    }

    /// Independent child generator for a named sub-stream.
    Rng fork(std::uint64_t stream_id) {
        return Rng(next() ^ (stream_id * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL));
    }

private:
    std::mt19937_64 engine_;
};

} // namespace evtk
