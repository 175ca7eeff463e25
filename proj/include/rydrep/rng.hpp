#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rydrep {

/// Counter-based pseudo-random stream (SplitMix64). Every draw advances the
/// counter by a fixed increment and hashes it, so streams are reproducible
/// across platforms and can be split into independent per-trial substreams.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Independent substream for one Monte Carlo trial. Derived by folding
    /// the trial index into the seed with a second SplitMix64 pass, so trials
    /// can run in any order (or in parallel) and still reproduce bit-for-bit.
    static Rng for_trial(std::uint64_t seed, std::uint64_t trial) {
        Rng mixer(seed + 0x9E3779B97F4A7C15ULL * (trial + 1));
        return Rng(mixer.next_u64());
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

private:
    std::uint64_t state_;
};

/// Number of attempts until the first success of a Bernoulli(p) process,
/// sampled in O(1) by inverting the geometric CDF. Support {1, 2, ...}.
inline std::uint64_t sample_geometric(Rng& rng, double p) {
    if (p <= 0.0 || p > 1.0) {
        throw std::invalid_argument("sample_geometric: p must be in (0, 1]");
    }
    if (p == 1.0) {
        return 1;
    }
    double u = 1.0 - rng.next_double();  // (0, 1]
    double k = std::ceil(std::log(u) / std::log1p(-p));
    return k < 1.0 ? 1 : static_cast<std::uint64_t>(k);
}

}  // namespace rydrep
