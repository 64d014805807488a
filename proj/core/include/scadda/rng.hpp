#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace scadda {

// Seedable random stream with a fully specified draw sequence, so sampled
// datasets reproduce bit-for-bit across platforms. The engine is
// std::mt19937_64 (whose output is pinned by the standard); distribution
// draws are implemented here instead of with std::*_distribution, whose
// algorithms are implementation-defined.
//
// Stream contract:
//   uniform()      consumes one engine word: (word >> 11) * 2^-53 in [0, 1)
//   normal_pair()  consumes two words: Box-Muller on (1 - u1, u2)
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::pair<double, double> normal_pair() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1)); // log(1-u1), u1 < 1
        const double theta = 2.0 * M_PI * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

private:
    std::mt19937_64 engine_;
};

} // namespace scadda
