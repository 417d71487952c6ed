#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sqz::rng {

// Recorded in output metadata so a run can be reproduced by any
// implementation of the same generator chain.
inline constexpr const char* kAlgorithm =
    "mt19937_64(splitmix64(seed,stream)), 53-bit uniforms, Box-Muller normals";

// splitmix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Seed for substream `stream` of the run seed. Distinct streams are
// decorrelated by two finalizer rounds; the odd multiplier keeps the map
// injective in `stream` for a fixed seed.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed + 0x9E3779B97F4A7C15ULL * stream));
}

// One independent random stream. Results depend only on (seed, stream) and
// the draw order, never on how streams are scheduled across threads.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream)
        : engine_(substream_seed(seed, stream)) {}

    // uniform in [0, 1), 53-bit resolution
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // standard normal via Box-Muller; the paired value is cached
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * kPi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static constexpr double kPi = 3.14159265358979323846;

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace sqz::rng
