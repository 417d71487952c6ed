#pragma once

#include <optional>

namespace sqz {

// A shot-normalized linear noise variance; 1.0 is the shot noise level.
// The optional sigma is a 1-sigma absolute uncertainty in the same units.
// Operations carry sigma through unchanged; propagation is done by
// resampling (see estimate.hpp), never term by term.
struct NoiseLevel {
    double value = 1.0;
    std::optional<double> sigma{};

    bool operator==(const NoiseLevel&) const = default;
};

// Detector dark-noise power relative to shot noise, strictly below 0 dB.
// -infinity means no measurable floor.
struct CircuitNoiseFloor {
    double level_db;

    // shot-normalized linear floor; 0 when the floor is -infinity
    double linear() const;

    bool operator==(const CircuitNoiseFloor&) const = default;
};

// power ratio = 10^(dB/10); rejects non-finite input
double db_to_linear(double level_db);

// dB = 10*log10(ratio); rejects ratio <= 0
double linear_to_db(double ratio);

// Removes the circuit-noise floor from a measured level:
//   (observed - n_c) / (1 - n_c),  n_c = floor.linear()
// The division renormalizes against a shot-noise reference that itself
// contains the floor. Errors if the observation is at or below the floor.
NoiseLevel subtract_circuit_noise(const NoiseLevel& observed,
                                  const CircuitNoiseFloor& floor);

// Forward direction, the exact inverse of subtract_circuit_noise:
//   value * (1 - n_c) + n_c
NoiseLevel add_circuit_noise(const NoiseLevel& level,
                             const CircuitNoiseFloor& floor);

}  // namespace sqz
