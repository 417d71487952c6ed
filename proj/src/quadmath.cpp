#include "sqz/quadmath.hpp"

#include <cmath>
#include <string>

#include "sqz/errors.hpp"

namespace sqz {

namespace {

void check_level(const NoiseLevel& level, const char* who) {
    if (!std::isfinite(level.value) || level.value <= 0.0)
        throw DomainError(std::string(who) +
                          ": noise level must be finite and > 0");
    if (level.sigma && (!std::isfinite(*level.sigma) || *level.sigma < 0.0))
        throw DomainError(std::string(who) +
                          ": sigma must be finite and >= 0");
}

void check_floor(const CircuitNoiseFloor& floor, const char* who) {
    // NaN fails the comparison; -infinity passes (no floor)
    if (!(floor.level_db < 0.0))
        throw DomainError(std::string(who) +
                          ": circuit noise floor must be < 0 dB");
}

}  // namespace

double CircuitNoiseFloor::linear() const {
    return std::isinf(level_db) ? 0.0 : std::pow(10.0, level_db / 10.0);
}

double db_to_linear(double level_db) {
    if (!std::isfinite(level_db))
        throw DomainError("db_to_linear: input must be finite");
    return std::pow(10.0, level_db / 10.0);
}

double linear_to_db(double ratio) {
    if (!std::isfinite(ratio) || ratio <= 0.0)
        throw DomainError("linear_to_db: ratio must be finite and > 0");
    return 10.0 * std::log10(ratio);
}

NoiseLevel subtract_circuit_noise(const NoiseLevel& observed,
                                  const CircuitNoiseFloor& floor) {
    check_level(observed, "subtract_circuit_noise");
    check_floor(floor, "subtract_circuit_noise");
    const double nc = floor.linear();
    if (observed.value <= nc)
        throw ModelError(
            "subtract_circuit_noise: observed level at or below the circuit "
            "noise floor; not a physical measurement");
    return {(observed.value - nc) / (1.0 - nc), observed.sigma};
}

NoiseLevel add_circuit_noise(const NoiseLevel& level,
                             const CircuitNoiseFloor& floor) {
    check_level(level, "add_circuit_noise");
    check_floor(floor, "add_circuit_noise");
    const double nc = floor.linear();
    return {level.value * (1.0 - nc) + nc, level.sigma};
}

}  // namespace sqz
