#pragma once

#include <limits>
#include <optional>
#include <variant>

#include "sqz/quadmath.hpp"

namespace sqz {

inline constexpr double kLightSpeedMps = 2.99792458e8;

// Pump-dependent intracavity loss, L(x) = intercept + slope * x with x the
// normalized pump power.
struct LossLine {
    double intercept = 0.0;
    double slope = 0.0;

    bool operator==(const LossLine&) const = default;
};

// L(x) for x in [0, 1]; errors if the result leaves [0, 1)
double intracavity_loss(const LossLine& line, double x);

// Either a pump-independent loss or a fitted loss line. Which one applies is
// resolved when the configuration is loaded; operations only query at(x).
class LossModel {
public:
    LossModel() : model_(0.0) {}

    static LossModel fixed(double loss);
    static LossModel line(const LossLine& line);

    double at(double x) const;
    bool is_line() const { return std::holds_alternative<LossLine>(model_); }

    // nullptr unless this model is a line
    const LossLine* as_line() const { return std::get_if<LossLine>(&model_); }

    bool operator==(const LossModel&) const = default;

private:
    std::variant<double, LossLine> model_;
};

// Whether the normalized frequency is Omega = 2*pi*f/gamma or f/gamma.
enum class FreqConvention { angular, cyclic };

const char* to_string(FreqConvention convention);

struct OpoParams {
    double transmittance = 0.0;        // output coupler T, fraction in (0, 1)
    double round_trip_length_m = 0.0;  // cavity round trip length
    LossModel loss{};
    // oscillation threshold, mW; power enters the model only through the
    // ratio P/P_th, so any unit works as long as pump powers match
    std::optional<double> threshold_mw{};

    bool operator==(const OpoParams&) const = default;
};

struct DetectionChain {
    double eta = 1.0;   // photodiode quantum efficiency
    double xi = 1.0;    // homodyne visibility (enters squared)
    double zeta = 1.0;  // propagation efficiency
    double theta_rms_rad = 0.0;
    CircuitNoiseFloor circuit_floor{-std::numeric_limits<double>::infinity()};
    double measurement_freq_hz = 1e6;
    FreqConvention convention = FreqConvention::angular;

    bool operator==(const DetectionChain&) const = default;
};

// Squeezed/antisqueezed quadrature variances of one state, shot-normalized.
struct QuadraturePair {
    NoiseLevel squeezed;
    NoiseLevel antisqueezed;
};

// throw DomainError naming the offending field
void validate(const OpoParams& params);
void validate(const DetectionChain& chain);

// rho = T / (T + L(x))
double escape_efficiency(const OpoParams& params, double x);

// gamma = c * (T + L(x)) / l, in 1/s
double cavity_decay_rate(const OpoParams& params, double x);

// Omega = 2*pi*f/gamma (angular) or f/gamma (cyclic)
double normalized_frequency(const OpoParams& params,
                            const DetectionChain& chain, double x);

// E = eta * xi^2 * zeta * rho(x), the fraction of squeezing that survives
// escape, propagation, mode matching and photodetection
double detection_efficiency(const OpoParams& params,
                            const DetectionChain& chain, double x);

// Generated levels of the subthreshold OPO before phase jitter and detector
// noise:  R_pm = 1 +- E * 4x / ((1 -+ x)^2 + 4 Omega^2).
// x < 0 is a domain error, x >= 1 an above-threshold model error.
QuadraturePair generated_pair(const OpoParams& params,
                              const DetectionChain& chain, double x);

// Jitter mixing: R'_pm = R_pm cos^2(theta) + R_mp sin^2(theta).
// The pair sum is preserved exactly. Defined for theta in [0, pi/2];
// inversion (see estimate.hpp) additionally requires theta < pi/4.
QuadraturePair phase_mix(const QuadraturePair& pair, double theta_rms_rad);

// Full forward chain: generated -> jitter-mixed -> circuit floor applied.
// Comparable to a raw spectrum-analyzer reading normalized to shot noise.
QuadraturePair predict_observed(const OpoParams& params,
                                const DetectionChain& chain, double x);

// x = sqrt(P / P_th); both powers in the same unit. P >= P_th errors.
double pump_power_to_x(double power, double threshold);

}  // namespace sqz
