#include "sqz/opomodel.hpp"

#include <cmath>
#include <string>

#include "sqz/errors.hpp"

namespace sqz {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_x_subthreshold(double x, const char* who) {
    if (!std::isfinite(x) || x < 0.0)
        throw DomainError(std::string(who) +
                          ": normalized pump power must be finite and >= 0");
    if (x >= 1.0)
        throw ModelError(std::string(who) +
                         ": pump at or above threshold (x >= 1)");
}

}  // namespace

double intracavity_loss(const LossLine& line, double x) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0)
        throw DomainError("intracavity_loss: x must be in [0, 1]");
    const double loss = line.intercept + line.slope * x;
    if (!std::isfinite(loss) || loss < 0.0 || loss >= 1.0)
        throw ModelError("intracavity_loss: L(x) outside [0, 1)");
    return loss;
}

LossModel LossModel::fixed(double loss) {
    if (!std::isfinite(loss) || loss < 0.0 || loss >= 1.0)
        throw DomainError("loss_fixed: must be in [0, 1)");
    LossModel m;
    m.model_ = loss;
    return m;
}

LossModel LossModel::line(const LossLine& line) {
    // endpoints suffice: L is affine in x
    if (!std::isfinite(line.intercept) || !std::isfinite(line.slope) ||
        line.intercept < 0.0)
        throw DomainError("loss_line: intercept must be finite and >= 0");
    if (line.intercept >= 1.0 || line.intercept + line.slope < 0.0 ||
        line.intercept + line.slope >= 1.0)
        throw DomainError("loss_line: L(x) must stay in [0, 1) on [0, 1]");
    LossModel m;
    m.model_ = line;
    return m;
}

double LossModel::at(double x) const {
    if (const auto* ln = std::get_if<LossLine>(&model_))
        return intracavity_loss(*ln, x);
    return std::get<double>(model_);
}

const char* to_string(FreqConvention convention) {
    return convention == FreqConvention::angular ? "angular" : "cyclic";
}

void validate(const OpoParams& params) {
    if (!std::isfinite(params.transmittance) || params.transmittance <= 0.0 ||
        params.transmittance >= 1.0)
        throw DomainError("transmittance: must be in (0, 1)");
    if (!std::isfinite(params.round_trip_length_m) ||
        params.round_trip_length_m <= 0.0)
        throw DomainError("round_trip_length_m: must be > 0");
    if (params.threshold_mw &&
        (!std::isfinite(*params.threshold_mw) || *params.threshold_mw <= 0.0))
        throw DomainError("threshold_mw: must be > 0");
    params.loss.at(0.0);  // rejects an invalid loss model
    params.loss.at(1.0);
}

void validate(const DetectionChain& chain) {
    const auto check_fraction = [](double v, const char* name) {
        if (!std::isfinite(v) || v <= 0.0 || v > 1.0)
            throw DomainError(std::string(name) + ": must be in (0, 1]");
    };
    check_fraction(chain.eta, "eta");
    check_fraction(chain.xi, "xi");
    check_fraction(chain.zeta, "zeta");
    if (!std::isfinite(chain.theta_rms_rad) || chain.theta_rms_rad < 0.0 ||
        chain.theta_rms_rad >= kPi / 4.0)
        throw DomainError("phase_rms_deg: must be in [0, 45) degrees");
    if (!(chain.circuit_floor.level_db < 0.0))
        throw DomainError("circuit_noise_db: must be < 0");
    if (!std::isfinite(chain.measurement_freq_hz) ||
        chain.measurement_freq_hz <= 0.0)
        throw DomainError("measurement_freq_hz: must be > 0");
}

double escape_efficiency(const OpoParams& params, double x) {
    const double loss = params.loss.at(x);
    return params.transmittance / (params.transmittance + loss);
}

double cavity_decay_rate(const OpoParams& params, double x) {
    return kLightSpeedMps * (params.transmittance + params.loss.at(x)) /
           params.round_trip_length_m;
}

double normalized_frequency(const OpoParams& params,
                            const DetectionChain& chain, double x) {
    const double gamma = cavity_decay_rate(params, x);
    const double scale =
        chain.convention == FreqConvention::angular ? 2.0 * kPi : 1.0;
    return scale * chain.measurement_freq_hz / gamma;
}

double detection_efficiency(const OpoParams& params,
                            const DetectionChain& chain, double x) {
    return chain.eta * chain.xi * chain.xi * chain.zeta *
           escape_efficiency(params, x);
}

QuadraturePair generated_pair(const OpoParams& params,
                              const DetectionChain& chain, double x) {
    check_x_subthreshold(x, "generated_pair");
    const double efficiency = detection_efficiency(params, chain, x);
    const double omega = normalized_frequency(params, chain, x);
    const double four_omega_sq = 4.0 * omega * omega;
    const double d_minus = (1.0 + x) * (1.0 + x) + four_omega_sq;
    const double d_plus = (1.0 - x) * (1.0 - x) + four_omega_sq;
    // 1 -+ E 4x / d, rearranged into pure sums: no cancellation as x -> 1,
    // and the purity product R+ R- = 1 at E = 1 holds to machine precision
    const double squeezed =
        (d_plus + 4.0 * x * (1.0 - efficiency)) / d_minus;
    const double antisqueezed = (d_plus + 4.0 * x * efficiency) / d_plus;
    if (!std::isfinite(squeezed) || squeezed <= 0.0 ||
        !std::isfinite(antisqueezed))
        throw ModelError("generated_pair: non-physical result");
    return {{squeezed, {}}, {antisqueezed, {}}};
}

QuadraturePair phase_mix(const QuadraturePair& pair, double theta_rms_rad) {
    if (!std::isfinite(theta_rms_rad) || theta_rms_rad < 0.0 ||
        theta_rms_rad > kPi / 2.0)
        throw DomainError("phase_mix: theta must be in [0, pi/2]");
    const double sin_theta = std::sin(theta_rms_rad);
    const double s2 = sin_theta * sin_theta;
    const double c2 = 1.0 - s2;  // keeps the pair sum exact
    const double r_minus = pair.squeezed.value;
    const double r_plus = pair.antisqueezed.value;
    QuadraturePair mixed;
    mixed.squeezed = {r_minus * c2 + r_plus * s2, pair.squeezed.sigma};
    mixed.antisqueezed = {r_plus * c2 + r_minus * s2, pair.antisqueezed.sigma};
    return mixed;
}

QuadraturePair predict_observed(const OpoParams& params,
                                const DetectionChain& chain, double x) {
    const QuadraturePair mixed =
        phase_mix(generated_pair(params, chain, x), chain.theta_rms_rad);
    QuadraturePair observed;
    observed.squeezed = add_circuit_noise(mixed.squeezed, chain.circuit_floor);
    observed.antisqueezed =
        add_circuit_noise(mixed.antisqueezed, chain.circuit_floor);
    return observed;
}

double pump_power_to_x(double power, double threshold) {
    if (!std::isfinite(threshold) || threshold <= 0.0)
        throw DomainError("pump_power_to_x: threshold must be > 0");
    if (!std::isfinite(power) || power < 0.0)
        throw DomainError("pump_power_to_x: power must be >= 0");
    if (power >= threshold)
        throw ModelError("pump_power_to_x: pump power at or above threshold");
    return std::sqrt(power / threshold);
}

}  // namespace sqz
