#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sqz/opomodel.hpp"

namespace sqz {

// A fully resolved experiment description. Parsed from flat key = value
// text; '#' starts a comment, keys are case-sensitive, decimal separator is
// the dot. Angles are degrees and powers are mW at this boundary.
//
// Keys: transmittance, round_trip_length_m, loss_fixed or
// loss_intercept + loss_slope, threshold_mw or gain_at_power ("G P_mw",
// both optional), eta, xi, zeta, phase_rms_deg, circuit_noise_db (optional,
// -inf when absent), measurement_freq_hz, freq_convention (optional,
// default angular).
struct ExperimentConfig {
    OpoParams opo;
    DetectionChain chain;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& text,
                              const std::string& source_name);
ExperimentConfig load_config(const std::string& path);

// The resolved configuration as ordered key/value pairs; gain_at_power is
// emitted as the threshold it resolved to. Used for dumps and for the
// metadata block of every output file.
std::vector<std::pair<std::string, std::string>> config_key_values(
    const ExperimentConfig& config);

// One 'key = value' line per pair; parse_config(dump_config(c)) == c.
std::string dump_config(const ExperimentConfig& config);

}  // namespace sqz
