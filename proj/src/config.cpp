#include "sqz/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sqz/errors.hpp"

namespace sqz {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

struct RawEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& source, const std::string& key,
                    const RawEntry& entry, const std::string& token) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError(source + ":" + std::to_string(entry.line) + ": " +
                          key + ": not a number: '" + token + "'");
    return value;
}

std::string format_full(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

// Degrees value whose parse reproduces `radians` exactly. Parsed configs
// always have a degree preimage; search the neighboring doubles for it.
double degrees_for_exact_radians(double radians) {
    double deg = radians / kDegToRad;
    if (deg * kDegToRad == radians) return deg;
    for (int direction : {+1, -1}) {
        double candidate = deg;
        for (int step = 0; step < 4; ++step) {
            candidate = std::nextafter(
                candidate, direction > 0 ? HUGE_VAL : -HUGE_VAL);
            if (candidate * kDegToRad == radians) return candidate;
        }
    }
    return deg;  // off-image value; closest representation
}

}  // namespace

ExperimentConfig parse_config(const std::string& text,
                              const std::string& source_name) {
    std::map<std::string, RawEntry> entries;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source_name + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(source_name + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        if (entries.count(key))
            throw ConfigError(source_name + ":" + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
        entries[key] = {value, line_no, false};
    }

    const auto take = [&](const std::string& key) -> RawEntry* {
        const auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    };
    const auto require_number = [&](const std::string& key) {
        RawEntry* entry = take(key);
        if (!entry)
            throw ConfigError(source_name + ": missing required key '" + key +
                              "'");
        return parse_number(source_name, key, *entry, entry->value);
    };

    ExperimentConfig config;
    try {
        config.opo.transmittance = require_number("transmittance");
        config.opo.round_trip_length_m = require_number("round_trip_length_m");

        RawEntry* fixed = take("loss_fixed");
        RawEntry* intercept = take("loss_intercept");
        RawEntry* slope = take("loss_slope");
        if (fixed && (intercept || slope))
            throw ConfigError(source_name +
                              ": loss_fixed excludes loss_intercept/"
                              "loss_slope; give exactly one loss model");
        if (fixed) {
            config.opo.loss = LossModel::fixed(
                parse_number(source_name, "loss_fixed", *fixed, fixed->value));
        } else if (intercept && slope) {
            config.opo.loss = LossModel::line(
                {parse_number(source_name, "loss_intercept", *intercept,
                              intercept->value),
                 parse_number(source_name, "loss_slope", *slope,
                              slope->value)});
        } else {
            throw ConfigError(source_name +
                              ": loss model required: loss_fixed or "
                              "loss_intercept + loss_slope");
        }

        RawEntry* threshold = take("threshold_mw");
        RawEntry* gain_at_power = take("gain_at_power");
        if (threshold && gain_at_power)
            throw ConfigError(source_name +
                              ": threshold_mw excludes gain_at_power; give at "
                              "most one");
        if (threshold) {
            config.opo.threshold_mw = parse_number(
                source_name, "threshold_mw", *threshold, threshold->value);
        } else if (gain_at_power) {
            std::istringstream pair(gain_at_power->value);
            std::string gain_token, power_token, extra;
            pair >> gain_token >> power_token;
            if (gain_token.empty() || power_token.empty() || (pair >> extra))
                throw ConfigError(
                    source_name + ":" +
                    std::to_string(gain_at_power->line) +
                    ": gain_at_power: expected two numbers 'G P_mw'");
            const double gain = parse_number(source_name, "gain_at_power",
                                             *gain_at_power, gain_token);
            const double power = parse_number(source_name, "gain_at_power",
                                              *gain_at_power, power_token);
            if (!(gain > 1.0))
                throw ConfigError(source_name +
                                  ": gain_at_power: gain must be > 1");
            if (!(power > 0.0))
                throw ConfigError(source_name +
                                  ": gain_at_power: power must be > 0");
            const double d = 1.0 - 1.0 / std::sqrt(gain);
            config.opo.threshold_mw = power / (d * d);
        }

        config.chain.eta = require_number("eta");
        config.chain.xi = require_number("xi");
        config.chain.zeta = require_number("zeta");
        config.chain.theta_rms_rad = require_number("phase_rms_deg") * kDegToRad;

        if (RawEntry* floor = take("circuit_noise_db")) {
            if (floor->value == "-inf")
                config.chain.circuit_floor.level_db =
                    -std::numeric_limits<double>::infinity();
            else
                config.chain.circuit_floor.level_db = parse_number(
                    source_name, "circuit_noise_db", *floor, floor->value);
        } else {
            config.chain.circuit_floor.level_db =
                -std::numeric_limits<double>::infinity();
        }

        config.chain.measurement_freq_hz = require_number("measurement_freq_hz");

        if (RawEntry* convention = take("freq_convention")) {
            if (convention->value == "angular")
                config.chain.convention = FreqConvention::angular;
            else if (convention->value == "cyclic")
                config.chain.convention = FreqConvention::cyclic;
            else
                throw ConfigError(source_name + ":" +
                                  std::to_string(convention->line) +
                                  ": freq_convention: expected 'angular' or "
                                  "'cyclic', got '" +
                                  convention->value + "'");
        }
    } catch (const DomainError& e) {
        throw ConfigError(source_name + ": " + e.what());
    }

    for (const auto& [key, entry] : entries)
        if (!entry.used)
            throw ConfigError(source_name + ":" + std::to_string(entry.line) +
                              ": unknown key '" + key + "'");

    try {
        validate(config.opo);
        validate(config.chain);
    } catch (const DomainError& e) {
        throw ConfigError(source_name + ": " + e.what());
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_config(buffer.str(), path);
}

std::vector<std::pair<std::string, std::string>> config_key_values(
    const ExperimentConfig& config) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("transmittance", format_full(config.opo.transmittance));
    kv.emplace_back("round_trip_length_m",
                    format_full(config.opo.round_trip_length_m));
    if (const LossLine* line = config.opo.loss.as_line()) {
        kv.emplace_back("loss_intercept", format_full(line->intercept));
        kv.emplace_back("loss_slope", format_full(line->slope));
    } else {
        kv.emplace_back("loss_fixed", format_full(config.opo.loss.at(0.0)));
    }
    if (config.opo.threshold_mw)
        kv.emplace_back("threshold_mw", format_full(*config.opo.threshold_mw));
    kv.emplace_back("eta", format_full(config.chain.eta));
    kv.emplace_back("xi", format_full(config.chain.xi));
    kv.emplace_back("zeta", format_full(config.chain.zeta));
    kv.emplace_back(
        "phase_rms_deg",
        format_full(degrees_for_exact_radians(config.chain.theta_rms_rad)));
    kv.emplace_back("circuit_noise_db",
                    std::isinf(config.chain.circuit_floor.level_db)
                        ? "-inf"
                        : format_full(config.chain.circuit_floor.level_db));
    kv.emplace_back("measurement_freq_hz",
                    format_full(config.chain.measurement_freq_hz));
    kv.emplace_back("freq_convention", to_string(config.chain.convention));
    return kv;
}

std::string dump_config(const ExperimentConfig& config) {
    std::string out;
    for (const auto& [key, value] : config_key_values(config)) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    }
    return out;
}

}  // namespace sqz
