#include "sqz/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sqz/errors.hpp"
#include "sqz/rng.hpp"

namespace sqz {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_pair(const QuadraturePair& pair, const char* who) {
    const auto check = [&](const NoiseLevel& level) {
        if (!std::isfinite(level.value) || level.value <= 0.0)
            throw DomainError(std::string(who) +
                              ": levels must be finite and > 0");
    };
    check(pair.squeezed);
    check(pair.antisqueezed);
    if (pair.squeezed.value > pair.antisqueezed.value)
        throw DomainError(std::string(who) +
                          ": squeezed level exceeds antisqueezed level");
}

}  // namespace

double gain_to_x(double gain) {
    if (!std::isfinite(gain) || gain < 1.0)
        throw DomainError("gain_to_x: amplification factor must be >= 1");
    return 1.0 - 1.0 / std::sqrt(gain);
}

QuadraturePair invert_phase_mix(const QuadraturePair& observed,
                                double theta_rms_rad) {
    check_pair(observed, "invert_phase_mix");
    if (!std::isfinite(theta_rms_rad) || theta_rms_rad < 0.0)
        throw DomainError("invert_phase_mix: theta must be >= 0");
    if (theta_rms_rad >= kPi / 4.0)
        throw ModelError(
            "invert_phase_mix: mixing matrix is singular at 45 degrees and "
            "beyond");
    const double sin_theta = std::sin(theta_rms_rad);
    const double s2 = sin_theta * sin_theta;
    const double c2 = 1.0 - s2;
    const double cos_two_theta = c2 - s2;  // same rounding as phase_mix
    const double r_minus =
        (observed.squeezed.value * c2 - observed.antisqueezed.value * s2) /
        cos_two_theta;
    const double r_plus =
        (observed.antisqueezed.value * c2 - observed.squeezed.value * s2) /
        cos_two_theta;
    if (!std::isfinite(r_minus) || r_minus <= 0.0)
        throw ModelError(
            "invert_phase_mix: recovered squeezed variance is <= 0; observed "
            "pair is inconsistent with this jitter");
    QuadraturePair generated;
    generated.squeezed = {r_minus, observed.squeezed.sigma};
    generated.antisqueezed = {r_plus, observed.antisqueezed.sigma};
    return generated;
}

FitResult estimate_total_efficiency(const QuadraturePair& generated, double x,
                                    double omega, EfficiencySide side) {
    check_pair(generated, "estimate_total_efficiency");
    if (!std::isfinite(x) || x <= 0.0 || x >= 1.0)
        throw DomainError("estimate_total_efficiency: x must be in (0, 1)");
    if (!std::isfinite(omega) || omega < 0.0)
        throw DomainError("estimate_total_efficiency: omega must be >= 0");

    const double four_omega_sq = 4.0 * omega * omega;
    const double coeff_minus =
        4.0 * x / ((1.0 + x) * (1.0 + x) + four_omega_sq);
    const double coeff_plus = 4.0 * x / ((1.0 - x) * (1.0 - x) + four_omega_sq);
    const double depth = 1.0 - generated.squeezed.value;
    const double excess = generated.antisqueezed.value - 1.0;

    FitResult result;
    double efficiency = 0.0;
    switch (side) {
        case EfficiencySide::squeezed:
            if (depth <= 0.0)
                throw ModelError(
                    "estimate_total_efficiency: no squeezing below shot noise "
                    "at x > 0");
            efficiency = depth / coeff_minus;
            if (generated.squeezed.sigma)
                result.sigma = *generated.squeezed.sigma / coeff_minus;
            result.n_points = 1;
            break;
        case EfficiencySide::antisqueezed:
            if (excess <= 0.0)
                throw ModelError(
                    "estimate_total_efficiency: no excess noise above shot "
                    "noise at x > 0");
            efficiency = excess / coeff_plus;
            if (generated.antisqueezed.sigma)
                result.sigma = *generated.antisqueezed.sigma / coeff_plus;
            result.n_points = 1;
            break;
        case EfficiencySide::both: {
            if (depth <= 0.0 || excess <= 0.0)
                throw ModelError(
                    "estimate_total_efficiency: pair shows no squeezing or no "
                    "excess noise at x > 0");
            const bool weighted = generated.squeezed.sigma &&
                                  *generated.squeezed.sigma > 0.0 &&
                                  generated.antisqueezed.sigma &&
                                  *generated.antisqueezed.sigma > 0.0;
            const double w_minus =
                weighted ? 1.0 / (*generated.squeezed.sigma *
                                  *generated.squeezed.sigma)
                         : 1.0;
            const double w_plus =
                weighted ? 1.0 / (*generated.antisqueezed.sigma *
                                  *generated.antisqueezed.sigma)
                         : 1.0;
            const double normal =
                w_minus * coeff_minus * coeff_minus + w_plus * coeff_plus * coeff_plus;
            efficiency =
                (w_minus * coeff_minus * depth + w_plus * coeff_plus * excess) /
                normal;
            const double res_minus = efficiency * coeff_minus - depth;
            const double res_plus = efficiency * coeff_plus - excess;
            result.residual_norm =
                std::sqrt((res_minus * res_minus + res_plus * res_plus) / 2.0);
            if (weighted) {
                result.sigma = std::sqrt(1.0 / normal);
            } else {
                const double ssr =
                    res_minus * res_minus + res_plus * res_plus;
                result.sigma = std::sqrt(ssr / normal);  // s^2 = SSR/(n-1), n=2
            }
            result.n_points = 2;
            break;
        }
    }
    // tolerate rounding at the pure-state limit E = 1
    if (efficiency <= 0.0 || efficiency > 1.0 + 1e-9)
        throw ModelError(
            "estimate_total_efficiency: implied efficiency outside (0, 1]; "
            "inputs inconsistent with the model");
    result.estimate = 1.0 - efficiency;
    return result;
}

namespace {

double gain_model(double power_mw, double threshold_mw) {
    const double u = std::sqrt(power_mw / threshold_mw);
    const double d = 1.0 - u;
    return 1.0 / (d * d);
}

double gain_jacobian(double power_mw, double threshold_mw) {
    const double u = std::sqrt(power_mw / threshold_mw);
    const double d = 1.0 - u;
    return -u / (threshold_mw * d * d * d);
}

double weighted_ssr(std::span<const GainPoint> points, double threshold_mw) {
    double ssr = 0.0;
    for (const auto& p : points) {
        const double w = p.sigma && *p.sigma > 0.0 ? 1.0 / *p.sigma : 1.0;
        const double r = (gain_model(p.power_mw, threshold_mw) - p.gain) * w;
        ssr += r * r;
    }
    return ssr;
}

double closed_form_threshold(const GainPoint& p) {
    const double d = 1.0 - 1.0 / std::sqrt(p.gain);
    return p.power_mw / (d * d);
}

}  // namespace

FitResult fit_threshold(std::span<const GainPoint> points) {
    if (points.empty())
        throw DomainError("fit_threshold: no measurement points");
    for (const auto& p : points) {
        if (!std::isfinite(p.power_mw) || p.power_mw < 0.0)
            throw DomainError("fit_threshold: pump power must be >= 0");
        if (!std::isfinite(p.gain) || p.gain < 1.0)
            throw DomainError("fit_threshold: gain must be >= 1");
        if (p.sigma && (!std::isfinite(*p.sigma) || *p.sigma < 0.0))
            throw DomainError("fit_threshold: sigma must be >= 0");
    }
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i].power_mw == points[j].power_mw)
                throw DomainError("fit_threshold: pump powers must be distinct");

    // identifiable only if some point actually saw amplification
    const GainPoint* anchor = nullptr;
    for (const auto& p : points)
        if (p.power_mw > 0.0 && p.gain > 1.0 &&
            (!anchor || p.gain > anchor->gain))
            anchor = &p;
    if (!anchor)
        throw FitError(
            "fit_threshold: threshold is unidentifiable (no point with P > 0 "
            "and G > 1)");

    FitResult result;
    result.n_points = static_cast<int>(points.size());

    if (points.size() == 1) {
        result.estimate = closed_form_threshold(*anchor);
        result.sigma = 0.0;  // undefined from one point
        result.residual_norm = 0.0;
        return result;
    }

    double power_max = 0.0;
    for (const auto& p : points) power_max = std::max(power_max, p.power_mw);

    double threshold = std::max(closed_form_threshold(*anchor),
                                power_max * (1.0 + 1e-9));
    double ssr = weighted_ssr(points, threshold);

    bool converged = false;
    for (int iter = 0; iter < 100 && !converged; ++iter) {
        double jtj = 0.0;
        double jtr = 0.0;
        for (const auto& p : points) {
            const double w = p.sigma && *p.sigma > 0.0 ? 1.0 / *p.sigma : 1.0;
            const double r = (gain_model(p.power_mw, threshold) - p.gain) * w;
            const double jac = gain_jacobian(p.power_mw, threshold) * w;
            jtj += jac * jac;
            jtr += jac * r;
        }
        if (jtj == 0.0)
            throw FitError("fit_threshold: singular normal equations",
                           threshold);
        double step = -jtr / jtj;

        // damping: halve until the step stays subthreshold-consistent and
        // does not increase the weighted SSR
        bool accepted = false;
        for (int halvings = 0; halvings < 40; ++halvings) {
            const double candidate = threshold + step;
            if (candidate > power_max) {
                const double candidate_ssr = weighted_ssr(points, candidate);
                if (candidate_ssr <= ssr) {
                    converged = std::abs(step) < 1e-10 * threshold;
                    threshold = candidate;
                    ssr = candidate_ssr;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted)
            throw FitError("fit_threshold: no acceptable Gauss-Newton step",
                           threshold);
    }
    if (!converged)
        throw FitError("fit_threshold: no convergence within 100 iterations",
                       threshold);

    double jtj = 0.0;
    double raw_ssr = 0.0;
    bool all_weighted = true;
    for (const auto& p : points) {
        const double w = p.sigma && *p.sigma > 0.0 ? 1.0 / *p.sigma : 1.0;
        all_weighted = all_weighted && p.sigma && *p.sigma > 0.0;
        const double jac = gain_jacobian(p.power_mw, threshold) * w;
        jtj += jac * jac;
        const double raw = gain_model(p.power_mw, threshold) - p.gain;
        raw_ssr += raw * raw;
    }
    const double n = static_cast<double>(points.size());
    if (all_weighted) {
        result.sigma = std::sqrt(1.0 / jtj);
    } else {
        const double scale = weighted_ssr(points, threshold) / (n - 1.0);
        result.sigma = std::sqrt(scale / jtj);
    }
    result.estimate = threshold;
    result.residual_norm = std::sqrt(raw_ssr / n);
    return result;
}

LossLineFit fit_loss_line(std::span<const LossPoint> points) {
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || p.x < 0.0 || p.x > 1.0)
            throw DomainError("fit_loss_line: x must be in [0, 1]");
        if (!std::isfinite(p.loss) || p.loss < 0.0 || p.loss >= 1.0)
            throw DomainError("fit_loss_line: loss must be in [0, 1)");
    }
    std::vector<double> xs;
    for (const auto& p : points) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());
    if (std::unique(xs.begin(), xs.end()) - xs.begin() < 2)
        throw FitError("fit_loss_line: need >= 2 points with distinct x");

    const double n = static_cast<double>(points.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& p : points) {
        mean_x += p.x;
        mean_y += p.loss;
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& p : points) {
        sxx += (p.x - mean_x) * (p.x - mean_x);
        sxy += (p.x - mean_x) * (p.loss - mean_y);
    }
    const double slope = sxy / sxx;
    const double intercept = mean_y - slope * mean_x;

    double ssr = 0.0;
    for (const auto& p : points) {
        const double r = p.loss - (intercept + slope * p.x);
        ssr += r * r;
    }
    const double variance = points.size() > 2 ? ssr / (n - 2.0) : 0.0;

    LossLineFit fit;
    fit.line = {intercept, slope};
    fit.sigma_slope = std::sqrt(variance / sxx);
    fit.sigma_intercept =
        std::sqrt(variance * (1.0 / n + mean_x * mean_x / sxx));
    fit.residual_norm = std::sqrt(ssr / n);
    fit.n_points = static_cast<int>(points.size());
    return fit;
}

ResampleReport resample_uncertainty(std::span<const Perturbed> inputs,
                                    const Pipeline& pipeline, int n_samples,
                                    std::uint64_t seed) {
    if (n_samples < 100)
        throw DomainError("resample_uncertainty: n_samples must be >= 100");
    for (const auto& in : inputs) {
        if (!std::isfinite(in.mean) || !std::isfinite(in.sigma) ||
            in.sigma < 0.0)
            throw DomainError(
                "resample_uncertainty: inputs must be finite with sigma >= 0");
    }

    // Welford accumulators, filled in sample order; per-sample substreams
    // make the result independent of any parallel schedule.
    std::vector<double> mean;
    std::vector<double> m2;
    long n_ok = 0;
    int n_failed = 0;

    std::vector<double> values(inputs.size());
    for (int i = 0; i < n_samples; ++i) {
        rng::Stream stream(seed, static_cast<std::uint64_t>(i));
        for (std::size_t j = 0; j < inputs.size(); ++j)
            values[j] = inputs[j].mean + inputs[j].sigma * stream.normal();
        std::vector<double> out;
        try {
            out = pipeline(values);
        } catch (const Error&) {
            ++n_failed;
            continue;
        }
        if (mean.empty()) {
            mean.assign(out.size(), 0.0);
            m2.assign(out.size(), 0.0);
        } else if (out.size() != mean.size()) {
            throw Error(
                "resample_uncertainty: pipeline output size changed between "
                "samples");
        }
        ++n_ok;
        for (std::size_t k = 0; k < out.size(); ++k) {
            const double delta = out[k] - mean[k];
            mean[k] += delta / static_cast<double>(n_ok);
            m2[k] += delta * (out[k] - mean[k]);
        }
    }

    if (n_failed * 5 > n_samples)
        throw FitError(
            "resample_uncertainty: unstable estimate, more than 20% of "
            "samples failed");

    ResampleReport report;
    report.n_samples = n_samples;
    report.n_failed = n_failed;
    for (std::size_t k = 0; k < mean.size(); ++k) {
        FitResult r;
        r.estimate = mean[k];
        r.sigma = n_ok > 1 ? std::sqrt(m2[k] / static_cast<double>(n_ok - 1))
                           : 0.0;
        r.residual_norm = 0.0;
        r.n_points = static_cast<int>(n_ok);
        report.outputs.push_back(r);
    }
    return report;
}

}  // namespace sqz
