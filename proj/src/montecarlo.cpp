#include "sqz/montecarlo.hpp"

#include <cmath>

#include "sqz/errors.hpp"
#include "sqz/rng.hpp"

namespace sqz {

namespace {

constexpr long kBatchSize = 8192;

void check_spec(const JitterSpec& spec) {
    if (!std::isfinite(spec.rms_rad) || spec.rms_rad < 0.0)
        throw DomainError("mc_mixed_pair: rms must be finite and >= 0");
    if (spec.n_samples < 1000)
        throw DomainError("mc_mixed_pair: n_samples must be >= 1000");
}

void check_pair(const QuadraturePair& pair) {
    if (!std::isfinite(pair.squeezed.value) || pair.squeezed.value <= 0.0 ||
        !std::isfinite(pair.antisqueezed.value) ||
        pair.antisqueezed.value <= 0.0)
        throw DomainError("mc_mixed_pair: levels must be finite and > 0");
}

}  // namespace

const char* to_string(JitterDistribution distribution) {
    return distribution == JitterDistribution::gaussian ? "gaussian"
                                                        : "uniform";
}

McMixedPair mc_mixed_pair(const QuadraturePair& generated,
                          const JitterSpec& spec) {
    check_pair(generated);
    check_spec(spec);

    McMixedPair result;
    result.n_samples = spec.n_samples;
    result.rng_algorithm = rng::kAlgorithm;

    if (spec.rms_rad == 0.0) {
        // degenerate distribution: every draw is zero
        result.squeezed = {generated.squeezed.value, 0.0};
        result.antisqueezed = {generated.antisqueezed.value, 0.0};
        return result;
    }

    const double r_minus = generated.squeezed.value;
    const double r_plus = generated.antisqueezed.value;
    const double half_width = std::sqrt(3.0) * spec.rms_rad;

    double sum_sq = 0.0, sum_sq2 = 0.0;
    double sum_as = 0.0, sum_as2 = 0.0;
    const long n_batches = (spec.n_samples + kBatchSize - 1) / kBatchSize;
    for (long batch = 0; batch < n_batches; ++batch) {
        rng::Stream stream(spec.seed, static_cast<std::uint64_t>(batch));
        const long count =
            std::min(kBatchSize, spec.n_samples - batch * kBatchSize);
        double b_sq = 0.0, b_sq2 = 0.0, b_as = 0.0, b_as2 = 0.0;
        for (long i = 0; i < count; ++i) {
            const double theta =
                spec.distribution == JitterDistribution::gaussian
                    ? spec.rms_rad * stream.normal()
                    : stream.uniform(-half_width, half_width);
            const double s = std::sin(theta);
            const double s2 = s * s;
            const double c2 = 1.0 - s2;
            const double mixed_sq = r_minus * c2 + r_plus * s2;
            const double mixed_as = r_plus * c2 + r_minus * s2;
            b_sq += mixed_sq;
            b_sq2 += mixed_sq * mixed_sq;
            b_as += mixed_as;
            b_as2 += mixed_as * mixed_as;
        }
        sum_sq += b_sq;
        sum_sq2 += b_sq2;
        sum_as += b_as;
        sum_as2 += b_as2;
    }

    const double n = static_cast<double>(spec.n_samples);
    const auto finish = [n](double sum, double sum2) {
        const double mean = sum / n;
        const double variance =
            std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
        return SampledLevel{mean, std::sqrt(variance / n)};
    };
    result.squeezed = finish(sum_sq, sum_sq2);
    result.antisqueezed = finish(sum_as, sum_as2);
    return result;
}

double expected_cos_squared(JitterDistribution distribution, double rms_rad) {
    if (!std::isfinite(rms_rad) || rms_rad < 0.0)
        throw DomainError("expected_cos_squared: rms must be >= 0");
    if (distribution == JitterDistribution::gaussian)
        return 0.5 * (1.0 + std::exp(-2.0 * rms_rad * rms_rad));
    const double z = 2.0 * std::sqrt(3.0) * rms_rad;
    const double sinc = z == 0.0 ? 1.0 : std::sin(z) / z;
    return 0.5 * (1.0 + sinc);
}

double approximation_gap_db(const QuadraturePair& generated,
                            double theta_rms_rad,
                            JitterDistribution distribution) {
    check_pair(generated);
    constexpr double kMaxRms = 20.0 * 3.14159265358979323846 / 180.0;
    if (!std::isfinite(theta_rms_rad) || theta_rms_rad < 0.0 ||
        theta_rms_rad > kMaxRms)
        throw DomainError(
            "approximation_gap_db: rms must be in [0, 20] degrees");

    const double r_minus = generated.squeezed.value;
    const double r_plus = generated.antisqueezed.value;

    const double moment = expected_cos_squared(distribution, theta_rms_rad);
    const double analytic = r_minus * moment + r_plus * (1.0 - moment);

    const double s = std::sin(theta_rms_rad);
    const double s2 = s * s;
    const double literal = r_minus * (1.0 - s2) + r_plus * s2;

    return linear_to_db(analytic) - linear_to_db(literal);
}

}  // namespace sqz
