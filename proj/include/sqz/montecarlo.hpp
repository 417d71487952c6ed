#pragma once

#include <cstdint>

#include "sqz/opomodel.hpp"

namespace sqz {

enum class JitterDistribution { gaussian, uniform };

const char* to_string(JitterDistribution distribution);

struct JitterSpec {
    JitterDistribution distribution = JitterDistribution::gaussian;
    double rms_rad = 0.0;
    long n_samples = 1000000;
    std::uint64_t seed = 1;
};

struct SampledLevel {
    double mean = 0.0;
    double std_error = 0.0;  // standard error of the mean
};

struct McMixedPair {
    SampledLevel squeezed;
    SampledLevel antisqueezed;
    long n_samples = 0;
    const char* rng_algorithm;  // for output metadata
};

// Direct average of the instantaneous mixed variances over sampled phase
// errors theta_i ~ the chosen zero-mean distribution with the given rms:
//   squeezed slot:      mean of R_- cos^2(theta_i) + R_+ sin^2(theta_i)
//   antisqueezed slot:  mean of R_+ cos^2(theta_i) + R_- sin^2(theta_i)
// Deterministic for a given seed; batches use substreams of (seed, batch),
// so a parallel schedule cannot change the result.
McMixedPair mc_mixed_pair(const QuadraturePair& generated,
                          const JitterSpec& spec);

// Closed-form E[cos^2 theta] under the distribution:
//   gaussian:  (1 + exp(-2 rms^2)) / 2
//   uniform on [-sqrt(3) rms, +sqrt(3) rms]:
//              (1 + sinc(2 sqrt(3) rms)) / 2,  sinc(z) = sin(z)/z
double expected_cos_squared(JitterDistribution distribution, double rms_rad);

// How much the literal cos^2(rms)/sin^2(rms) mixing deviates from the exact
// expectation under the distribution, for the squeezed slot, in dB:
// (analytic expectation) - (literal mixing). rms up to 20 degrees.
double approximation_gap_db(const QuadraturePair& generated,
                            double theta_rms_rad,
                            JitterDistribution distribution);

}  // namespace sqz
