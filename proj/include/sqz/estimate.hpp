#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sqz/opomodel.hpp"

namespace sqz {

// One parametric-gain measurement: classical amplification factor G at pump
// power P (mW), locked at the amplified phase.
struct GainPoint {
    double power_mw = 0.0;
    double gain = 1.0;
    std::optional<double> sigma{};
};

// One intracavity-loss measurement at normalized pump power x.
struct LossPoint {
    double x = 0.0;
    double loss = 0.0;
};

struct FitResult {
    double estimate = 0.0;
    double sigma = 0.0;          // 0 when undefined (single point)
    double residual_norm = 0.0;  // rms residual in the fitted observable
    int n_points = 0;
};

// Inverse of the subthreshold gain relation G = 1/(1-x)^2: x = 1 - 1/sqrt(G)
double gain_to_x(double gain);

// Exact inverse of phase_mix:
//   R_pm = (R'_pm cos^2 - R'_mp sin^2) / cos(2 theta)
// Requires theta in [0, pi/4); the mixing matrix is singular at 45 degrees.
// Errors if the recovered squeezed variance is <= 0.
QuadraturePair invert_phase_mix(const QuadraturePair& observed,
                                double theta_rms_rad);

enum class EfficiencySide { squeezed, antisqueezed, both };

// Solves the generated-level relation for the total detection efficiency
// E = eta xi^2 zeta rho at known x and Omega:
//   squeezed:      E = (1 - R_minus) ((1+x)^2 + 4 Omega^2) / (4x)
//   antisqueezed:  E = (R_plus - 1) ((1-x)^2 + 4 Omega^2) / (4x)
//   both:          least squares over the two relations, weighted by the
//                  supplied level sigmas
// The FitResult estimate is the total loss 1 - E. The two single-side
// estimates need not agree; disagreement is a property of the data and is
// reported, not averaged away, unless `both` is requested.
FitResult estimate_total_efficiency(const QuadraturePair& generated, double x,
                                    double omega, EfficiencySide side);

// Threshold from parametric-gain data, G(P) = 1/(1 - sqrt(P/P_th))^2.
// Damped Gauss-Newton with the analytic Jacobian, initialized from the
// closed-form inversion of the highest-gain point; one point is solved in
// closed form. Sigma from the linearized normal equations (0 for one point).
FitResult fit_threshold(std::span<const GainPoint> points);

struct LossLineFit {
    LossLine line;
    double sigma_intercept = 0.0;
    double sigma_slope = 0.0;
    double residual_norm = 0.0;
    int n_points = 0;
};

// Ordinary least squares for L(x) = L0 + L1 x; needs >= 2 distinct x.
LossLineFit fit_loss_line(std::span<const LossPoint> points);

// A scalar input to a resampling run: Gaussian-perturbed by sigma.
struct Perturbed {
    double mean = 0.0;
    double sigma = 0.0;
};

// Maps one vector of perturbed input values to output quantities. May throw
// sqz::Error for samples that land outside the model's domain; such samples
// count as failures.
using Pipeline = std::function<std::vector<double>(std::span<const double>)>;

struct ResampleReport {
    std::vector<FitResult> outputs;  // sample mean and standard deviation
    int n_samples = 0;
    int n_failed = 0;
};

// Monte Carlo uncertainty propagation through an arbitrary pipeline.
// Sample i perturbs input j by inputs[j].sigma using the substream
// (seed, i), so results are deterministic for a given seed no matter how
// samples are scheduled. Errors if more than 20% of samples fail.
ResampleReport resample_uncertainty(std::span<const Perturbed> inputs,
                                    const Pipeline& pipeline, int n_samples,
                                    std::uint64_t seed);

}  // namespace sqz
