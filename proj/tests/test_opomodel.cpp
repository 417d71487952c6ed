#include <cmath>
#include <random>

#include <doctest.h>

#include "sqz/errors.hpp"
#include "sqz/opomodel.hpp"

using namespace sqz;

namespace {

constexpr double kDeg = 3.14159265358979323846 / 180.0;

// measured cavity with the pump-on loss at 100 mW
OpoParams measured_params_fixed_loss() {
    OpoParams p;
    p.transmittance = 0.123;
    p.round_trip_length_m = 0.5;
    p.loss = LossModel::fixed(0.0038);
    p.threshold_mw = 180.0;
    return p;
}

OpoParams measured_params_loss_line() {
    OpoParams p = measured_params_fixed_loss();
    p.loss = LossModel::line({0.00249, 0.00222});
    return p;
}

DetectionChain measured_chain() {
    DetectionChain c;
    c.eta = 0.998;
    c.xi = 0.988;
    c.zeta = 0.99;
    c.theta_rms_rad = 1.5 * kDeg;
    c.circuit_floor = {-21.7};
    c.measurement_freq_hz = 1e6;
    c.convention = FreqConvention::angular;
    return c;
}

// unit-efficiency chain with negligible measurement frequency, so Omega ~ 0
DetectionChain ideal_chain(double theta_deg) {
    DetectionChain c;
    c.theta_rms_rad = theta_deg * kDeg;
    c.measurement_freq_hz = 1e-9;
    return c;
}

}  // namespace

TEST_CASE("intracavity_loss evaluates the fitted line") {
    const LossLine fitted{0.00249, 0.00222};
    CHECK(intracavity_loss(fitted, 0.0) == 0.00249);
    CHECK(intracavity_loss(fitted, 1.0) == doctest::Approx(0.00471).epsilon(1e-12));
    CHECK(intracavity_loss({0.004, 0.0}, 0.3) == 0.004);
    CHECK_THROWS_AS(intracavity_loss(fitted, -0.1), DomainError);
    CHECK_THROWS_AS(intracavity_loss(fitted, 1.5), DomainError);
    CHECK_THROWS_AS(intracavity_loss({0.5, 0.6}, 0.9), ModelError);
}

TEST_CASE("loss model construction rejects invalid models") {
    CHECK_THROWS_AS(LossModel::fixed(-0.1), DomainError);
    CHECK_THROWS_AS(LossModel::fixed(1.0), DomainError);
    CHECK_THROWS_AS(LossModel::line({-0.001, 0.002}), DomainError);
    CHECK_THROWS_AS(LossModel::line({0.5, 0.6}), DomainError);
    CHECK(LossModel::line({0.00249, 0.00222}).is_line());
    CHECK_FALSE(LossModel::fixed(0.0038).is_line());
}

TEST_CASE("escape_efficiency matches the measured improvement") {
    CHECK(escape_efficiency(measured_params_fixed_loss(), 0.0) ==
          doctest::Approx(0.9700315457413249).epsilon(1e-12));
    CHECK(escape_efficiency(measured_params_fixed_loss(), 0.0) ==
          doctest::Approx(0.97).epsilon(5e-4));

    OpoParams old = measured_params_fixed_loss();
    old.loss = LossModel::fixed(0.0063);
    CHECK(escape_efficiency(old, 0.0) ==
          doctest::Approx(0.951276102088167).epsilon(1e-12));

    OpoParams lossless = measured_params_fixed_loss();
    lossless.loss = LossModel::fixed(0.0);
    CHECK(escape_efficiency(lossless, 0.0) == 1.0);
}

TEST_CASE("normalized_frequency in both conventions") {
    const OpoParams params = measured_params_fixed_loss();
    DetectionChain chain = measured_chain();

    CHECK(cavity_decay_rate(params, 0.0) ==
          doctest::Approx(76027367.3488).epsilon(1e-12));

    chain.convention = FreqConvention::cyclic;
    CHECK(normalized_frequency(params, chain, 0.0) ==
          doctest::Approx(0.01315315832800284).epsilon(1e-12));
    chain.convention = FreqConvention::angular;
    const double angular = normalized_frequency(params, chain, 0.0);
    CHECK(angular == doctest::Approx(0.08264373114951426).epsilon(1e-12));

    // Omega is linear in the measurement frequency and vanishes with it
    chain.measurement_freq_hz = 2e6;
    CHECK(normalized_frequency(params, chain, 0.0) ==
          doctest::Approx(2.0 * angular).epsilon(1e-15));
    chain.measurement_freq_hz = 1e-12;
    CHECK(normalized_frequency(params, chain, 0.0) < 1e-16);
}

TEST_CASE("generated_pair at the vacuum limit") {
    const QuadraturePair vac =
        generated_pair(measured_params_fixed_loss(), measured_chain(), 0.0);
    CHECK(vac.squeezed.value == 1.0);
    CHECK(vac.antisqueezed.value == 1.0);
}

TEST_CASE("generated_pair pure-state point (E=1, Omega=0, x=0.5)") {
    OpoParams params = measured_params_fixed_loss();
    params.loss = LossModel::fixed(0.0);
    const QuadraturePair pair = generated_pair(params, ideal_chain(0.0), 0.5);
    CHECK(pair.squeezed.value == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(pair.antisqueezed.value == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("generated_pair at the measured operating point") {
    const double x = pump_power_to_x(100.0, 180.0);
    const QuadraturePair pair =
        generated_pair(measured_params_fixed_loss(), measured_chain(), x);
    CHECK(pair.squeezed.value ==
          doctest::Approx(0.09250625048127448).epsilon(1e-9));
    CHECK(pair.antisqueezed.value ==
          doctest::Approx(31.264268992447946).epsilon(1e-9));
    CHECK(linear_to_db(pair.squeezed.value) ==
          doctest::Approx(-10.338289217710642).epsilon(1e-9));
    CHECK(linear_to_db(pair.antisqueezed.value) ==
          doctest::Approx(14.950482786505411).epsilon(1e-9));
}

TEST_CASE("generated_pair domain errors") {
    CHECK_THROWS_AS(generated_pair(measured_params_fixed_loss(), measured_chain(), -0.1),
                    DomainError);
    CHECK_THROWS_AS(generated_pair(measured_params_fixed_loss(), measured_chain(), 1.0),
                    ModelError);
    CHECK_THROWS_AS(generated_pair(measured_params_fixed_loss(), measured_chain(), 1.7),
                    ModelError);
}

TEST_CASE("generated_pair purity: R+ R- = 1 at unit efficiency, any Omega") {
    OpoParams params = measured_params_fixed_loss();
    params.loss = LossModel::fixed(0.0);
    DetectionChain unit = ideal_chain(0.0);
    for (double f : {1e-9, 1e6}) {
        unit.measurement_freq_hz = f;
        for (double x = 0.0; x < 1.0; x += 0.03) {
            const QuadraturePair pair = generated_pair(params, unit, x);
            CHECK(pair.squeezed.value * pair.antisqueezed.value ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    // with E < 1 the state is impure: R+ R- > 1
    const QuadraturePair lossy =
        generated_pair(measured_params_fixed_loss(), measured_chain(), 0.5);
    CHECK(lossy.squeezed.value * lossy.antisqueezed.value > 1.0);
}

TEST_CASE("generated_pair straddles shot noise for any x > 0") {
    for (double x = 0.01; x < 1.0; x += 0.01) {
        const QuadraturePair pair =
            generated_pair(measured_params_fixed_loss(), measured_chain(), x);
        CHECK(pair.squeezed.value < 1.0);
        CHECK(pair.antisqueezed.value > 1.0);
        CHECK(pair.squeezed.value <= pair.antisqueezed.value);
    }
}

TEST_CASE("generated_pair is monotone in detection efficiency") {
    DetectionChain better = measured_chain();
    DetectionChain worse = measured_chain();
    worse.zeta = 0.9;
    for (double x : {0.1, 0.5, 0.9}) {
        const auto b = generated_pair(measured_params_fixed_loss(), better, x);
        const auto w = generated_pair(measured_params_fixed_loss(), worse, x);
        CHECK(w.squeezed.value > b.squeezed.value);
        CHECK(w.antisqueezed.value < b.antisqueezed.value);
    }
}

TEST_CASE("phase_mix identities") {
    const QuadraturePair pair{{0.0973, {}}, {32.75, {}}};

    const QuadraturePair same = phase_mix(pair, 0.0);
    CHECK(same.squeezed.value == pair.squeezed.value);
    CHECK(same.antisqueezed.value == pair.antisqueezed.value);

    // 45 degrees mixes the quadratures symmetrically
    const QuadraturePair half = phase_mix(pair, 45.0 * kDeg);
    const double mean = (0.0973 + 32.75) / 2.0;
    CHECK(half.squeezed.value == doctest::Approx(mean).epsilon(1e-12));
    CHECK(half.antisqueezed.value == doctest::Approx(mean).epsilon(1e-12));

    const QuadraturePair mixed = phase_mix(pair, 1.5 * kDeg);
    CHECK(mixed.squeezed.value ==
          doctest::Approx(0.11967469525966283).epsilon(1e-12));
    CHECK(linear_to_db(mixed.squeezed.value) ==
          doctest::Approx(-9.2199766973459).epsilon(1e-9));
    CHECK(std::abs(linear_to_db(mixed.squeezed.value) - (-9.22)) < 0.005);

    CHECK_THROWS_AS(phase_mix(pair, -0.01), DomainError);
    CHECK_THROWS_AS(phase_mix(pair, 2.0), DomainError);
}

TEST_CASE("phase_mix preserves the pair sum exactly") {
    std::mt19937 gen(21);
    std::uniform_real_distribution<double> sq(0.01, 1.0);
    std::uniform_real_distribution<double> excess(0.0, 50.0);
    std::uniform_real_distribution<double> theta(0.0, 90.0 * kDeg);
    for (int i = 0; i < 1000; ++i) {
        const QuadraturePair pair{{sq(gen), {}}, {1.0 + excess(gen), {}}};
        const QuadraturePair mixed = phase_mix(pair, theta(gen));
        const double before = pair.squeezed.value + pair.antisqueezed.value;
        const double after = mixed.squeezed.value + mixed.antisqueezed.value;
        CHECK(after == doctest::Approx(before).epsilon(4e-16));
    }
}

TEST_CASE("predict_observed full chain") {
    const OpoParams params = measured_params_loss_line();
    const DetectionChain chain = measured_chain();
    const double x = pump_power_to_x(100.0, 180.0);

    const QuadraturePair observed = predict_observed(params, chain, x);
    CHECK(linear_to_db(observed.squeezed.value) ==
          doctest::Approx(-9.128114516197671).epsilon(1e-9));
    CHECK(linear_to_db(observed.antisqueezed.value) ==
          doctest::Approx(14.914340980793739).epsilon(1e-9));
    // lands on the published observation
    CHECK(std::abs(linear_to_db(observed.squeezed.value) - (-9.01)) < 0.5);
    CHECK(std::abs(linear_to_db(observed.antisqueezed.value) - 15.12) < 0.5);

    // vacuum in, shot noise out, regardless of the floor
    const QuadraturePair vac = predict_observed(params, chain, 0.0);
    CHECK(std::abs(linear_to_db(vac.squeezed.value)) < 1e-12);
    CHECK(std::abs(linear_to_db(vac.antisqueezed.value)) < 1e-12);

    // never below the floor itself
    CHECK(observed.squeezed.value > chain.circuit_floor.linear());
}

TEST_CASE("predict_observed degrades with jitter at every pump level") {
    const OpoParams params = measured_params_loss_line();
    DetectionChain tight = measured_chain();
    DetectionChain loose = measured_chain();
    loose.theta_rms_rad = 3.9 * kDeg;
    for (double x = 0.05; x < 1.0; x += 0.05) {
        const auto a = predict_observed(params, tight, x);
        const auto b = predict_observed(params, loose, x);
        CHECK(b.squeezed.value > a.squeezed.value);
    }
}

TEST_CASE("pump_power_to_x") {
    CHECK(pump_power_to_x(100.0, 180.0) ==
          doctest::Approx(0.7453559924999299).epsilon(1e-15));
    CHECK(pump_power_to_x(0.0, 180.0) == 0.0);
    CHECK(pump_power_to_x(45.0, 180.0) == 0.5);
    CHECK_THROWS_AS(pump_power_to_x(180.0, 180.0), ModelError);
    CHECK_THROWS_AS(pump_power_to_x(200.0, 180.0), ModelError);
    CHECK_THROWS_AS(pump_power_to_x(-1.0, 180.0), DomainError);
    CHECK_THROWS_AS(pump_power_to_x(10.0, 0.0), DomainError);
}

TEST_CASE("parameter validation names the offending field") {
    OpoParams params = measured_params_fixed_loss();
    params.transmittance = 1.2;
    CHECK_THROWS_WITH_AS(validate(params), doctest::Contains("transmittance"),
                         DomainError);

    DetectionChain chain = measured_chain();
    chain.eta = 0.0;
    CHECK_THROWS_WITH_AS(validate(chain), doctest::Contains("eta"), DomainError);

    chain = measured_chain();
    chain.theta_rms_rad = 46.0 * kDeg;
    CHECK_THROWS_WITH_AS(validate(chain), doctest::Contains("phase_rms_deg"),
                         DomainError);
}
