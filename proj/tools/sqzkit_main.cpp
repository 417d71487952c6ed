// sqzkit: predictions, fits, inversions, optimization and Monte Carlo checks
// for cw squeezed-light loss/phase budgets.
//
// Exit codes: 0 success, 1 usage or parse error, 2 domain/model error,
// 3 I/O error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sqz/config.hpp"
#include "sqz/errors.hpp"
#include "sqz/estimate.hpp"
#include "sqz/montecarlo.hpp"
#include "sqz/optimize.hpp"
#include "sqz/quadmath.hpp"
#include "sqz/rng.hpp"
#include "sqz/tableio.hpp"

namespace {

using namespace sqz;

constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

struct CommonOptions {
    std::string config_path;
    std::optional<std::string> out_path;
    std::optional<std::string> convention;
    int precision = -1;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_config = true) {
    auto* config =
        cmd->add_option("--config", opts.config_path, "experiment config file");
    if (needs_config) config->required();
    cmd->add_option("--out", opts.out_path,
                    "write the report here instead of stdout");
    cmd->add_option("--convention", opts.convention,
                    "override freq_convention (angular|cyclic)")
        ->check(CLI::IsMember({"angular", "cyclic"}));
    cmd->add_option("--precision", opts.precision,
                    "significant digits for all numeric output");
}

ExperimentConfig load_with_overrides(const CommonOptions& opts) {
    ExperimentConfig config = load_config(opts.config_path);
    if (opts.convention)
        config.chain.convention = *opts.convention == "angular"
                                      ? FreqConvention::angular
                                      : FreqConvention::cyclic;
    return config;
}

// All report writing goes through one stream so --out captures everything.
class Report {
public:
    Report(const std::optional<std::string>& path, int precision)
        : precision_(precision) {
        if (path) {
            file_.open(*path);
            if (!file_) throw IoError("cannot open output file: " + *path);
            out_ = &file_;
            path_ = *path;
        }
    }

    std::ostream& stream() { return *out_; }

    void meta(const std::string& key, const std::string& value) {
        *out_ << "# " << key << " = " << value << '\n';
    }

    void meta_config(const ExperimentConfig& config) {
        for (const auto& [key, value] : config_key_values(config))
            meta(key, value);
    }

    void field(const std::string& key, const std::string& value) {
        *out_ << key << " = " << value << '\n';
        columns_.push_back(key);
        row_.push_back(value);
    }

    void field(const std::string& key, double value) {
        const bool is_db = key.size() >= 3 &&
                           key.compare(key.size() - 3, 3, "_db") == 0;
        field(key, format_number(value, precision_, is_db));
    }

    // machine-readable mirror of the fields printed so far
    void mirror() {
        *out_ << "columns:";
        for (std::size_t i = 0; i < columns_.size(); ++i)
            *out_ << (i == 0 ? " " : ",") << columns_[i];
        *out_ << "\nvalues:";
        for (std::size_t i = 0; i < row_.size(); ++i)
            *out_ << (i == 0 ? " " : ",") << row_[i];
        *out_ << '\n';
    }

    void finish() {
        out_->flush();
        if (!*out_) throw IoError("write failed: " + path_);
    }

    int precision() const { return precision_; }

private:
    int precision_;
    std::ofstream file_;
    std::ostream* out_ = &std::cout;
    std::string path_ = "<stdout>";
    std::vector<std::string> columns_;
    std::vector<std::string> row_;
};

double resolve_x(const ExperimentConfig& config, std::optional<double> x,
                 std::optional<double> power_mw, std::optional<double> gain) {
    const int given = int(bool(x)) + int(bool(power_mw)) + int(bool(gain));
    if (given != 1)
        throw ConfigError(
            "exactly one of --x, --power-mw or --gain must be given");
    if (x) {
        if (!(*x >= 0.0 && *x < 1.0))
            throw ModelError("--x: must be in [0, 1)");
        return *x;
    }
    if (gain) return gain_to_x(*gain);
    if (!config.opo.threshold_mw)
        throw ConfigError(
            "threshold_mw: required to convert a pump power; set "
            "threshold_mw or gain_at_power in the config, or pass --x");
    return pump_power_to_x(*power_mw, *config.opo.threshold_mw);
}

std::vector<double> linspace(double lo, double hi, int steps) {
    if (steps < 2 || !(hi > lo))
        throw ConfigError("axis: need at least 2 steps and max > min");
    std::vector<double> values(steps);
    for (int i = 0; i < steps; ++i)
        values[i] = lo + (hi - lo) * static_cast<double>(i) /
                             static_cast<double>(steps - 1);
    return values;
}

// ---------------------------------------------------------------- predict

struct PredictOptions {
    CommonOptions common;
    std::optional<double> x;
    std::optional<double> power_mw;
    std::optional<double> gain;
};

void run_predict(const PredictOptions& opts) {
    const ExperimentConfig config = load_with_overrides(opts.common);
    const double x =
        resolve_x(config, opts.x, opts.power_mw, opts.gain);

    const QuadraturePair generated =
        generated_pair(config.opo, config.chain, x);
    const QuadraturePair mixed =
        phase_mix(generated, config.chain.theta_rms_rad);
    const QuadraturePair observed = predict_observed(config.opo, config.chain, x);

    Report report(opts.common.out_path, opts.common.precision);
    report.meta("command", "predict");
    report.meta_config(config);
    report.field("x", x);
    report.field("escape_efficiency", escape_efficiency(config.opo, x));
    report.field("cavity_decay_rate_per_s",
                 cavity_decay_rate(config.opo, x));
    report.field("normalized_frequency",
                 normalized_frequency(config.opo, config.chain, x));
    report.field("detection_efficiency",
                 detection_efficiency(config.opo, config.chain, x));
    const auto levels = [&](const char* prefix, const QuadraturePair& pair) {
        report.field(std::string(prefix) + "_squeezed_db",
                     linear_to_db(pair.squeezed.value));
        report.field(std::string(prefix) + "_antisqueezed_db",
                     linear_to_db(pair.antisqueezed.value));
        report.field(std::string(prefix) + "_squeezed_linear",
                     pair.squeezed.value);
        report.field(std::string(prefix) + "_antisqueezed_linear",
                     pair.antisqueezed.value);
    };
    levels("generated", generated);
    levels("mixed", mixed);
    levels("observed", observed);
    report.mirror();
    report.finish();
}

// ------------------------------------------------------------------ fits

struct FitOptions {
    CommonOptions common;
    std::string table_path;
};

void run_fit_threshold(const FitOptions& opts) {
    const std::vector<GainPoint> points = read_gain_table(opts.table_path);
    const FitResult fit = fit_threshold(points);

    Report report(opts.common.out_path, opts.common.precision);
    report.meta("command", "fit-threshold");
    report.meta("table", opts.table_path);
    report.field("threshold_mw", fit.estimate);
    if (fit.n_points > 1)
        report.field("sigma_mw", fit.sigma);
    else
        report.field("sigma_mw", "none");
    report.field("residual_norm", fit.residual_norm);
    report.field("n_points", std::to_string(fit.n_points));
    report.mirror();

    auto& out = report.stream();
    out << "power_mw,gain,fitted_gain,residual\n";
    for (const auto& p : points) {
        const double u = std::sqrt(p.power_mw / fit.estimate);
        const double fitted = 1.0 / ((1.0 - u) * (1.0 - u));
        out << format_number(p.power_mw, report.precision(), false) << ','
            << format_number(p.gain, report.precision(), false) << ','
            << format_number(fitted, report.precision(), false) << ','
            << format_number(fitted - p.gain, report.precision(), false)
            << '\n';
    }
    report.finish();
}

void run_fit_loss(const FitOptions& opts) {
    const std::vector<LossPoint> points = read_loss_table(opts.table_path);
    const LossLineFit fit = fit_loss_line(points);

    Report report(opts.common.out_path, opts.common.precision);
    report.meta("command", "fit-loss");
    report.meta("table", opts.table_path);
    report.field("loss_intercept", fit.line.intercept);
    report.field("loss_slope", fit.line.slope);
    report.field("sigma_intercept", fit.sigma_intercept);
    report.field("sigma_slope", fit.sigma_slope);
    report.field("residual_norm", fit.residual_norm);
    report.field("n_points", std::to_string(fit.n_points));
    report.mirror();

    auto& out = report.stream();
    out << "x,loss,fitted_loss,residual\n";
    for (const auto& p : points) {
        const double fitted = fit.line.intercept + fit.line.slope * p.x;
        out << format_number(p.x, report.precision(), false) << ','
            << format_number(p.loss, report.precision(), false) << ','
            << format_number(fitted, report.precision(), false) << ','
            << format_number(fitted - p.loss, report.precision(), false)
            << '\n';
    }
    report.finish();
}

// --------------------------------------------------------------- correct

struct CorrectOptions {
    CommonOptions common;
    std::optional<double> squeezed_db;
    std::optional<double> antisqueezed_db;
    std::optional<double> squeezed_sigma_db;
    std::optional<double> antisqueezed_sigma_db;
    std::optional<std::string> table_path;
    std::optional<double> x;
    std::optional<double> power_mw;
    std::optional<double> gain;
    int samples = 10000;
    std::uint64_t seed = 1;
};

void run_correct(const CorrectOptions& opts) {
    const ExperimentConfig config = load_with_overrides(opts.common);
    const double x = resolve_x(config, opts.x, opts.power_mw, opts.gain);
    const double omega = normalized_frequency(config.opo, config.chain, x);
    const double theta = config.chain.theta_rms_rad;

    double observed_sq_db = 0.0, observed_as_db = 0.0;
    std::optional<double> sigma_sq_db, sigma_as_db;
    if (opts.table_path) {
        bool have_sq = false, have_as = false;
        for (const LevelRow& row : read_level_table(*opts.table_path)) {
            if (row.quadrature == "squeezed") {
                observed_sq_db = row.level_db;
                sigma_sq_db = row.sigma_db;
                have_sq = true;
            } else {
                observed_as_db = row.level_db;
                sigma_as_db = row.sigma_db;
                have_as = true;
            }
        }
        if (!have_sq || !have_as)
            throw ConfigError(*opts.table_path +
                              ": need one 'squeezed' and one 'antisqueezed' "
                              "row");
    } else if (opts.squeezed_db && opts.antisqueezed_db) {
        observed_sq_db = *opts.squeezed_db;
        observed_as_db = *opts.antisqueezed_db;
        sigma_sq_db = opts.squeezed_sigma_db;
        sigma_as_db = opts.antisqueezed_sigma_db;
    } else {
        throw ConfigError(
            "give --squeezed-db and --antisqueezed-db, or --table");
    }

    // floor removal, jitter inversion, squeezed-side efficiency solve; only
    // these outputs stay away from the E = 1 boundary under perturbation,
    // so only they get resampled sigmas
    const auto chain_outputs = [&](double sq_db,
                                   double as_db) -> std::vector<double> {
        QuadraturePair observed;
        observed.squeezed = {db_to_linear(sq_db), {}};
        observed.antisqueezed = {db_to_linear(as_db), {}};
        QuadraturePair corrected;
        corrected.squeezed =
            subtract_circuit_noise(observed.squeezed, config.chain.circuit_floor);
        corrected.antisqueezed = subtract_circuit_noise(
            observed.antisqueezed, config.chain.circuit_floor);
        const QuadraturePair generated = invert_phase_mix(corrected, theta);
        const double loss_sq =
            estimate_total_efficiency(generated, x, omega,
                                      EfficiencySide::squeezed)
                .estimate;
        return {linear_to_db(corrected.squeezed.value),
                linear_to_db(corrected.antisqueezed.value),
                linear_to_db(generated.squeezed.value),
                linear_to_db(generated.antisqueezed.value),
                loss_sq};
    };

    const std::vector<double> central =
        chain_outputs(observed_sq_db, observed_as_db);

    const bool have_sigmas = (sigma_sq_db && *sigma_sq_db > 0.0) ||
                             (sigma_as_db && *sigma_as_db > 0.0);
    std::vector<FitResult> spread;
    if (have_sigmas) {
        const std::vector<Perturbed> inputs = {
            {observed_sq_db, sigma_sq_db.value_or(0.0)},
            {observed_as_db, sigma_as_db.value_or(0.0)}};
        spread = resample_uncertainty(
                     inputs,
                     [&](std::span<const double> v) {
                         return chain_outputs(v[0], v[1]);
                     },
                     opts.samples, opts.seed)
                     .outputs;
    }

    // the other two solves can be unphysical on their own; report them
    // centrally, as 'none' when the data rejects that side
    QuadraturePair generated;
    generated.squeezed = {db_to_linear(central[2]), {}};
    generated.antisqueezed = {db_to_linear(central[3]), {}};
    const auto side_estimate =
        [&](EfficiencySide side) -> std::optional<double> {
        try {
            return estimate_total_efficiency(generated, x, omega, side)
                .estimate;
        } catch (const ModelError&) {
            return std::nullopt;
        }
    };
    const std::optional<double> loss_anti =
        side_estimate(EfficiencySide::antisqueezed);
    const std::optional<double> loss_both = side_estimate(EfficiencySide::both);

    Report report(opts.common.out_path, opts.common.precision);
    report.meta("command", "correct");
    report.meta_config(config);
    if (have_sigmas) {
        report.meta("samples", std::to_string(opts.samples));
        report.meta("seed", std::to_string(opts.seed));
        report.meta("rng", rng::kAlgorithm);
    }
    report.field("x", x);
    report.field("normalized_frequency", omega);
    report.field("observed_squeezed_db", observed_sq_db);
    report.field("observed_antisqueezed_db", observed_as_db);
    static const char* kNames[] = {
        "corrected_squeezed_db", "corrected_antisqueezed_db",
        "generated_squeezed_db", "generated_antisqueezed_db",
        "total_loss_squeezed_side"};
    for (std::size_t i = 0; i < central.size(); ++i) {
        report.field(kNames[i], central[i]);
        if (have_sigmas)
            report.field(std::string(kNames[i]) + "_sigma", spread[i].sigma);
    }
    const auto optional_field = [&](const char* key,
                                    const std::optional<double>& value) {
        if (value)
            report.field(key, *value);
        else
            report.field(key, "none");
    };
    optional_field("total_loss_antisqueezed_side", loss_anti);
    optional_field("total_loss_both_sides", loss_both);
    const double measured_efficiency =
        detection_efficiency(config.opo, config.chain, x);
    report.field("total_loss_measured_product", 1.0 - measured_efficiency);
    report.mirror();
    report.finish();
}

// -------------------------------------------------------------- optimize

struct OptimizeOptions {
    CommonOptions common;
    bool pre_floor = false;
    int scan_points = 65;
};

void run_optimize(const OptimizeOptions& opts) {
    const ExperimentConfig config = load_with_overrides(opts.common);
    FindOptions find;
    find.include_floor = !opts.pre_floor;
    find.scan_points = opts.scan_points;
    const OptimumReport optimum = find_x_opt(config.opo, config.chain, find);

    Report report(opts.common.out_path, opts.common.precision);
    report.meta("command", "optimize");
    report.meta_config(config);
    report.meta("objective", opts.pre_floor ? "pre_floor" : "observed");
    if (optimum.boundary)
        report.meta("note",
                    "no interior optimum: level still improving at the "
                    "subthreshold edge; x_opt holds the scan edge");
    report.field("x_opt", optimum.x_opt);
    report.field("best_squeezed_db", optimum.best_squeezed_db);
    report.field("bracket_low", optimum.bracket_low);
    report.field("bracket_high", optimum.bracket_high);
    report.field("evaluations", std::to_string(optimum.evaluations));
    report.field("boundary", std::string(optimum.boundary ? "1" : "0"));
    report.mirror();
    report.finish();
}

// ----------------------------------------------------------- sweep tables

struct SweepOptions {
    CommonOptions common;
    double x_min = 0.0;
    double x_max = 0.95;
    int x_steps = 96;
};

void run_sweep(const SweepOptions& opts) {
    const ExperimentConfig config = load_with_overrides(opts.common);
    SweepTable table = sweep_pump(config.opo, config.chain,
                                  linspace(opts.x_min, opts.x_max, opts.x_steps));
    table.metadata.emplace_back("command", "sweep");
    for (const auto& kv : config_key_values(config))
        table.metadata.push_back(kv);

    Report report(opts.common.out_path, opts.common.precision);
    write_sweep_table(report.stream(), table, opts.common.precision);
    report.finish();
}

struct SurfaceOptions {
    CommonOptions common;
    double theta_min = 0.0;
    double theta_max = 5.0;
    int theta_steps = 101;
    double loss_min = 0.0;
    double loss_max = 0.01;
    int loss_steps = 101;
    bool follow_line = false;
    std::optional<std::string> path_out;
    bool pre_floor = false;
};

void run_surface(const SurfaceOptions& opts) {
    const ExperimentConfig config = load_with_overrides(opts.common);
    if (opts.follow_line && !opts.path_out && opts.common.out_path)
        throw ConfigError("--follow-line with --out needs --path-out");
    FindOptions find;
    find.include_floor = !opts.pre_floor;
    const SurfaceSweep sweep = sweep_surface(
        config.opo, config.chain,
        linspace(opts.theta_min, opts.theta_max, opts.theta_steps),
        linspace(opts.loss_min, opts.loss_max, opts.loss_steps),
        opts.follow_line ? SurfaceLossMode::follow_line
                         : SurfaceLossMode::fixed,
        find);

    const auto annotate = [&](SweepTable table, const char* command) {
        table.metadata.emplace_back("command", command);
        for (const auto& kv : config_key_values(config))
            table.metadata.push_back(kv);
        return table;
    };

    {
        Report report(opts.common.out_path, opts.common.precision);
        write_sweep_table(report.stream(),
                          annotate(sweep.grid, "surface"), opts.common.precision);
        report.finish();
    }
    if (sweep.path) {
        Report report(opts.path_out, opts.common.precision);
        write_sweep_table(report.stream(),
                          annotate(*sweep.path, "surface-path"),
                          opts.common.precision);
        report.finish();
    }
}

// ------------------------------------------------------------------- mc

struct McOptions {
    CommonOptions common;
    std::optional<double> x;
    std::optional<double> power_mw;
    std::optional<double> gain;
    std::optional<double> rms_deg;
    std::string distribution = "gaussian";
    long samples = 1000000;
    std::uint64_t seed = 1;
};

void run_mc(const McOptions& opts) {
    const ExperimentConfig config = load_with_overrides(opts.common);
    const double x = resolve_x(config, opts.x, opts.power_mw, opts.gain);
    const double rms_rad = opts.rms_deg ? *opts.rms_deg / kRadToDeg
                                        : config.chain.theta_rms_rad;

    JitterSpec spec;
    spec.distribution = opts.distribution == "gaussian"
                            ? JitterDistribution::gaussian
                            : JitterDistribution::uniform;
    spec.rms_rad = rms_rad;
    spec.n_samples = opts.samples;
    spec.seed = opts.seed;

    const QuadraturePair generated =
        generated_pair(config.opo, config.chain, x);
    const McMixedPair sampled = mc_mixed_pair(generated, spec);
    const QuadraturePair literal = phase_mix(generated, rms_rad);
    const double moment =
        expected_cos_squared(spec.distribution, rms_rad);
    const double analytic_sq = generated.squeezed.value * moment +
                               generated.antisqueezed.value * (1.0 - moment);
    const double analytic_as = generated.antisqueezed.value * moment +
                               generated.squeezed.value * (1.0 - moment);

    Report report(opts.common.out_path, opts.common.precision);
    report.meta("command", "mc");
    report.meta_config(config);
    report.meta("x", format_number(x, opts.common.precision, false));
    report.meta("distribution", to_string(spec.distribution));
    report.meta("rms_deg",
                format_number(rms_rad * kRadToDeg, opts.common.precision, false));
    report.meta("n_samples", std::to_string(spec.n_samples));
    report.meta("seed", std::to_string(spec.seed));
    report.meta("rng", sampled.rng_algorithm);

    auto& out = report.stream();
    const int digits = opts.common.precision;
    out << "slot,closed_form,closed_form_db,analytic,analytic_db,mc_mean,"
           "mc_mean_db,mc_std_error,gap_db\n";
    const auto row = [&](const char* slot, double closed, double analytic,
                         const SampledLevel& mc) {
        out << slot << ',' << format_number(closed, digits, false) << ','
            << format_number(linear_to_db(closed), digits, true) << ','
            << format_number(analytic, digits, false) << ','
            << format_number(linear_to_db(analytic), digits, true) << ','
            << format_number(mc.mean, digits, false) << ','
            << format_number(linear_to_db(mc.mean), digits, true) << ','
            << format_number(mc.std_error, digits, false) << ','
            << format_number(linear_to_db(analytic) - linear_to_db(closed),
                             digits, true)
            << '\n';
    };
    row("squeezed", literal.squeezed.value, analytic_sq, sampled.squeezed);
    row("antisqueezed", literal.antisqueezed.value, analytic_as,
        sampled.antisqueezed);
    report.finish();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "sqzkit: loss and phase budgets for cw squeezed-light experiments"};
    app.require_subcommand(1);

    PredictOptions predict;
    auto* predict_cmd = app.add_subcommand(
        "predict", "forward prediction of observed levels at one pump point");
    add_common(predict_cmd, predict.common);
    predict_cmd->add_option("--x", predict.x, "normalized pump power");
    predict_cmd->add_option("--power-mw", predict.power_mw, "pump power, mW");
    predict_cmd->add_option("--gain", predict.gain,
                            "parametric amplification factor");
    predict_cmd->callback([&] { run_predict(predict); });

    FitOptions fit_threshold_opts;
    auto* fit_threshold_cmd = app.add_subcommand(
        "fit-threshold", "oscillation threshold from parametric-gain data");
    add_common(fit_threshold_cmd, fit_threshold_opts.common, false);
    fit_threshold_cmd
        ->add_option("--table", fit_threshold_opts.table_path,
                     "csv with power_mw,gain[,sigma_gain]")
        ->required();
    fit_threshold_cmd->callback([&] { run_fit_threshold(fit_threshold_opts); });

    FitOptions fit_loss_opts;
    auto* fit_loss_cmd =
        app.add_subcommand("fit-loss", "loss line from (x, loss) data");
    add_common(fit_loss_cmd, fit_loss_opts.common, false);
    fit_loss_cmd
        ->add_option("--table", fit_loss_opts.table_path, "csv with x,loss")
        ->required();
    fit_loss_cmd->callback([&] { run_fit_loss(fit_loss_opts); });

    CorrectOptions correct;
    auto* correct_cmd = app.add_subcommand(
        "correct",
        "invert measured levels: floor removal, jitter inversion, loss budget");
    add_common(correct_cmd, correct.common);
    correct_cmd->add_option("--squeezed-db", correct.squeezed_db,
                            "observed squeezed level, dB");
    correct_cmd->add_option("--antisqueezed-db", correct.antisqueezed_db,
                            "observed antisqueezed level, dB");
    correct_cmd->add_option("--squeezed-sigma-db", correct.squeezed_sigma_db,
                            "1-sigma on the squeezed level, dB");
    correct_cmd->add_option("--antisqueezed-sigma-db",
                            correct.antisqueezed_sigma_db,
                            "1-sigma on the antisqueezed level, dB");
    correct_cmd->add_option("--table", correct.table_path,
                            "csv with quadrature,level_db[,sigma_db]");
    correct_cmd->add_option("--x", correct.x, "normalized pump power");
    correct_cmd->add_option("--power-mw", correct.power_mw, "pump power, mW");
    correct_cmd->add_option("--gain", correct.gain,
                            "parametric amplification factor");
    correct_cmd->add_option("--samples", correct.samples,
                            "resampling draws for uncertainties");
    correct_cmd->add_option("--seed", correct.seed, "resampling seed");
    correct_cmd->callback([&] { run_correct(correct); });

    OptimizeOptions optimize;
    auto* optimize_cmd = app.add_subcommand(
        "optimize", "optimal normalized pump power under phase jitter");
    add_common(optimize_cmd, optimize.common);
    optimize_cmd->add_flag("--pre-floor", optimize.pre_floor,
                           "optimize the level before the circuit floor");
    optimize_cmd->add_option("--scan-points", optimize.scan_points,
                             "coarse bracketing scan resolution");
    optimize_cmd->callback([&] { run_optimize(optimize); });

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "levels versus normalized pump power, csv");
    add_common(sweep_cmd, sweep.common);
    sweep_cmd->add_option("--x-min", sweep.x_min, "first x sample");
    sweep_cmd->add_option("--x-max", sweep.x_max, "last x sample");
    sweep_cmd->add_option("--x-steps", sweep.x_steps, "number of samples");
    sweep_cmd->callback([&] { run_sweep(sweep); });

    SurfaceOptions surface;
    auto* surface_cmd = app.add_subcommand(
        "surface", "best squeezing over the (jitter, loss) plane, csv");
    add_common(surface_cmd, surface.common);
    surface_cmd->add_option("--theta-min", surface.theta_min,
                            "jitter axis start, degrees");
    surface_cmd->add_option("--theta-max", surface.theta_max,
                            "jitter axis end, degrees");
    surface_cmd->add_option("--theta-steps", surface.theta_steps,
                            "jitter axis samples");
    surface_cmd->add_option("--loss-min", surface.loss_min,
                            "loss axis start");
    surface_cmd->add_option("--loss-max", surface.loss_max, "loss axis end");
    surface_cmd->add_option("--loss-steps", surface.loss_steps,
                            "loss axis samples");
    surface_cmd->add_flag("--follow-line", surface.follow_line,
                          "also emit the path along the configured loss line");
    surface_cmd->add_option("--path-out", surface.path_out,
                            "output file for the loss-line path");
    surface_cmd->add_flag("--pre-floor", surface.pre_floor,
                          "optimize the level before the circuit floor");
    surface_cmd->callback([&] { run_surface(surface); });

    McOptions mc;
    auto* mc_cmd = app.add_subcommand(
        "mc", "Monte Carlo check of the jitter-mixing approximation");
    add_common(mc_cmd, mc.common);
    mc_cmd->add_option("--x", mc.x, "normalized pump power");
    mc_cmd->add_option("--power-mw", mc.power_mw, "pump power, mW");
    mc_cmd->add_option("--gain", mc.gain, "parametric amplification factor");
    mc_cmd->add_option("--rms-deg", mc.rms_deg,
                       "jitter rms override, degrees");
    mc_cmd->add_option("--distribution", mc.distribution,
                       "jitter distribution")
        ->check(CLI::IsMember({"gaussian", "uniform"}));
    mc_cmd->add_option("--samples", mc.samples, "number of draws");
    mc_cmd->add_option("--seed", mc.seed, "rng seed");
    mc_cmd->callback([&] { run_mc(mc); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const FitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (e.has_last_iterate)
            std::cerr << "last iterate: " << e.last_iterate << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
