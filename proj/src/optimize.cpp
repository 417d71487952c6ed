#include "sqz/optimize.hpp"

#include <cmath>
#include <functional>

#include "sqz/errors.hpp"

namespace sqz {

namespace {

constexpr double kXEdge = 1.0 - 1e-6;

double golden_section(const std::function<double(double)>& objective,
                      double lo, double hi, double tol, int& evaluations) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    evaluations += 2;
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = objective(d);
        }
        ++evaluations;
    }
    return 0.5 * (a + b);
}

}  // namespace

OptimumReport find_x_opt(const OpoParams& params, const DetectionChain& chain,
                         const FindOptions& options) {
    validate(params);
    validate(chain);
    if (options.scan_points < 3)
        throw DomainError("find_x_opt: scan_points must be >= 3");
    if (!(options.bracket_tol > 0.0))
        throw DomainError("find_x_opt: bracket_tol must be > 0");

    const auto objective = [&](double x) {
        const QuadraturePair pair =
            options.include_floor
                ? predict_observed(params, chain, x)
                : phase_mix(generated_pair(params, chain, x),
                            chain.theta_rms_rad);
        return linear_to_db(pair.squeezed.value);
    };

    OptimumReport report;
    const int n = options.scan_points;
    int best = 0;
    double best_value = objective(0.0);
    report.evaluations = 1;
    std::vector<double> xs(n);
    xs[0] = 0.0;
    for (int i = 1; i < n; ++i) {
        xs[i] = kXEdge * static_cast<double>(i) / static_cast<double>(n - 1);
        const double value = objective(xs[i]);
        ++report.evaluations;
        if (value < best_value) {
            best_value = value;
            best = i;
        }
    }

    if (best == n - 1) {
        // still improving at the subthreshold edge; no interior bracket
        report.boundary = true;
        report.x_opt = kXEdge;
        report.best_squeezed_db = best_value;
        report.bracket_low = xs[n - 2];
        report.bracket_high = kXEdge;
        return report;
    }

    const double lo = best == 0 ? 0.0 : xs[best - 1];
    const double hi = xs[best + 1];
    report.x_opt = golden_section(objective, lo, hi, options.bracket_tol,
                                  report.evaluations);
    report.best_squeezed_db = objective(report.x_opt);
    ++report.evaluations;
    report.bracket_low = lo;
    report.bracket_high = hi;
    return report;
}

std::size_t SweepTable::rows() const {
    std::size_t n = 1;
    for (const auto& axis : axes) n *= axis.values.size();
    return n;
}

double SweepTable::axis_value(std::size_t row, std::size_t axis_index) const {
    std::size_t stride = 1;
    for (std::size_t a = axis_index + 1; a < axes.size(); ++a)
        stride *= axes[a].values.size();
    return axes[axis_index]
        .values[(row / stride) % axes[axis_index].values.size()];
}

double SweepTable::value_at(std::size_t row, std::size_t column) const {
    return values[row * value_columns.size() + column];
}

void validate(const SweepTable& table) {
    if (table.axes.empty())
        throw DomainError("sweep table: no axes");
    for (const auto& axis : table.axes) {
        if (axis.values.empty())
            throw DomainError("sweep table: empty axis " + axis.name);
        for (std::size_t i = 0; i + 1 < axis.values.size(); ++i)
            if (!(axis.values[i] < axis.values[i + 1]))
                throw DomainError("sweep table: axis " + axis.name +
                                  " is not strictly increasing");
    }
    if (table.values.size() != table.rows() * table.value_columns.size())
        throw DomainError("sweep table: cell count mismatch");
    for (double v : table.values)
        if (!std::isfinite(v))
            throw DomainError("sweep table: non-finite cell");
}

SweepTable sweep_pump(const OpoParams& params, const DetectionChain& chain,
                      const std::vector<double>& x_values) {
    validate(params);
    validate(chain);
    SweepTable table;
    table.axes = {{"x", "1", x_values}};
    table.value_columns = {"squeezed_db", "antisqueezed_db",
                           "generated_squeezed_db",
                           "generated_antisqueezed_db"};
    table.values.reserve(x_values.size() * 4);
    for (double x : x_values) {
        const QuadraturePair generated = generated_pair(params, chain, x);
        const QuadraturePair observed = predict_observed(params, chain, x);
        table.values.push_back(linear_to_db(observed.squeezed.value));
        table.values.push_back(linear_to_db(observed.antisqueezed.value));
        table.values.push_back(linear_to_db(generated.squeezed.value));
        table.values.push_back(linear_to_db(generated.antisqueezed.value));
    }
    validate(table);
    return table;
}

SurfaceSweep sweep_surface(const OpoParams& params_template,
                           const DetectionChain& chain_template,
                           const std::vector<double>& theta_deg_axis,
                           const std::vector<double>& loss_axis,
                           SurfaceLossMode mode, const FindOptions& options) {
    constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
    if (mode == SurfaceLossMode::follow_line &&
        !params_template.loss.is_line())
        throw DomainError(
            "sweep_surface: follow_line mode needs a loss-line model");

    SurfaceSweep sweep;
    sweep.grid.axes = {{"theta_deg", "deg", theta_deg_axis},
                       {"loss", "1", loss_axis}};
    sweep.grid.value_columns = {"best_squeezed_db", "x_opt", "boundary"};
    sweep.grid.values.reserve(theta_deg_axis.size() * loss_axis.size() * 3);

    // Cells are independent; evaluation order is the output order.
    for (double theta_deg : theta_deg_axis) {
        DetectionChain chain = chain_template;
        chain.theta_rms_rad = theta_deg * kDegToRad;
        for (double loss : loss_axis) {
            OpoParams params = params_template;
            params.loss = LossModel::fixed(loss);
            const OptimumReport cell = find_x_opt(params, chain, options);
            sweep.grid.values.push_back(cell.best_squeezed_db);
            sweep.grid.values.push_back(cell.x_opt);
            sweep.grid.values.push_back(cell.boundary ? 1.0 : 0.0);
        }
    }
    validate(sweep.grid);

    if (mode == SurfaceLossMode::follow_line) {
        SweepTable path;
        path.axes = {{"theta_deg", "deg", theta_deg_axis}};
        path.value_columns = {"x_opt", "loss_at_x_opt", "best_squeezed_db",
                              "boundary"};
        for (double theta_deg : theta_deg_axis) {
            DetectionChain chain = chain_template;
            chain.theta_rms_rad = theta_deg * kDegToRad;
            const OptimumReport point =
                find_x_opt(params_template, chain, options);
            path.values.push_back(point.x_opt);
            path.values.push_back(params_template.loss.at(point.x_opt));
            path.values.push_back(point.best_squeezed_db);
            path.values.push_back(point.boundary ? 1.0 : 0.0);
        }
        validate(path);
        sweep.path = std::move(path);
    }
    return sweep;
}

}  // namespace sqz
