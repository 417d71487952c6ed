#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sqz/opomodel.hpp"

namespace sqz {

struct OptimumReport {
    double x_opt = 0.0;
    double best_squeezed_db = 0.0;
    double bracket_low = 0.0;
    double bracket_high = 0.0;
    int evaluations = 0;
    // The coarse scan kept improving up to the edge of the subthreshold
    // range; x_opt then holds the scan edge and is not an interior optimum.
    bool boundary = false;
};

struct FindOptions {
    int scan_points = 65;       // coarse bracketing scan before golden section
    double bracket_tol = 1e-6;  // final bracket width in x
    bool include_floor = true;  // false: optimize the pre-floor mixed level
};

// Minimizes the predicted observed squeezed level (dB) over x in (0, 1).
// A coarse scan picks the global bracket first (unimodality is not assumed),
// golden-section search then narrows it below bracket_tol.
OptimumReport find_x_opt(const OpoParams& params, const DetectionChain& chain,
                         const FindOptions& options = {});

struct Axis {
    std::string name;
    std::string unit;
    std::vector<double> values;  // strictly monotone
};

// A rectangular grid of results: one row per grid point in row-major axis
// order, axis columns first, then the named value columns.
struct SweepTable {
    std::vector<Axis> axes;
    std::vector<std::string> value_columns;
    std::vector<double> values;  // rows() x value_columns.size()
    std::vector<std::pair<std::string, std::string>> metadata;

    std::size_t rows() const;
    double axis_value(std::size_t row, std::size_t axis_index) const;
    double value_at(std::size_t row, std::size_t column) const;
};

// throws DomainError unless axes are strictly monotone, the cell count
// matches, and every cell is finite
void validate(const SweepTable& table);

// Observed and generated levels versus normalized pump power. Columns:
// squeezed_db, antisqueezed_db, generated_squeezed_db,
// generated_antisqueezed_db. A row equals predict_observed at that x.
SweepTable sweep_pump(const OpoParams& params, const DetectionChain& chain,
                      const std::vector<double>& x_values);

enum class SurfaceLossMode { fixed, follow_line };

struct SurfaceSweep {
    // columns: best_squeezed_db, x_opt, boundary (0/1)
    SweepTable grid;
    // follow_line only: per theta, the optimum under the pump-dependent loss
    // line; columns: x_opt, loss_at_x_opt, best_squeezed_db, boundary
    std::optional<SweepTable> path;
};

// Best reachable squeezing over (theta, L): each cell fixes the jitter and a
// pump-independent loss, then optimizes x. Circuit noise is included unless
// options.include_floor is cleared. In follow_line mode the template's loss
// line must be set and the one-dimensional path along it is emitted too.
SurfaceSweep sweep_surface(const OpoParams& params_template,
                           const DetectionChain& chain_template,
                           const std::vector<double>& theta_deg_axis,
                           const std::vector<double>& loss_axis,
                           SurfaceLossMode mode,
                           const FindOptions& options = {});

}  // namespace sqz
