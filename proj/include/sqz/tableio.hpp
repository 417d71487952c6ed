#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sqz/estimate.hpp"
#include "sqz/optimize.hpp"

namespace sqz {

// One inversion input: which quadrature a level belongs to.
struct LevelRow {
    std::string quadrature;  // "squeezed" or "antisqueezed"
    double level_db = 0.0;
    std::optional<double> sigma_db{};
};

// Significant digits for numeric output. digits < 0 selects the default
// style: dB columns with 3 decimal places, everything else %.9g.
std::string format_number(double value, int digits, bool is_db);

// '# key = value' metadata lines, a mandatory header row, comma-delimited
// data rows, '\n' line ends. Column names ending in '_db' follow the dB
// formatting default.
void write_sweep_table(std::ostream& out, const SweepTable& table,
                       int precision_digits);

// Measurement tables: '#' comment lines, then a header naming exactly the
// expected columns, then numeric rows. Errors carry path:line.
std::vector<GainPoint> read_gain_table(const std::string& path);   // power_mw,gain[,sigma_gain]
std::vector<LossPoint> read_loss_table(const std::string& path);   // x,loss
std::vector<LevelRow> read_level_table(const std::string& path);   // quadrature,level_db[,sigma_db]

}  // namespace sqz
