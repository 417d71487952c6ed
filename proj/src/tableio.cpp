#include "sqz/tableio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>

#include "sqz/errors.hpp"

namespace sqz {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

double parse_cell(const std::string& path, int line_no,
                  const std::string& column, const std::string& token) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value))
        throw ConfigError(path + ":" + std::to_string(line_no) + ": " +
                          column + ": not a finite number: '" + token + "'");
    return value;
}

// Reads comments and the header, hands numeric rows to `consume`.
// `headers` lists the acceptable header variants.
void read_table(const std::string& path,
                const std::vector<std::vector<std::string>>& headers,
                const std::string& expected_description,
                const std::function<void(const std::vector<std::string>&, int,
                                         std::size_t)>& consume) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open table file: " + path);

    std::string line;
    int line_no = 0;
    std::size_t variant = headers.size();
    while (std::getline(file, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto cells = split_csv(stripped);
        if (variant == headers.size()) {
            for (std::size_t h = 0; h < headers.size(); ++h)
                if (cells == headers[h]) variant = h;
            if (variant == headers.size())
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": malformed header: expected " +
                                  expected_description);
            continue;
        }
        if (cells.size() != headers[variant].size())
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected " +
                              std::to_string(headers[variant].size()) +
                              " cells, got " + std::to_string(cells.size()));
        consume(cells, line_no, variant);
    }
    if (variant == headers.size())
        throw ConfigError(path + ": missing header row: expected " +
                          expected_description);
}

}  // namespace

std::string format_number(double value, int digits, bool is_db) {
    char buf[64];
    if (digits < 0) {
        if (is_db)
            std::snprintf(buf, sizeof(buf), "%.3f", value);
        else
            std::snprintf(buf, sizeof(buf), "%.9g", value);
    } else {
        std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
    }
    return buf;
}

void write_sweep_table(std::ostream& out, const SweepTable& table,
                       int precision_digits) {
    validate(table);
    for (const auto& [key, value] : table.metadata)
        out << "# " << key << " = " << value << '\n';

    bool first = true;
    for (const auto& axis : table.axes) {
        out << (first ? "" : ",") << axis.name;
        first = false;
    }
    for (const auto& column : table.value_columns) out << ',' << column;
    out << '\n';

    const auto ends_in_db = [](const std::string& name) {
        return name.size() >= 3 &&
               name.compare(name.size() - 3, 3, "_db") == 0;
    };
    for (std::size_t row = 0; row < table.rows(); ++row) {
        for (std::size_t a = 0; a < table.axes.size(); ++a)
            out << (a == 0 ? "" : ",")
                << format_number(table.axis_value(row, a), precision_digits,
                                 false);
        for (std::size_t c = 0; c < table.value_columns.size(); ++c)
            out << ','
                << format_number(table.value_at(row, c), precision_digits,
                                 ends_in_db(table.value_columns[c]));
        out << '\n';
    }
}

std::vector<GainPoint> read_gain_table(const std::string& path) {
    std::vector<GainPoint> points;
    read_table(path,
               {{"power_mw", "gain"}, {"power_mw", "gain", "sigma_gain"}},
               "'power_mw,gain[,sigma_gain]'",
               [&](const std::vector<std::string>& cells, int line_no,
                   std::size_t variant) {
                   GainPoint p;
                   p.power_mw = parse_cell(path, line_no, "power_mw", cells[0]);
                   p.gain = parse_cell(path, line_no, "gain", cells[1]);
                   if (variant == 1)
                       p.sigma =
                           parse_cell(path, line_no, "sigma_gain", cells[2]);
                   points.push_back(p);
               });
    return points;
}

std::vector<LossPoint> read_loss_table(const std::string& path) {
    std::vector<LossPoint> points;
    read_table(path, {{"x", "loss"}}, "'x,loss'",
               [&](const std::vector<std::string>& cells, int line_no,
                   std::size_t) {
                   LossPoint p;
                   p.x = parse_cell(path, line_no, "x", cells[0]);
                   p.loss = parse_cell(path, line_no, "loss", cells[1]);
                   points.push_back(p);
               });
    return points;
}

std::vector<LevelRow> read_level_table(const std::string& path) {
    std::vector<LevelRow> rows;
    read_table(
        path,
        {{"quadrature", "level_db"}, {"quadrature", "level_db", "sigma_db"}},
        "'quadrature,level_db[,sigma_db]'",
        [&](const std::vector<std::string>& cells, int line_no,
            std::size_t variant) {
            LevelRow row;
            row.quadrature = cells[0];
            if (row.quadrature != "squeezed" &&
                row.quadrature != "antisqueezed")
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": quadrature: expected 'squeezed' or "
                                  "'antisqueezed', got '" +
                                  cells[0] + "'");
            row.level_db = parse_cell(path, line_no, "level_db", cells[1]);
            if (variant == 1)
                row.sigma_db = parse_cell(path, line_no, "sigma_db", cells[2]);
            rows.push_back(row);
        });
    return rows;
}

}  // namespace sqz
