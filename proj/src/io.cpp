#include "ergo/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace ergo {

std::string format_double(double x) {
    char buf[40];
    int len = std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf, static_cast<std::size_t>(len));
}

std::string format_index(Index i) {
    return std::to_string(i);
}

void write_system_csv(std::ostream& out, const FiniteSystem& system,
                      const Observable* observable) {
    if (observable && observable->size() != system.size())
        throw std::invalid_argument("observable size differs from system size");
    out << "index,perm_image";
    if (observable) out << ",value";
    if (system.has_embedding()) out << ",coordinate";
    out << '\n';
    for (Index i = 0; i < system.size(); ++i) {
        out << format_index(i) << ',' << format_index(system.perm[i]);
        if (observable) out << ',' << format_double((*observable)[i]);
        if (system.has_embedding()) out << ',' << format_double(system.coordinate(i));
        out << '\n';
    }
}

void write_grid_csv(std::ostream& out, std::span<const double> grid) {
    out << "index,coordinate\n";
    for (Index i = 0; i < grid.size(); ++i)
        out << format_index(i) << ',' << format_double(grid[i]) << '\n';
}

void write_means_csv(std::ostream& out, std::span<const MeanProfile> profiles) {
    out << "point_index,n,n_over_M,mean\n";
    for (const MeanProfile& profile : profiles) {
        const double m = static_cast<double>(profile.system_size);
        for (const auto& [n, mean] : profile.samples)
            out << format_index(profile.base_index) << ',' << format_index(n) << ','
                << format_double(static_cast<double>(n) / m) << ','
                << format_double(mean) << '\n';
    }
}

void write_fluctuation_csv(std::ostream& out, const FluctuationReport& report) {
    out << "point_index,max_fluctuations\n";
    for (Index i = 0; i < report.points.size(); ++i)
        out << format_index(report.points[i]) << ',' << format_index(report.counts[i])
            << '\n';
}

void write_tail_csv(std::ostream& out, std::span<const double> thresholds,
                    std::span<const double> masses) {
    if (thresholds.size() != masses.size())
        throw std::invalid_argument("threshold/mass column length mismatch");
    out << "threshold,tail_mass\n";
    for (Index i = 0; i < thresholds.size(); ++i)
        out << format_double(thresholds[i]) << ',' << format_double(masses[i]) << '\n';
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

double parse_double(const std::string& cell) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw std::invalid_argument("malformed number in CSV: '" + cell + "'");
    return value;
}

Index parse_index(const std::string& cell) {
    Index value = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw std::invalid_argument("malformed index in CSV: '" + cell + "'");
    return value;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

std::vector<double> read_grid_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty grid CSV");
    std::vector<double> grid;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        auto cells = split_row(line);
        if (cells.size() < 2) throw std::invalid_argument("grid CSV row needs two columns");
        Index idx = parse_index(cells[0]);
        if (idx != grid.size())
            throw std::invalid_argument("grid CSV rows must be in index order");
        grid.push_back(parse_double(cells[1]));
    }
    return grid;
}

FiniteSystem read_system_csv(std::istream& in, MetricKind metric, SymbolicShape shape) {
    std::string header;
    if (!std::getline(in, header)) throw std::invalid_argument("empty system CSV");
    header = strip_cr(header);
    auto columns = split_row(header);
    int coord_col = -1, value_col = -1;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] == "coordinate") coord_col = static_cast<int>(c);
        if (columns[c] == "value") value_col = static_cast<int>(c);
    }
    (void)value_col;  // observables ride along but are not part of the system

    Perm perm;
    std::vector<double> coords;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        auto cells = split_row(line);
        if (cells.size() < 2) throw std::invalid_argument("system CSV row needs columns");
        Index idx = parse_index(cells[0]);
        if (idx != perm.size())
            throw std::invalid_argument("system CSV rows must be in index order");
        perm.push_back(parse_index(cells[1]));
        if (coord_col >= 0) {
            if (static_cast<std::size_t>(coord_col) >= cells.size())
                throw std::invalid_argument("system CSV row lacks coordinate column");
            coords.push_back(parse_double(cells[static_cast<std::size_t>(coord_col)]));
        }
    }
    if (coord_col < 0 && metric != MetricKind::abstract)
        throw std::invalid_argument("system CSV lacks coordinates for a metric system");
    return FiniteSystem(std::move(perm), std::move(coords), metric, shape);
}

}  // namespace ergo
