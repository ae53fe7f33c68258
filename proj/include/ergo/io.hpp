#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ergo/core.hpp"
#include "ergo/ergodic.hpp"

namespace ergo {

/// Canonical number formatting for every CSV cell: 17 significant digits,
/// period decimal separator, locale-independent. Identical doubles always
/// produce identical bytes.
std::string format_double(double x);
std::string format_index(Index i);

/// One row per point. Column order: index, perm_image, then value when an
/// observable is given, then coordinate when the system is embedded.
void write_system_csv(std::ostream& out, const FiniteSystem& system,
                      const Observable* observable = nullptr);

/// Columns: index, coordinate.
void write_grid_csv(std::ostream& out, std::span<const double> grid);

/// Columns: point_index, n, n_over_M, mean. The (n_over_M, mean) pairs are
/// the plot-ready curve samples.
void write_means_csv(std::ostream& out, std::span<const MeanProfile> profiles);

/// Columns: point_index, max_fluctuations.
void write_fluctuation_csv(std::ostream& out, const FluctuationReport& report);

/// Columns: threshold, tail_mass.
void write_tail_csv(std::ostream& out, std::span<const double> thresholds,
                    std::span<const double> masses);

/// Reads a two-column (index, coordinate) CSV with one header row.
std::vector<double> read_grid_csv(std::istream& in);

/// Reads a system CSV written by write_system_csv. The metric (and, for
/// symbolic systems, the window shape) must be supplied; neither is stored
/// in the CSV.
FiniteSystem read_system_csv(std::istream& in, MetricKind metric,
                             SymbolicShape shape = {});

}  // namespace ergo
