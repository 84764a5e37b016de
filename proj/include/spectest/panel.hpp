#pragma once

#include <string>

#include <Eigen/Dense>

namespace spectest {

/// A stretch of a d-variate real time series, d = block_dim * groups.
/// Row t holds the observation at time t+1; group k (1-based) occupies the
/// consecutive columns (k-1)*block_dim ... k*block_dim - 1.
struct TimeSeriesPanel {
    Eigen::MatrixXd data;  // n x d, rows are time points
    int block_dim = 1;     // dimension p of each sub-series
    int groups = 2;        // number q of sub-series (q >= 2)

    [[nodiscard]] int length() const { return static_cast<int>(data.rows()); }
    [[nodiscard]] int dim() const { return static_cast<int>(data.cols()); }
};

/// Throws std::invalid_argument unless d = p*q, q >= 2, n >= 4 and all
/// entries are finite.
void validate(const TimeSeriesPanel& panel);

/// Returns a copy with every column centered to sample mean zero.
[[nodiscard]] TimeSeriesPanel demean(const TimeSeriesPanel& panel);

/// Reads a panel from a CSV file: one row per time point, d numeric columns,
/// optional header line. Parse failures report the offending row and column.
[[nodiscard]] TimeSeriesPanel read_panel_csv(const std::string& path, int block_dim, int groups);

/// Writes a panel in the CSV format accepted by read_panel_csv.
void write_panel_csv(const TimeSeriesPanel& panel, const std::string& path);

} // namespace spectest
