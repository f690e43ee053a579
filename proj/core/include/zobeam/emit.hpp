// Result emission: exact-precision CSV tables and deterministic SVG charts.
//
// Every byte written here is a pure function of the numeric inputs: numbers
// are formatted with fixed printf conversions, iteration order is fixed, and
// nothing timestamps or randomizes the output. Rerunning an experiment with
// the same configuration therefore reproduces identical files, which is the
// reproducibility contract the check tooling verifies.
#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace zobeam {

// Exact decimal form of a double: 17 significant digits round-trip IEEE
// doubles bit-exactly. NaN prints as "nan", infinities as "inf"/"-inf".
std::string format_exact(double value);

// Inverse of format_exact. Throws std::invalid_argument on garbage.
double parse_exact(const std::string& text);

// Writes the per-iteration curve table with the fixed header
//   iteration,mean_sumrate_bits,std_sumrate_bits,budget,eps_tilde_mean
// eps may be empty (the column prints nan); all supplied columns must share
// one length. Values are written with format_exact.
void write_curve_csv(const std::string& path, const Eigen::VectorXd& mean,
                     const Eigen::VectorXd& stddev,
                     const Eigen::VectorXi& budget,
                     const Eigen::VectorXd& eps_mean);

// Small string table for summaries and lookup tables.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws std::invalid_argument when a row width disagrees with the header
  // and std::runtime_error when the file cannot be written.
  void write(const std::string& path) const;
};

struct SvgSeries {
  std::string label;
  Eigen::VectorXd values;  // y at x = 0, 1, ..., n-1
};

// Deterministic line chart: trailing-window mean smoothing (picture only;
// data files always carry raw values), even downsampling to at most 1000
// points per series, a fixed palette, labelled axes, and a legend.
void write_progress_svg(const std::string& path, const std::string& title,
                        const std::string& x_label, const std::string& y_label,
                        const std::vector<SvgSeries>& series,
                        int smoothing_window);

}  // namespace zobeam
