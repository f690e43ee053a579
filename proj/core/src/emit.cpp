#include "zobeam/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace zobeam {

std::string format_exact(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

double parse_exact(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw std::invalid_argument("parse_exact: cannot parse '" + text + "'");
  }
  return value;
}

namespace {

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string format_compact(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Trailing-window mean: entry i averages values[max(0, i-w+1) .. i].
Eigen::VectorXd trailing_mean(const Eigen::VectorXd& values, int window) {
  const int n = static_cast<int>(values.size());
  Eigen::VectorXd out(n);
  double running = 0.0;
  for (int i = 0; i < n; ++i) {
    running += values(i);
    if (i >= window) running -= values(i - window);
    const int span = std::min(i + 1, window);
    out(i) = running / span;
  }
  return out;
}

constexpr const char* kPalette[] = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22",
};
constexpr int kPaletteSize = 10;

}  // namespace

void write_curve_csv(const std::string& path, const Eigen::VectorXd& mean,
                     const Eigen::VectorXd& stddev,
                     const Eigen::VectorXi& budget,
                     const Eigen::VectorXd& eps_mean) {
  const Eigen::Index n = mean.size();
  if (stddev.size() != n || budget.size() != n ||
      (eps_mean.size() != 0 && eps_mean.size() != n)) {
    throw std::invalid_argument(
        "write_curve_csv: column lengths disagree (mean " +
        std::to_string(mean.size()) + ", std " + std::to_string(stddev.size()) +
        ", budget " + std::to_string(budget.size()) + ", eps " +
        std::to_string(eps_mean.size()) + ")");
  }
  std::string bytes;
  bytes.reserve(static_cast<std::size_t>(n) * 64 + 64);
  bytes += "iteration,mean_sumrate_bits,std_sumrate_bits,budget,eps_tilde_mean\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    bytes += std::to_string(i);
    bytes += ',';
    bytes += format_exact(mean(i));
    bytes += ',';
    bytes += format_exact(stddev(i));
    bytes += ',';
    bytes += std::to_string(budget(i));
    bytes += ',';
    bytes += eps_mean.size() == 0 ? "nan" : format_exact(eps_mean(i));
    bytes += '\n';
  }
  write_file(path, bytes);
}

void CsvTable::write(const std::string& path) const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw std::invalid_argument(
          "CsvTable: row " + std::to_string(r) + " has " +
          std::to_string(rows[r].size()) + " cells, header has " +
          std::to_string(header.size()));
    }
  }
  std::string bytes;
  auto append_row = [&bytes](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) bytes += ',';
      bytes += cells[i];
    }
    bytes += '\n';
  };
  append_row(header);
  for (const auto& row : rows) append_row(row);
  write_file(path, bytes);
}

void write_progress_svg(const std::string& path, const std::string& title,
                        const std::string& x_label, const std::string& y_label,
                        const std::vector<SvgSeries>& series,
                        int smoothing_window) {
  if (series.empty()) {
    throw std::invalid_argument("write_progress_svg: no series");
  }
  if (smoothing_window < 1) {
    throw std::invalid_argument(
        "write_progress_svg: smoothing window must be >= 1");
  }

  const double width = 960.0, height = 540.0;
  const double left = 70.0, right = width - 180.0;
  const double top = 40.0, bottom = height - 50.0;

  // Smooth, then establish shared ranges.
  std::vector<Eigen::VectorXd> smoothed;
  smoothed.reserve(series.size());
  double x_max = 1.0;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  for (const SvgSeries& s : series) {
    if (s.values.size() == 0) {
      throw std::invalid_argument("write_progress_svg: series '" + s.label +
                                  "' is empty");
    }
    if (!s.values.allFinite()) {
      throw std::invalid_argument("write_progress_svg: series '" + s.label +
                                  "' has non-finite values");
    }
    Eigen::VectorXd y = trailing_mean(s.values, smoothing_window);
    x_max = std::max(x_max, static_cast<double>(y.size() - 1));
    y_min = std::min(y_min, y.minCoeff());
    y_max = std::max(y_max, y.maxCoeff());
    smoothed.push_back(std::move(y));
  }
  if (y_max <= y_min) {
    y_min -= 1.0;
    y_max += 1.0;
  } else {
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
  }

  auto map_x = [&](double x) {
    return left + (right - left) * (x / x_max);
  };
  auto map_y = [&](double y) {
    return bottom - (bottom - top) * ((y - y_min) / (y_max - y_min));
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";
  svg << "<text x=\"" << (left + (right - left) / 2) << "\" y=\"24\" "
      << "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\" "
      << "fill=\"#222222\">" << escape_xml(title) << "</text>\n";

  // Grid and ticks.
  for (int i = 0; i <= 4; ++i) {
    const double fx = x_max * i / 4.0;
    const double px = map_x(fx);
    svg << "<line x1=\"" << format_compact(px) << "\" y1=\"" << top
        << "\" x2=\"" << format_compact(px) << "\" y2=\"" << bottom
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << format_compact(px) << "\" y=\"" << (bottom + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"12\" fill=\"#222222\">" << format_compact(fx)
        << "</text>\n";
    const double fy = y_min + (y_max - y_min) * i / 4.0;
    const double py = map_y(fy);
    svg << "<line x1=\"" << left << "\" y1=\"" << format_compact(py)
        << "\" x2=\"" << right << "\" y2=\"" << format_compact(py)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << (left - 8) << "\" y=\"" << format_compact(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"12\" fill=\"#222222\">" << format_compact(fy)
        << "</text>\n";
  }
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\""
      << (right - left) << "\" height=\"" << (bottom - top)
      << "\" fill=\"none\" stroke=\"#222222\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << (left + (right - left) / 2) << "\" y=\""
      << (height - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\" fill=\"#222222\">" << escape_xml(x_label)
      << "</text>\n";
  svg << "<text x=\"18\" y=\"" << (top + (bottom - top) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\" fill=\"#222222\" transform=\"rotate(-90 18 "
      << (top + (bottom - top) / 2) << ")\">" << escape_xml(y_label)
      << "</text>\n";

  // Series polylines, downsampled evenly to at most 1000 vertices.
  for (std::size_t s = 0; s < smoothed.size(); ++s) {
    const Eigen::VectorXd& y = smoothed[s];
    const int n = static_cast<int>(y.size());
    const int stride = std::max(1, (n + 999) / 1000);
    const char* color = kPalette[s % kPaletteSize];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (int i = 0; i < n; i += stride) {
      if (!first) svg << ' ';
      svg << format_compact(map_x(i)) << ',' << format_compact(map_y(y(i)));
      first = false;
    }
    if ((n - 1) % stride != 0) {
      svg << ' ' << format_compact(map_x(n - 1)) << ','
          << format_compact(map_y(y(n - 1)));
    }
    svg << "\"/>\n";
  }

  // Legend.
  const double legend_x = right + 12.0;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = top + 10.0 + 20.0 * static_cast<double>(s);
    const char* color = kPalette[s % kPaletteSize];
    svg << "<line x1=\"" << legend_x << "\" y1=\"" << ly << "\" x2=\""
        << (legend_x + 22) << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << (legend_x + 28) << "\" y=\"" << (ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\" "
        << "fill=\"#222222\">" << escape_xml(series[s].label) << "</text>\n";
  }
  svg << "</svg>\n";
  write_file(path, svg.str());
}

}  // namespace zobeam
