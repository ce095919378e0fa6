#pragma once

// Trace CSV parsing and deterministic SVG line charts (log10 y-axis).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hoal/bench_run.hpp"

namespace hoal {

struct TraceCsv {
  std::vector<std::string> columns;                       // without "iter"
  std::vector<int> iters;
  std::vector<std::vector<std::optional<double>>> rows;   // per row, per column
};

// Parses a versioned trace CSV; throws ConfigError naming the file and line
// on an unknown version, header mismatch, or malformed row.
inline TraceCsv parse_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV " + path.string());
  auto fail = [&path](int line, const std::string& what) -> ConfigError {
    return ConfigError(path.string() + ":" + std::to_string(line) + ": " + what);
  };
  std::string line;
  if (!std::getline(in, line)) throw fail(1, "empty file");
  if (line != kTraceVersionLine)
    throw fail(1, "unknown trace version line '" + line + "'");
  if (!std::getline(in, line)) throw fail(2, "missing header");
  if (line != kTraceHeader) throw fail(2, "unexpected header '" + line + "'");

  TraceCsv csv;
  {
    std::stringstream ss(kTraceHeader);
    std::string col;
    std::getline(ss, col, ',');  // drop "iter"
    while (std::getline(ss, col, ',')) csv.columns.push_back(col);
  }
  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    if (cells.size() != csv.columns.size() + 1)
      throw fail(lineno, "expected " + std::to_string(csv.columns.size() + 1) +
                             " cells, found " + std::to_string(cells.size()));
    try {
      csv.iters.push_back(std::stoi(cells[0]));
    } catch (...) {
      throw fail(lineno, "bad iteration index '" + cells[0] + "'");
    }
    std::vector<std::optional<double>> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c].empty()) {
        row.push_back(std::nullopt);
        continue;
      }
      try {
        std::size_t pos = 0;
        const double v = std::stod(cells[c], &pos);
        if (pos != cells[c].size()) throw std::invalid_argument(cells[c]);
        row.push_back(v);
      } catch (...) {
        throw fail(lineno, "bad numeric cell '" + cells[c] + "'");
      }
    }
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

struct RenderResult {
  std::filesystem::path svg_path;
  int clamped_values = 0;  // nonpositive values clamped to 1e-300 for log scale
};

namespace detail {

inline std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return std::string(buf);
}

inline std::string series_label(const std::filesystem::path& path) {
  const std::string stem = path.stem().string();
  if (stem == "trace" && path.has_parent_path())
    return path.parent_path().filename().string();
  return stem;
}

}  // namespace detail

// Renders one polyline per input CSV for the named column on a log10 y-axis.
// Nonpositive values are clamped to 1e-300 (counted in the result). Output
// bytes are deterministic for fixed inputs.
inline RenderResult render_svg(const std::vector<std::filesystem::path>& csv_paths,
                               const std::string& column,
                               const std::filesystem::path& out_path) {
  if (csv_paths.empty()) throw ConfigError("render_svg: no input CSVs");

  struct Series {
    std::string label;
    std::vector<std::pair<double, double>> pts;  // (iter, log10 value)
  };
  std::vector<Series> series;
  RenderResult result;
  result.svg_path = out_path;

  double x_max = 1.0, y_min = std::numeric_limits<double>::infinity(),
         y_max = -std::numeric_limits<double>::infinity();
  for (const std::filesystem::path& path : csv_paths) {
    TraceCsv csv = parse_trace_csv(path);
    std::size_t col = csv.columns.size();
    for (std::size_t c = 0; c < csv.columns.size(); ++c)
      if (csv.columns[c] == column) col = c;
    if (col == csv.columns.size())
      throw ConfigError(path.string() + ": no column named '" + column + "'");
    Series s;
    s.label = detail::series_label(path);
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
      const std::optional<double>& cell = csv.rows[i][col];
      if (!cell) continue;
      double v = *cell;
      if (!(v > 0.0)) {
        v = 1e-300;
        ++result.clamped_values;
      }
      const double y = std::log10(v);
      s.pts.emplace_back(static_cast<double>(csv.iters[i]), y);
      x_max = std::max(x_max, static_cast<double>(csv.iters[i]));
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
    if (s.pts.empty())
      throw ConfigError(path.string() + ": column '" + column + "' has no values");
    series.push_back(std::move(s));
  }
  if (y_min == y_max) {
    y_min -= 1.0;
    y_max += 1.0;
  }

  const double W = 800, H = 500, L = 70, R = 20, T = 20, B = 45;
  const auto sx = [&](double x) { return L + (W - L - R) * (x / x_max); };
  const auto sy = [&](double y) {
    return T + (H - T - B) * ((y_max - y) / (y_max - y_min));
  };
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  const int n_colors = 8;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" "
         "width=\"800\" height=\"500\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"#ffffff\"/>\n";
  svg << "<rect x=\"" << detail::fmt2(L) << "\" y=\"" << detail::fmt2(T) << "\" width=\""
      << detail::fmt2(W - L - R) << "\" height=\"" << detail::fmt2(H - T - B)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  // x ticks: up to 6 integer ticks.
  const int x_ticks = std::min(6, static_cast<int>(x_max));
  for (int t = 0; t <= x_ticks; ++t) {
    const double xv = std::round(x_max * t / std::max(1, x_ticks));
    const double px = sx(xv);
    svg << "<line x1=\"" << detail::fmt2(px) << "\" y1=\"" << detail::fmt2(H - B)
        << "\" x2=\"" << detail::fmt2(px) << "\" y2=\"" << detail::fmt2(H - B + 5)
        << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << detail::fmt2(px) << "\" y=\"" << detail::fmt2(H - B + 20)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
        << static_cast<long long>(xv) << "</text>\n";
  }
  svg << "<text x=\"" << detail::fmt2((L + W - R) / 2) << "\" y=\""
      << detail::fmt2(H - 8)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
         "iteration</text>\n";

  // y ticks: integer decades, at most 9.
  const int dec_lo = static_cast<int>(std::floor(y_min));
  const int dec_hi = static_cast<int>(std::ceil(y_max));
  int step = 1;
  while ((dec_hi - dec_lo) / step > 8) ++step;
  for (int d = dec_lo; d <= dec_hi; d += step) {
    if (d < y_min - 1e-9 || d > y_max + 1e-9) continue;
    const double py = sy(d);
    svg << "<line x1=\"" << detail::fmt2(L - 5) << "\" y1=\"" << detail::fmt2(py)
        << "\" x2=\"" << detail::fmt2(L) << "\" y2=\"" << detail::fmt2(py)
        << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << detail::fmt2(L - 9) << "\" y=\"" << detail::fmt2(py + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">1e" << d
        << "</text>\n";
  }
  svg << "<text x=\"16\" y=\"" << detail::fmt2((T + H - B) / 2)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 16 "
      << detail::fmt2((T + H - B) / 2) << ")\">" << column << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    svg << "<polyline fill=\"none\" stroke=\"" << kPalette[i % n_colors]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series[i].pts.size(); ++k) {
      if (k) svg << ' ';
      svg << detail::fmt2(sx(series[i].pts[k].first)) << ','
          << detail::fmt2(sy(series[i].pts[k].second));
    }
    svg << "\"/>\n";
  }

  for (std::size_t i = 0; i < series.size(); ++i) {
    const double ly = T + 16 + 18 * static_cast<double>(i);
    svg << "<line x1=\"" << detail::fmt2(W - R - 150) << "\" y1=\"" << detail::fmt2(ly)
        << "\" x2=\"" << detail::fmt2(W - R - 126) << "\" y2=\"" << detail::fmt2(ly)
        << "\" stroke=\"" << kPalette[i % n_colors] << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << detail::fmt2(W - R - 120) << "\" y=\"" << detail::fmt2(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[i].label
        << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write SVG " + out_path.string());
  out << svg.str();
  return result;
}

}  // namespace hoal
