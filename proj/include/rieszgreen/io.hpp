#pragma once

// Tables with full-precision CSV output, matrix export and minimal SVG plots.

#include "rieszgreen/core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace rieszgreen::io {

/// 17 significant digits; round-trips every finite double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Cell = std::variant<double, long long, std::string>;

inline std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != header.size()) fail(ErrorKind::invariant, "Table " + name + ": row width mismatch");
    rows.push_back(std::move(row));
  }

  std::string to_csv() const {
    std::ostringstream out;
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << format_cell(header[k]);
    out << "\n";
    for (const auto& row : rows) {
      for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_cell(row[k]);
      out << "\n";
    }
    return out.str();
  }
};

inline std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << "\n";
  }
  return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::config, "cannot write " + path.string());
  out << text;
}

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline const char* palette(std::size_t k) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
  return colors[k % 6];
}

}  // namespace detail

/// Line plot with markers; axes are scaled to the data range.
inline std::string line_plot_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                                 const std::vector<Series>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!(x1 > x0)) {
    x0 -= 1;
    x1 += 1;
  }
  if (!(y1 > y0)) {
    y0 -= 1;
    y1 += 1;
  }
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
      << (T + H - B) / 2 << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    out << "<text x=\"" << detail::svg_number(px(xv)) << "\" y=\"" << H - B + 16
        << "\" text-anchor=\"middle\" font-size=\"10\">" << format_double(static_cast<float>(xv)) << "</text>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << detail::svg_number(py(yv) + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(static_cast<float>(yv)) << "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    out << "<polyline fill=\"none\" stroke=\"" << detail::palette(k) << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
        out << detail::svg_number(px(s.x[i])) << "," << detail::svg_number(py(s.y[i])) << " ";
    out << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
        out << "<circle cx=\"" << detail::svg_number(px(s.x[i])) << "\" cy=\"" << detail::svg_number(py(s.y[i]))
            << "\" r=\"2.5\" fill=\"" << detail::palette(k) << "\"/>\n";
    out << "<text x=\"" << W - R - 150 << "\" y=\"" << T + 14 * (k + 1) << "\" font-size=\"11\" fill=\""
        << detail::palette(k) << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

/// Points projected onto two coordinates, colored by value (white to dark red).
inline std::string heat_map_svg(const std::string& title, const Eigen::MatrixXd& xy, const Eigen::VectorXd& value) {
  constexpr double W = 520, H = 520, M = 40;
  const double x0 = xy.col(0).minCoeff(), x1 = xy.col(0).maxCoeff();
  const double y0 = xy.col(1).minCoeff(), y1 = xy.col(1).maxCoeff();
  const double span = std::max({x1 - x0, y1 - y0, 1e-300});
  const double vmax = std::max(value.maxCoeff(), 1e-300);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  std::vector<Index> order(static_cast<std::size_t>(value.size()));
  for (Index i = 0; i < value.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return value[a] < value[b]; });
  for (Index i : order) {
    const double t = std::clamp(value[i] / vmax, 0.0, 1.0);
    const int g = static_cast<int>(std::lround(255.0 * (1.0 - t)));
    char color[16];
    std::snprintf(color, sizeof color, "#%02x%02x%02x", std::clamp(255 - g / 3, 0, 255), g, g);
    out << "<circle cx=\"" << detail::svg_number(M + (xy(i, 0) - x0) / span * (W - 2 * M)) << "\" cy=\""
        << detail::svg_number(H - M - (xy(i, 1) - y0) / span * (H - 2 * M)) << "\" r=\"3\" fill=\"" << color
        << "\" stroke=\"#999\" stroke-width=\"0.3\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace rieszgreen::io
