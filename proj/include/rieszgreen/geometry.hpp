#pragma once

// Point-cloud generators (grids, sphere shells, balls, annuli, cones, plane
// patches) and CSV loading. Every generator returns one point per row.

#include "rieszgreen/core.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace rieszgreen::geometry {

/// Uniform tensor grid on the box [lo, hi] with counts[k] nodes per axis.
inline Eigen::MatrixXd grid(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const std::vector<int>& counts) {
  const Index n = lo.size();
  if (hi.size() != n || static_cast<Index>(counts.size()) != n) fail(ErrorKind::config, "grid: dimension mismatch");
  Index total = 1;
  for (int c : counts) {
    if (c < 1) fail(ErrorKind::config, "grid: counts must be positive");
    total *= c;
  }
  Eigen::MatrixXd out(total, n);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (Index row = 0; row < total; ++row) {
    for (Index k = 0; k < n; ++k) {
      const int c = counts[static_cast<std::size_t>(k)];
      const double t = c == 1 ? 0.5 : static_cast<double>(idx[static_cast<std::size_t>(k)]) / (c - 1);
      out(row, k) = lo[k] + t * (hi[k] - lo[k]);
    }
    for (Index k = n - 1; k >= 0; --k) {
      if (++idx[static_cast<std::size_t>(k)] < counts[static_cast<std::size_t>(k)]) break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }
  return out;
}

/// Nearly uniform points on the sphere |x - center| = radius (n = 3: Fibonacci
/// spiral; n = 2: equally spaced circle).
inline Eigen::MatrixXd sphere(Index count, double radius, const Eigen::VectorXd& center) {
  if (count < 1) fail(ErrorKind::config, "sphere: count must be positive");
  if (!(radius > 0.0)) fail(ErrorKind::config, "sphere: radius must be positive");
  const Index n = center.size();
  Eigen::MatrixXd out(count, n);
  if (n == 2) {
    for (Index i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
      out.row(i) = (center + radius * Eigen::Vector2d(std::cos(t), std::sin(t))).transpose();
    }
    return out;
  }
  if (n != 3) fail(ErrorKind::config, "sphere: only n = 2 or n = 3 supported");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (Index i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    out.row(i) = (center + radius * Eigen::Vector3d(r * std::cos(phi), r * std::sin(phi), z)).transpose();
  }
  return out;
}

/// Cubic lattice points with spacing h inside the closed ball |x - center| <= radius.
inline Eigen::MatrixXd ball(double radius, double h, const Eigen::VectorXd& center) {
  if (!(radius > 0.0 && h > 0.0)) fail(ErrorKind::config, "ball: radius and spacing must be positive");
  const Index n = center.size();
  const int m = static_cast<int>(std::floor(radius / h + 1e-9));
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> idx(static_cast<std::size_t>(n), -m);
  while (true) {
    Eigen::VectorXd p(n);
    for (Index k = 0; k < n; ++k) p[k] = h * idx[static_cast<std::size_t>(k)];
    if (p.norm() <= radius * (1.0 + 1e-12)) pts.push_back(center + p);
    Index k = n - 1;
    for (; k >= 0; --k) {
      if (++idx[static_cast<std::size_t>(k)] <= m) break;
      idx[static_cast<std::size_t>(k)] = -m;
    }
    if (k < 0) break;
  }
  Eigen::MatrixXd out(static_cast<Index>(pts.size()), n);
  for (std::size_t i = 0; i < pts.size(); ++i) out.row(static_cast<Index>(i)) = pts[i].transpose();
  return out;
}

/// Lattice points with spacing h in the shell r_inner < |x - center| <= r_outer.
inline Eigen::MatrixXd annulus(double r_inner, double r_outer, double h, const Eigen::VectorXd& center) {
  if (!(r_outer > r_inner && r_inner >= 0.0)) fail(ErrorKind::config, "annulus: need 0 <= inner < outer");
  const Eigen::MatrixXd full = ball(r_outer, h, center);
  std::vector<Index> keep;
  for (Index i = 0; i < full.rows(); ++i)
    if ((full.row(i).transpose() - center).norm() > r_inner) keep.push_back(i);
  Eigen::MatrixXd out(static_cast<Index>(keep.size()), full.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Index>(i)) = full.row(keep[i]);
  return out;
}

/// Lattice points with spacing h in the solid cone with apex `apex`, axis along
/// the last coordinate, half-angle `half_angle` (radians), truncated to
/// r_min <= |x - apex| <= r_max.
inline Eigen::MatrixXd cone(double half_angle, double r_min, double r_max, double h, const Eigen::VectorXd& apex) {
  if (!(half_angle > 0.0 && half_angle < std::numbers::pi / 2))
    fail(ErrorKind::config, "cone: half-angle must lie in (0, pi/2)");
  if (!(r_max > r_min && r_min >= 0.0 && h > 0.0)) fail(ErrorKind::config, "cone: need 0 <= r_min < r_max, h > 0");
  const Index n = apex.size();
  const int m = static_cast<int>(std::floor(r_max / h + 1e-9));
  const double cos_a = std::cos(half_angle);
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> idx(static_cast<std::size_t>(n), -m);
  idx[static_cast<std::size_t>(n - 1)] = 0;
  while (true) {
    Eigen::VectorXd p(n);
    for (Index k = 0; k < n; ++k) p[k] = h * idx[static_cast<std::size_t>(k)];
    const double r = p.norm();
    if (r >= r_min * (1.0 - 1e-12) && r <= r_max * (1.0 + 1e-12) && r > 0.0 && p[n - 1] >= cos_a * r * (1.0 - 1e-12))
      pts.push_back(apex + p);
    Index k = n - 1;
    for (; k >= 0; --k) {
      const int lo = (k == n - 1) ? 0 : -m;
      if (++idx[static_cast<std::size_t>(k)] <= m) break;
      idx[static_cast<std::size_t>(k)] = lo;
    }
    if (k < 0) break;
  }
  Eigen::MatrixXd out(static_cast<Index>(pts.size()), n);
  for (std::size_t i = 0; i < pts.size(); ++i) out.row(static_cast<Index>(i)) = pts[i].transpose();
  return out;
}

/// Square lattice on the hyperplane x_n = height with spacing h and
/// |x_k| <= half_width for k < n.
inline Eigen::MatrixXd plane(int dim, double half_width, double h, double height) {
  if (dim < 2) fail(ErrorKind::config, "plane: dim must be at least 2");
  const int m = static_cast<int>(std::floor(half_width / h + 1e-9));
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, -m * h);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim, m * h);
  lo[dim - 1] = hi[dim - 1] = height;
  std::vector<int> counts(static_cast<std::size_t>(dim), 2 * m + 1);
  counts.back() = 1;
  return grid(lo, hi, counts);
}

/// Adds independent uniform perturbations in [-amplitude, amplitude] per coordinate.
inline Eigen::MatrixXd jitter(Eigen::MatrixXd pts, double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  for (Index i = 0; i < pts.rows(); ++i)
    for (Index k = 0; k < pts.cols(); ++k) pts(i, k) += u(rng);
  return pts;
}

struct CsvPoints {
  Eigen::MatrixXd coords;
  std::optional<Eigen::VectorXd> radii;
};

/// One row per point: `dim` coordinates, optionally followed by a cell radius.
/// A first line that does not parse as numbers is treated as a header.
inline CsvPoints load_csv(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "load_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;
      fail(ErrorKind::config, path + ":" + std::to_string(line_no) + ": not a numeric row");
    }
    if (static_cast<int>(vals.size()) != dim && static_cast<int>(vals.size()) != dim + 1)
      fail(ErrorKind::config, path + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) + " or " +
                                  std::to_string(dim + 1) + " columns");
    if (!rows.empty() && vals.size() != rows.front().size())
      fail(ErrorKind::config, path + ":" + std::to_string(line_no) + ": inconsistent column count");
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) fail(ErrorKind::config, "load_csv: no points in " + path);
  CsvPoints out;
  out.coords.resize(static_cast<Index>(rows.size()), dim);
  const bool with_radii = static_cast<int>(rows.front().size()) == dim + 1;
  if (with_radii) out.radii = Eigen::VectorXd(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < dim; ++k) out.coords(static_cast<Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
    if (with_radii) (*out.radii)[static_cast<Index>(i)] = rows[i][static_cast<std::size_t>(dim)];
  }
  return out;
}

}  // namespace rieszgreen::geometry
