#pragma once

// Point clouds, region partitions and nonnegative discrete measures.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rieszgreen {

using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

/// Failure categories; the CLI maps each to a distinct exit status.
enum class ErrorKind { config, validation, solver, invariant };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

/// Sorted, duplicate-free copy of an index list.
inline IndexSet normalized(IndexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline bool is_subset(const IndexSet& a, const IndexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IndexSet iota_set(Index n) {
  IndexSet out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

/// Finite point cloud in R^n. Row i of `coords` is point i.
class PointSet {
 public:
  PointSet() = default;

  /// Cell radii default to half the nearest-neighbour distance.
  explicit PointSet(Eigen::MatrixXd coords) : coords_(std::move(coords)) {
    check_shape();
    const auto nn = nearest_neighbor_distances();
    radius_.resize(nn.size());
    for (std::size_t i = 0; i < nn.size(); ++i) radius_[i] = 0.5 * nn[i];
  }

  PointSet(Eigen::MatrixXd coords, std::vector<double> cell_radius)
      : coords_(std::move(coords)), radius_(std::move(cell_radius)) {
    check_shape();
    if (radius_.size() != static_cast<std::size_t>(coords_.rows()))
      fail(ErrorKind::validation, "PointSet: cell_radius size does not match point count");
    for (double r : radius_)
      if (!(r > 0.0) || !std::isfinite(r))
        fail(ErrorKind::validation, "PointSet: cell radii must be positive and finite");
    nearest_neighbor_distances();  // distinctness check
  }

  int dim() const noexcept { return static_cast<int>(coords_.cols()); }
  Index size() const noexcept { return coords_.rows(); }
  const Eigen::MatrixXd& coords() const noexcept { return coords_; }
  Eigen::VectorXd point(Index i) const { return coords_.row(i).transpose(); }
  double cell_radius(Index i) const { return radius_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& cell_radii() const noexcept { return radius_; }

  double distance(Index i, Index j) const { return (coords_.row(i) - coords_.row(j)).norm(); }

  /// Brute-force O(N^2) nearest-neighbour distances; throws on coincident points.
  std::vector<double> nearest_neighbor_distances() const {
    const Index n = size();
    std::vector<double> nn(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const double d = distance(i, j);
        if (!(d > 0.0)) fail(ErrorKind::validation, "PointSet: points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
        nn[static_cast<std::size_t>(i)] = std::min(nn[static_cast<std::size_t>(i)], d);
        nn[static_cast<std::size_t>(j)] = std::min(nn[static_cast<std::size_t>(j)], d);
      }
    }
    return nn;
  }

  double min_pairwise_distance() const {
    const auto nn = nearest_neighbor_distances();
    return nn.empty() ? std::numeric_limits<double>::infinity() : *std::min_element(nn.begin(), nn.end());
  }

  /// Subset of points in the order given by `idx`, keeping their cell radii.
  PointSet subset(const IndexSet& idx) const {
    Eigen::MatrixXd c(static_cast<Index>(idx.size()), coords_.cols());
    std::vector<double> r(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      c.row(static_cast<Index>(k)) = coords_.row(idx[k]);
      r[k] = radius_[static_cast<std::size_t>(idx[k])];
    }
    PointSet out;
    out.coords_ = std::move(c);
    out.radius_ = std::move(r);
    return out;
  }

  /// Concatenation; cell radii are recomputed from the merged cloud.
  static PointSet merge(const std::vector<Eigen::MatrixXd>& parts) {
    Index rows = 0;
    Index cols = parts.empty() ? 0 : parts.front().cols();
    for (const auto& p : parts) {
      if (p.cols() != cols) fail(ErrorKind::validation, "PointSet::merge: dimension mismatch");
      rows += p.rows();
    }
    Eigen::MatrixXd all(rows, cols);
    Index at = 0;
    for (const auto& p : parts) {
      all.middleRows(at, p.rows()) = p;
      at += p.rows();
    }
    return PointSet(std::move(all));
  }

 private:
  void check_shape() const {
    if (coords_.cols() < 2) fail(ErrorKind::validation, "PointSet: dimension must be at least 2");
    if (coords_.rows() < 1) fail(ErrorKind::validation, "PointSet: empty point cloud");
    if (!coords_.allFinite()) fail(ErrorKind::validation, "PointSet: non-finite coordinate");
  }

  Eigen::MatrixXd coords_;
  std::vector<double> radius_;
};

/// Nonnegative weights over the index space of some point list.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  explicit DiscreteMeasure(Index size) : w_(Eigen::VectorXd::Zero(size)) {}
  explicit DiscreteMeasure(Eigen::VectorXd weights) : w_(std::move(weights)) {
    for (Index i = 0; i < w_.size(); ++i)
      if (!(w_[i] >= 0.0) || !std::isfinite(w_[i]))
        fail(ErrorKind::validation, "DiscreteMeasure: weight " + std::to_string(i) + " is negative or not finite");
  }

  static DiscreteMeasure dirac(Index size, Index at, double mass = 1.0) {
    DiscreteMeasure m(size);
    m.set(at, mass);
    return m;
  }

  Index size() const noexcept { return w_.size(); }
  double operator[](Index i) const { return w_[i]; }
  const Eigen::VectorXd& weights() const noexcept { return w_; }
  double total_mass() const { return w_.sum(); }
  bool is_zero() const { return (w_.array() == 0.0).all(); }

  void set(Index i, double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) fail(ErrorKind::validation, "DiscreteMeasure: negative weight");
    w_[i] = value;
  }

  IndexSet support() const {
    IndexSet s;
    for (Index i = 0; i < w_.size(); ++i)
      if (w_[i] > 0.0) s.push_back(i);
    return s;
  }

  double mass_on(const IndexSet& idx) const {
    double m = 0.0;
    for (Index i : idx) m += w_[i];
    return m;
  }

  DiscreteMeasure scaled(double t) const { return DiscreteMeasure(Eigen::VectorXd(t * w_)); }

  friend DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    return DiscreteMeasure(Eigen::VectorXd(a.w_ + b.w_));
  }

 private:
  Eigen::VectorXd w_;
};

/// Trace of `mu` on `indices`.
inline DiscreteMeasure restrict(const DiscreteMeasure& mu, const IndexSet& indices) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(mu.size());
  for (Index i : indices) {
    if (i < 0 || i >= mu.size()) fail(ErrorKind::validation, "restrict: index out of range");
    w[i] = mu[i];
  }
  return DiscreteMeasure(std::move(w));
}

/// D, Y, F over one point set, with Omega = D \ F.
class DomainConfig {
 public:
  DomainConfig(PointSet ps, IndexSet d, IndexSet y, IndexSet f, double alpha)
      : ps_(std::move(ps)),
        d_(normalized(std::move(d))),
        y_(normalized(std::move(y))),
        f_(normalized(std::move(f))),
        alpha_(alpha) {
    const Index n = ps_.size();
    auto in_range = [n](const IndexSet& s) {
      return s.empty() || (s.front() >= 0 && s.back() < n);
    };
    if (!in_range(d_) || !in_range(y_) || !in_range(f_))
      fail(ErrorKind::validation, "DomainConfig: index out of range");
    if (!is_subset(f_, d_)) fail(ErrorKind::validation, "DomainConfig: F must be a subset of D");
    if (!set_intersection(y_, d_).empty()) fail(ErrorKind::validation, "DomainConfig: Y must be disjoint from D");
    if (f_.empty()) fail(ErrorKind::validation, "DomainConfig: F must be nonempty");
    omega_ = set_difference(d_, f_);
    if (omega_.empty()) fail(ErrorKind::validation, "DomainConfig: F must differ from D");
    check_alpha(alpha_, ps_.dim());
  }

  static void check_alpha(double alpha, int dim) {
    if (!(alpha > 0.0 && alpha < dim && alpha <= 2.0))
      fail(ErrorKind::validation, "alpha must lie in (0, n) and not exceed 2");
  }

  const PointSet& points() const noexcept { return ps_; }
  const IndexSet& d() const noexcept { return d_; }
  const IndexSet& y() const noexcept { return y_; }
  const IndexSet& f() const noexcept { return f_; }
  const IndexSet& omega() const noexcept { return omega_; }
  double alpha() const noexcept { return alpha_; }
  int dim() const noexcept { return ps_.dim(); }

 private:
  PointSet ps_;
  IndexSet d_, y_, f_, omega_;
  double alpha_;
};

/// Separation rho between supp(theta) and F (both as global point indices).
inline double validate_field_separation(const DiscreteMeasure& theta, const DomainConfig& cfg) {
  if (theta.size() != cfg.points().size())
    fail(ErrorKind::validation, "validate_field_separation: measure size does not match point set");
  if (theta.is_zero()) fail(ErrorKind::validation, "validate_field_separation: theta must be nonzero");
  const IndexSet supp = theta.support();
  if (!is_subset(supp, cfg.omega()))
    fail(ErrorKind::validation, "validate_field_separation: supp(theta) must lie in Omega = D \\ F");
  double rho = std::numeric_limits<double>::infinity();
  for (Index i : supp)
    for (Index j : cfg.f()) rho = std::min(rho, cfg.points().distance(i, j));
  return rho;
}

}  // namespace rieszgreen
