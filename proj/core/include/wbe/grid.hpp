#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace wbe {

using Index = std::int64_t;
using Point = Eigen::Vector3d;

/// Uniform cell-centred rectilinear grid in 2D or 3D.
///
/// Cell (i0, i1[, i2]) has its centre at origin + spacing * index. Planar
/// grids keep a unit third axis of one cell so 2D and 3D share one indexing
/// path; world points of a planar grid ignore their z component.
class GridDomain {
 public:
  GridDomain(int dims, std::array<Index, 3> shape, std::array<double, 3> spacing,
             std::array<double, 3> origin);

  static GridDomain planar(Index nx, Index ny, double dx, double dy, double ox = 0.0,
                           double oy = 0.0);
  static GridDomain cube(Index nx, Index ny, Index nz, double h, const Point& origin);

  int dims() const { return dims_; }
  Index shape(int axis) const { return shape_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double origin(int axis) const { return origin_[axis]; }
  const std::array<Index, 3>& shape() const { return shape_; }
  const std::array<double, 3>& spacing() const { return spacing_; }
  const std::array<double, 3>& origin() const { return origin_; }

  Index cell_count() const { return shape_[0] * shape_[1] * shape_[2]; }
  double cell_volume() const;
  /// Total measure |Omega| of the cell union.
  double volume() const { return cell_volume() * static_cast<double>(cell_count()); }

  /// Row-major linear index, last axis fastest.
  Index linear(Index i, Index j, Index k = 0) const { return (i * shape_[1] + j) * shape_[2] + k; }
  std::array<Index, 3> unravel(Index linearIndex) const;

  Point cell_center(Index i, Index j, Index k = 0) const;
  /// Continuous grid coordinates: cell centres sit on integers.
  Point to_grid(const Point& x) const;
  Point to_world(const Point& g) const;

  /// Lower/upper corner of the cell union (cell faces, not centres).
  Point lower_bound() const;
  Point upper_bound() const;
  bool contains(const Point& x) const;
  /// Projects x onto the closed cell-union box.
  Point clamp(const Point& x) const;

  bool operator==(const GridDomain& other) const = default;

 private:
  int dims_;
  std::array<Index, 3> shape_;
  std::array<double, 3> spacing_;
  std::array<double, 3> origin_;
};

/// One double per cell of a GridDomain.
class ScalarField {
 public:
  explicit ScalarField(GridDomain domain, double fill = 0.0);
  ScalarField(GridDomain domain, std::vector<double> values);

  const GridDomain& domain() const { return domain_; }
  Index size() const { return static_cast<Index>(values_.size()); }

  double& operator[](Index n) { return values_[static_cast<std::size_t>(n)]; }
  double operator[](Index n) const { return values_[static_cast<std::size_t>(n)]; }
  double& at(Index i, Index j, Index k = 0) { return (*this)[domain_.linear(i, j, k)]; }
  double at(Index i, Index j, Index k = 0) const { return (*this)[domain_.linear(i, j, k)]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double sum() const;
  /// Sum of values times the cell volume.
  double integral() const { return sum() * domain_.cell_volume(); }
  double max_abs() const;
  double min() const;
  double max() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double scale);

 private:
  GridDomain domain_;
  std::vector<double> values_;
};

ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, double scale);

/// Max-norm of a - b.
double max_abs_diff(const ScalarField& a, const ScalarField& b);

/// Throws std::invalid_argument when the two fields live on different grids.
void require_same_domain(const ScalarField& a, const ScalarField& b, const char* what);

/// Multilinear interpolation of cell-centre values at x (clamped into the grid).
double sample_value(const ScalarField& u, const Point& x);

/// Gradient of u at x: per-axis central differences at cell centres
/// (one-sided on the outer layer), multilinearly interpolated to x.
/// Components beyond dims() are zero.
Eigen::Vector3d sample_gradient(const ScalarField& u, const Point& x);

}  // namespace wbe
