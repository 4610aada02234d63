#include "wbe/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wbe {

GridDomain::GridDomain(int dims, std::array<Index, 3> shape, std::array<double, 3> spacing,
                       std::array<double, 3> origin)
    : dims_(dims), shape_(shape), spacing_(spacing), origin_(origin) {
  if (dims != 2 && dims != 3) throw std::invalid_argument("GridDomain: dims must be 2 or 3");
  if (dims == 2) {
    shape_[2] = 1;
    spacing_[2] = 1.0;
    origin_[2] = 0.0;
  }
  for (int a = 0; a < dims; ++a) {
    if (shape_[a] < 3)
      throw std::invalid_argument("GridDomain: axis " + std::to_string(a) + " needs >= 3 cells");
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a]))
      throw std::invalid_argument("GridDomain: spacing must be positive");
    if (!std::isfinite(origin_[a])) throw std::invalid_argument("GridDomain: origin not finite");
  }
}

GridDomain GridDomain::planar(Index nx, Index ny, double dx, double dy, double ox, double oy) {
  return GridDomain(2, {nx, ny, 1}, {dx, dy, 1.0}, {ox, oy, 0.0});
}

GridDomain GridDomain::cube(Index nx, Index ny, Index nz, double h, const Point& origin) {
  return GridDomain(3, {nx, ny, nz}, {h, h, h}, {origin.x(), origin.y(), origin.z()});
}

double GridDomain::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dims_; ++a) v *= spacing_[a];
  return v;
}

std::array<Index, 3> GridDomain::unravel(Index n) const {
  const Index k = n % shape_[2];
  n /= shape_[2];
  const Index j = n % shape_[1];
  const Index i = n / shape_[1];
  return {i, j, k};
}

Point GridDomain::cell_center(Index i, Index j, Index k) const {
  Point p(origin_[0] + spacing_[0] * static_cast<double>(i),
          origin_[1] + spacing_[1] * static_cast<double>(j), 0.0);
  if (dims_ == 3) p.z() = origin_[2] + spacing_[2] * static_cast<double>(k);
  return p;
}

Point GridDomain::to_grid(const Point& x) const {
  Point g = Point::Zero();
  for (int a = 0; a < dims_; ++a) g[a] = (x[a] - origin_[a]) / spacing_[a];
  return g;
}

Point GridDomain::to_world(const Point& g) const {
  Point x = Point::Zero();
  for (int a = 0; a < dims_; ++a) x[a] = origin_[a] + g[a] * spacing_[a];
  return x;
}

Point GridDomain::lower_bound() const {
  Point p = Point::Zero();
  for (int a = 0; a < dims_; ++a) p[a] = origin_[a] - 0.5 * spacing_[a];
  return p;
}

Point GridDomain::upper_bound() const {
  Point p = Point::Zero();
  for (int a = 0; a < dims_; ++a)
    p[a] = origin_[a] + (static_cast<double>(shape_[a]) - 0.5) * spacing_[a];
  return p;
}

bool GridDomain::contains(const Point& x) const {
  const Point lo = lower_bound();
  const Point hi = upper_bound();
  for (int a = 0; a < dims_; ++a)
    if (!(x[a] >= lo[a] && x[a] <= hi[a])) return false;
  return true;
}

Point GridDomain::clamp(const Point& x) const {
  const Point lo = lower_bound();
  const Point hi = upper_bound();
  Point c = Point::Zero();
  for (int a = 0; a < dims_; ++a) c[a] = std::clamp(x[a], lo[a], hi[a]);
  return c;
}

ScalarField::ScalarField(GridDomain domain, double fill)
    : domain_(domain), values_(static_cast<std::size_t>(domain.cell_count()), fill) {}

ScalarField::ScalarField(GridDomain domain, std::vector<double> values)
    : domain_(domain), values_(std::move(values)) {
  if (static_cast<Index>(values_.size()) != domain_.cell_count())
    throw std::invalid_argument("ScalarField: value count does not match the grid");
}

double ScalarField::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_domain(*this, other, "operator+=");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += other.values_[n];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_domain(*this, other, "operator-=");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= other.values_[n];
  return *this;
}

ScalarField& ScalarField::operator*=(double scale) {
  for (double& v : values_) v *= scale;
  return *this;
}

ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator*(ScalarField a, double scale) { return a *= scale; }

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  require_same_domain(a, b, "max_abs_diff");
  double m = 0.0;
  for (Index n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

void require_same_domain(const ScalarField& a, const ScalarField& b, const char* what) {
  if (!(a.domain() == b.domain()))
    throw std::invalid_argument(std::string(what) + ": fields live on different grids");
}

namespace {

// Lower corner index and fractional offset per axis for multilinear blending.
struct Stencil {
  std::array<Index, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
};

Stencil interpolation_stencil(const GridDomain& d, const Point& x) {
  Stencil s;
  const Point g = d.to_grid(x);
  for (int a = 0; a < d.dims(); ++a) {
    const double hi = static_cast<double>(d.shape(a) - 1);
    const double c = std::clamp(g[a], 0.0, hi);
    Index b = static_cast<Index>(std::floor(c));
    b = std::min<Index>(b, d.shape(a) - 2);
    s.base[a] = b;
    s.frac[a] = c - static_cast<double>(b);
  }
  return s;
}

template <typename CornerFn>
double blend(const GridDomain& d, const Stencil& s, CornerFn&& corner) {
  const int corners = d.dims() == 3 ? 8 : 4;
  double acc = 0.0;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::array<Index, 3> idx = s.base;
    for (int a = 0; a < d.dims(); ++a) {
      const bool up = (c >> a) & 1;
      w *= up ? s.frac[a] : 1.0 - s.frac[a];
      idx[a] += up ? 1 : 0;
    }
    if (w != 0.0) acc += w * corner(idx);
  }
  return acc;
}

double cell_gradient(const ScalarField& u, const std::array<Index, 3>& idx, int axis) {
  const GridDomain& d = u.domain();
  const Index n = d.shape(axis);
  std::array<Index, 3> lo = idx;
  std::array<Index, 3> hi = idx;
  double span = 2.0;
  if (idx[axis] == 0) {
    hi[axis] = 1;
    span = 1.0;
  } else if (idx[axis] == n - 1) {
    lo[axis] = n - 2;
    span = 1.0;
  } else {
    lo[axis] -= 1;
    hi[axis] += 1;
  }
  return (u.at(hi[0], hi[1], hi[2]) - u.at(lo[0], lo[1], lo[2])) / (span * d.spacing(axis));
}

}  // namespace

double sample_value(const ScalarField& u, const Point& x) {
  const GridDomain& d = u.domain();
  const Stencil s = interpolation_stencil(d, x);
  return blend(d, s, [&](const std::array<Index, 3>& i) { return u.at(i[0], i[1], i[2]); });
}

Eigen::Vector3d sample_gradient(const ScalarField& u, const Point& x) {
  const GridDomain& d = u.domain();
  const Stencil s = interpolation_stencil(d, x);
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  for (int a = 0; a < d.dims(); ++a)
    g[a] = blend(d, s, [&](const std::array<Index, 3>& i) { return cell_gradient(u, i, a); });
  return g;
}

}  // namespace wbe
