#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdflow/errors.hpp"

namespace cdflow {

// Node layouts on [-R, R]. Both are uniform in a computational variable s;
// `sinh` maps x = a sinh(s / a)... with a the scale, concentrating nodes near
// the origin so that very large truncation widths stay affordable.
enum class GridKind { uniform, sinh };

constexpr std::string_view to_string(GridKind kind) {
  return kind == GridKind::uniform ? "uniform" : "sinh";
}

class Grid {
 public:
  static std::shared_ptr<const Grid> uniform(double half_width, std::size_t count) {
    return std::shared_ptr<const Grid>(new Grid(GridKind::uniform, half_width, count, 1.0));
  }

  static std::shared_ptr<const Grid> sinh(double half_width, std::size_t count, double scale = 1.0) {
    return std::shared_ptr<const Grid>(new Grid(GridKind::sinh, half_width, count, scale));
  }

  GridKind kind() const { return kind_; }
  double half_width() const { return half_width_; }
  double scale() const { return scale_; }
  std::size_t size() const { return x_.size(); }
  double step() const { return ds_; }  // spacing in the computational variable

  std::span<const double> nodes() const { return x_; }
  double node(std::size_t i) const { return x_[i]; }
  // Composite trapezoid weights in s, times dx/ds.
  std::span<const double> weights() const { return w_; }
  std::span<const double> jacobian() const { return xs_; }
  std::span<const double> jacobian_derivative() const { return xss_; }

  // x at the half node between i and i+1 (in the computational variable).
  double midpoint(std::size_t i) const { return map(s0_ + (static_cast<double>(i) + 0.5) * ds_); }

  double map(double s) const {
    return kind_ == GridKind::uniform ? s : scale_ * std::sinh(s / scale_);
  }

  bool same_layout(const Grid& other) const {
    return this == &other || (kind_ == other.kind_ && x_.size() == other.x_.size() &&
                              half_width_ == other.half_width_ && scale_ == other.scale_);
  }

 private:
  Grid(GridKind kind, double half_width, std::size_t count, double scale)
      : kind_(kind), half_width_(half_width), scale_(scale) {
    require(count >= 7, ErrorKind::InvalidArgument, "grid needs at least 7 nodes");
    require(half_width > 0.0 && std::isfinite(half_width), ErrorKind::InvalidArgument,
            "grid half-width must be positive and finite");
    require(scale > 0.0, ErrorKind::InvalidArgument, "sinh grid scale must be positive");
    const double s_max = kind == GridKind::uniform ? half_width : scale * std::asinh(half_width / scale);
    s0_ = -s_max;
    ds_ = 2.0 * s_max / static_cast<double>(count - 1);
    x_.resize(count);
    xs_.resize(count);
    xss_.resize(count);
    w_.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      // Symmetric construction keeps x_i = -x_{N-1-i} bit-exactly.
      const std::size_t mirror = count - 1 - i;
      const double s = i <= mirror ? -s_max + static_cast<double>(i) * ds_
                                   : s_max - static_cast<double>(mirror) * ds_;
      if (kind == GridKind::uniform) {
        x_[i] = s;
        xs_[i] = 1.0;
        xss_[i] = 0.0;
      } else {
        x_[i] = scale * std::sinh(s / scale);
        xs_[i] = std::cosh(s / scale);
        xss_[i] = std::sinh(s / scale) / scale;
      }
      w_[i] = ds_ * xs_[i];
    }
    if (count % 2 == 1) x_[count / 2] = 0.0;
    x_.front() = -half_width;
    x_.back() = half_width;
    w_.front() *= 0.5;
    w_.back() *= 0.5;
  }

  GridKind kind_;
  double half_width_;
  double scale_;
  double s0_ = 0.0;
  double ds_ = 0.0;
  std::vector<double> x_, xs_, xss_, w_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Values aligned with the nodes of a grid.
struct GridFunction {
  GridPtr grid;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

inline void check_same_grid(const GridFunction& f, const Grid& grid) {
  require(f.grid && f.grid->same_layout(grid) && f.values.size() == grid.size(),
          ErrorKind::ShapeMismatch, "grid function sampled on a different grid");
}

inline void check_finite(const GridFunction& f) {
  for (double v : f.values)
    require(std::isfinite(v), ErrorKind::InvalidArgument, "grid function has non-finite entries");
}

template <class Fn>
GridFunction sample(const GridPtr& grid, Fn&& fn) {
  GridFunction out{grid, std::vector<double>(grid->size())};
  for (std::size_t i = 0; i < grid->size(); ++i) out.values[i] = fn(grid->node(i));
  return out;
}

namespace fd {

// Fourth-order derivatives in the computational variable, one-sided
// five/six-point stencils at the two outermost nodes on each side.
inline std::vector<double> d1_computational(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  const double inv = 1.0 / (12.0 * h);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * inv;
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * inv;
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * inv;
  const std::size_t m = n - 1;
  d[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4]) * inv;
  d[m - 1] = (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) * inv;
  return d;
}

inline std::vector<double> d2_computational(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  const double inv = 1.0 / (12.0 * h * h);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) * inv;
  d[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) * inv;
  d[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) * inv;
  const std::size_t m = n - 1;
  d[m] = (45.0 * f[m] - 154.0 * f[m - 1] + 214.0 * f[m - 2] - 156.0 * f[m - 3] + 61.0 * f[m - 4] -
          10.0 * f[m - 5]) * inv;
  d[m - 1] = (10.0 * f[m] - 15.0 * f[m - 1] - 4.0 * f[m - 2] + 14.0 * f[m - 3] - 6.0 * f[m - 4] +
              f[m - 5]) * inv;
  return d;
}

// d/dx on the physical nodes.
inline std::vector<double> d1(const Grid& grid, std::span<const double> f) {
  std::vector<double> d = d1_computational(f, grid.step());
  const auto xs = grid.jacobian();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] /= xs[i];
  return d;
}

// d^2/dx^2 on the physical nodes.
inline std::vector<double> d2(const Grid& grid, std::span<const double> f) {
  const std::vector<double> fs = d1_computational(f, grid.step());
  std::vector<double> fss = d2_computational(f, grid.step());
  const auto xs = grid.jacobian();
  const auto xss = grid.jacobian_derivative();
  for (std::size_t i = 0; i < fss.size(); ++i)
    fss[i] = (fss[i] - xss[i] * fs[i] / xs[i]) / (xs[i] * xs[i]);
  return fss;
}

}  // namespace fd
}  // namespace cdflow
