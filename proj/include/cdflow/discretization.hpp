#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "cdflow/errors.hpp"
#include "cdflow/operator.hpp"
#include "cdflow/tridiagonal.hpp"

namespace cdflow {

// Divergence-form quadratic forms on the measure's nodes:
//   f^T A f = sum_e a_e (f_{i+1} - f_i)^2 ~ int phi f'^2 dmu,
//   f^T M f = sum_i m_i f_i^2 ~ int f^2 dmu,
// with zero-flux ends. The flat form uses Gamma(f) = f'^2 instead.
struct DiscretizedOperator {
  OperatorSpec op;
  std::vector<double> edge;       // a_e, size N - 1
  std::vector<double> flat_edge;  // unweighted counterpart
  std::vector<double> mass;       // m_i, size N

  std::size_t size() const { return mass.size(); }
  const Grid& grid() const { return op.grid(); }
  GridPtr grid_ptr() const { return op.grid_ptr(); }
  const MeasureSpec& measure() const { return *op.measure; }

  const std::vector<double>& edges(bool weighted) const { return weighted ? edge : flat_edge; }

  double bilinear(std::span<const double> f, std::span<const double> g, bool weighted = true) const {
    require(f.size() == size() && g.size() == size(), ErrorKind::ShapeMismatch, "form: length mismatch");
    const auto& a = edges(weighted);
    double acc = 0.0;
    for (std::size_t e = 0; e < a.size(); ++e) acc += a[e] * (f[e + 1] - f[e]) * (g[e + 1] - g[e]);
    return acc;
  }

  double energy(std::span<const double> f, bool weighted = true) const { return bilinear(f, f, weighted); }

  double mass_product(std::span<const double> f, std::span<const double> g) const {
    require(f.size() == size() && g.size() == size(), ErrorKind::ShapeMismatch, "form: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i) acc += mass[i] * f[i] * g[i];
    return acc;
  }

  double integral(std::span<const double> f) const {
    require(f.size() == size(), ErrorKind::ShapeMismatch, "integral: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i) acc += mass[i] * f[i];
    return acc;
  }

  std::vector<double> apply_A(std::span<const double> f, bool weighted = true) const {
    require(f.size() == size(), ErrorKind::ShapeMismatch, "A: length mismatch");
    const auto& a = edges(weighted);
    std::vector<double> out(size(), 0.0);
    for (std::size_t e = 0; e < a.size(); ++e) {
      const double flux = a[e] * (f[e + 1] - f[e]);
      out[e] -= flux;
      out[e + 1] += flux;
    }
    return out;
  }

  // -M^{-1} A f, the discrete generator.
  std::vector<double> generator(std::span<const double> f) const {
    std::vector<double> out = apply_A(f);
    for (std::size_t i = 0; i < size(); ++i) out[i] = -out[i] / mass[i];
    return out;
  }

  GridFunction generator(const GridFunction& f) const {
    check_same_grid(f, grid());
    return GridFunction{f.grid, generator(std::span<const double>(f.values))};
  }

  tridiag::Symmetric stiffness(bool weighted = true) const {
    const auto& a = edges(weighted);
    tridiag::Symmetric t{std::vector<double>(size(), 0.0), std::vector<double>(a.size())};
    for (std::size_t e = 0; e < a.size(); ++e) {
      t.d[e] += a[e];
      t.d[e + 1] += a[e];
      t.e[e] = -a[e];
    }
    return t;
  }

  // M^{-1/2} A M^{-1/2}
  tridiag::Symmetric symmetrized(bool weighted = true) const {
    tridiag::Symmetric t = stiffness(weighted);
    for (std::size_t i = 0; i < size(); ++i) t.d[i] /= mass[i];
    for (std::size_t e = 0; e + 1 < size(); ++e) t.e[e] /= std::sqrt(mass[e] * mass[e + 1]);
    return t;
  }
};

inline DiscretizedOperator discretize(const OperatorSpec& op) {
  const Grid& g = op.grid();
  const MeasureSpec& m = *op.measure;
  const std::size_t n = g.size();
  DiscretizedOperator d{op, std::vector<double>(n - 1), std::vector<double>(n - 1), m.mass};
  const auto x = g.nodes();
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double xm = g.midpoint(e);
    const double dx = x[e + 1] - x[e];
    const double phi = op.w.eval(xm);
    const double dens = m.Z * std::exp(-op.beta * std::log(phi));
    d.edge[e] = dens * phi / dx;
    d.flat_edge[e] = dens / dx;
  }
  return d;
}

}  // namespace cdflow
