#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "cdflow/errors.hpp"
#include "cdflow/grid.hpp"
#include "cdflow/polynomial.hpp"

namespace cdflow {

enum class WeightFamily { quadratic, quartic, even_polynomial };

inline std::string to_string(WeightFamily f) {
  switch (f) {
    case WeightFamily::quadratic: return "quadratic";
    case WeightFamily::quartic: return "quartic";
    case WeightFamily::even_polynomial: return "poly";
  }
  return "poly";
}

// Even polynomial weight phi with phi > 0 and phi'' >= c > 0.
class WeightFunction {
 public:
  static WeightFunction quadratic() { return WeightFunction(WeightFamily::quadratic, {1.0, 1.0}, std::nullopt); }
  static WeightFunction quartic() { return WeightFunction(WeightFamily::quartic, {1.0, 1.0, 1.0}, std::nullopt); }

  // even[k] multiplies x^(2k). A requested convexity bound c is checked
  // against the probe grid; otherwise c is the computed infimum of phi''.
  static WeightFunction even_polynomial(std::vector<double> even, std::optional<double> c = std::nullopt) {
    return WeightFunction(WeightFamily::even_polynomial, std::move(even), c);
  }

  WeightFamily family() const { return family_; }
  const std::vector<double>& even_coefficients() const { return even_; }
  const Polynomial& polynomial() const { return phi_; }
  int degree() const { return phi_.degree(); }
  double convexity() const { return c_; }

  double eval(double x) const { return phi_(x); }
  double d1(double x) const { return dphi_(x); }
  double d2(double x) const { return d2phi_(x); }
  double operator()(double x) const { return phi_(x); }

  bool is_quadratic_shape() const {
    return degree() == 2 && phi_.coefficient(0) == phi_.coefficient(2);
  }

 private:
  WeightFunction(WeightFamily family, std::vector<double> even, std::optional<double> c)
      : family_(family), even_(std::move(even)) {
    require(!even_.empty(), ErrorKind::InvalidWeight, "weight needs at least one coefficient");
    for (double v : even_)
      require(std::isfinite(v), ErrorKind::InvalidWeight, "weight coefficients must be finite");
    phi_ = Polynomial::from_even(even_);
    dphi_ = phi_.derivative();
    d2phi_ = dphi_.derivative();
    require(phi_.degree() >= 2, ErrorKind::NonConvex, "weight must have degree at least 2");
    require(phi_.leading() > 0.0, ErrorKind::InvalidWeight, "leading coefficient must be positive");

    // Probe on [0, X] with X beyond every real root of phi''' (Cauchy bound),
    // so phi'' is monotone past X and the probe sees its infimum.
    const Polynomial d3 = d2phi_.derivative();
    double bound = 1.0;
    for (int k = 0; k < d3.degree(); ++k)
      bound = std::max(bound, 1.0 + std::abs(d3.coefficient(static_cast<std::size_t>(k)) / d3.leading()));
    const int probes = 4001;
    double min_phi = std::numeric_limits<double>::infinity();
    double min_d2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < probes; ++i) {
      const double x = 2.0 * bound * i / (probes - 1);
      min_phi = std::min(min_phi, phi_(x));
      min_d2 = std::min(min_d2, d2phi_(x));
    }
    require(min_phi > 0.0, ErrorKind::InvalidWeight, "weight must be positive");
    if (c) {
      require(*c > 0.0, ErrorKind::NonConvex, "convexity bound must be positive");
      require(min_d2 >= *c - 1e-12, ErrorKind::NonConvex,
              "phi'' drops to " + std::to_string(min_d2) + " below c = " + std::to_string(*c));
      c_ = *c;
    } else {
      require(min_d2 > 0.0, ErrorKind::NonConvex, "phi'' is not bounded below by a positive constant");
      c_ = min_d2;
    }
  }

  WeightFamily family_;
  std::vector<double> even_;
  Polynomial phi_, dphi_, d2phi_;
  double c_ = 0.0;
};

enum class GridChoice { automatic, uniform, sinh };

struct MeasureOptions {
  double tail_tol = 1e-12;
  std::size_t nodes = 8001;
  std::optional<double> half_width;  // overrides the tail-derived R
  GridChoice grid = GridChoice::automatic;
  double min_half_width = 10.0;
  double max_half_width = 1e15;
  double uniform_limit = 1000.0;  // automatic switches to sinh beyond this R
};

// mu = Z phi^{-beta} dx truncated to [-R, R].
struct MeasureSpec {
  WeightFunction weight;
  double beta = 0.0;
  double Z = 0.0;
  double R = 0.0;
  double tail_bound = 0.0;
  double quadrature_error = 0.0;
  GridPtr grid;
  std::vector<double> density;  // Z phi^{-beta}(x_i)
  std::vector<double> mass;     // quadrature weight times density

  std::size_t size() const { return mass.size(); }
};

// 2 Z b^{-beta} R^{1 - beta deg} / (beta deg - 1), using phi(x) >= b x^deg for x >= R.
inline double tail_mass_bound(const WeightFunction& w, double beta, double Z, double R) {
  const Polynomial& phi = w.polynomial();
  const int deg = phi.degree();
  double b = phi.leading();
  for (int k = 0; k < deg; ++k) {
    const double ck = phi.coefficient(static_cast<std::size_t>(k));
    if (ck < 0.0) b += ck * std::pow(R, k - deg);
  }
  if (b <= 0.0) return std::numeric_limits<double>::infinity();
  const double order = beta * deg;
  return 2.0 * Z * std::pow(b, -beta) * std::pow(R, 1.0 - order) / (order - 1.0);
}

namespace detail {

inline double weight_power(const WeightFunction& w, double beta, double x) {
  return std::exp(-beta * std::log(w.eval(x)));
}

inline double trapezoid_density(const WeightFunction& w, double beta, double a, double b, int n) {
  double acc = 0.0;
  const double h = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    const double v = weight_power(w, beta, a + i * h);
    acc += (i == 0 || i == n) ? 0.5 * v : v;
  }
  return acc * h;
}

}  // namespace detail

inline MeasureSpec build_measure(const WeightFunction& w, double beta, const MeasureOptions& opt = {}) {
  require(std::isfinite(beta), ErrorKind::InvalidArgument, "beta must be finite");
  const double order = beta * w.degree();
  require(order > 1.0, ErrorKind::NonIntegrable,
          "phi^{-beta} decays like |x|^{-" + std::to_string(order) + "}, order must exceed 1");
  require(opt.tail_tol > 0.0, ErrorKind::InvalidArgument, "tail tolerance must be positive");
  require(opt.nodes >= 7, ErrorKind::InvalidArgument, "need at least 7 nodes");

  double R = 0.0;
  if (opt.half_width) {
    R = *opt.half_width;
    require(R > 0.0 && std::isfinite(R), ErrorKind::InvalidArgument, "R must be positive");
  } else {
    // Upper estimate of Z from the core [-1, 1].
    const double z_est = 1.0 / detail::trapezoid_density(w, beta, -1.0, 1.0, 2000);
    auto bound = [&](double r) { return tail_mass_bound(w, beta, z_est, r); };
    if (bound(opt.min_half_width) <= opt.tail_tol) {
      R = opt.min_half_width;
    } else {
      require(bound(opt.max_half_width) <= opt.tail_tol, ErrorKind::TailUnreachable,
              "tail bound exceeds tolerance even at R = " + std::to_string(opt.max_half_width));
      double lo = std::log(opt.min_half_width), hi = std::log(opt.max_half_width);
      for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        (bound(std::exp(mid)) <= opt.tail_tol ? hi : lo) = mid;
      }
      R = std::exp(hi);
    }
  }

  GridChoice kind = opt.grid;
  if (kind == GridChoice::automatic) kind = R <= opt.uniform_limit ? GridChoice::uniform : GridChoice::sinh;
  GridPtr grid = kind == GridChoice::uniform ? Grid::uniform(R, opt.nodes) : Grid::sinh(R, opt.nodes);

  MeasureSpec m{w, beta, 0.0, R, 0.0, 0.0, grid, {}, {}};
  const std::size_t n = grid->size();
  std::vector<double> raw(n);
  const auto x = grid->nodes();
  const auto wq = grid->weights();
  double integral = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    raw[i] = detail::weight_power(w, beta, x[i]);
    integral += wq[i] * raw[i];
  }
  require(integral > 0.0 && std::isfinite(integral), ErrorKind::NonIntegrable, "normalization failed");
  m.Z = 1.0 / integral;

  // Same rule on every other node (n odd) as a Richardson-style estimate.
  if (n % 2 == 1) {
    double coarse = 0.0;
    for (std::size_t i = 0; i < n; i += 2) {
      const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      coarse += wi * 2.0 * grid->step() * grid->jacobian()[i] * raw[i];
    }
    m.quadrature_error = std::abs(coarse - integral) / 3.0 / integral;
  }
  m.quadrature_error = std::max(m.quadrature_error, 64.0 * std::numeric_limits<double>::epsilon());
  m.tail_bound = tail_mass_bound(w, beta, m.Z, R);

  m.density.resize(n);
  m.mass.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.density[i] = m.Z * raw[i];
    m.mass[i] = wq[i] * m.density[i];
  }
  return m;
}

inline MeasureSpec build_measure(const WeightFunction& w, double beta, double tail_tol) {
  MeasureOptions opt;
  opt.tail_tol = tail_tol;
  return build_measure(w, beta, opt);
}

inline double moment(const MeasureSpec& m, const GridFunction& g) {
  check_same_grid(g, *m.grid);
  double acc = 0.0;
  for (std::size_t i = 0; i < m.mass.size(); ++i) acc += m.mass[i] * g.values[i];
  return acc;
}

inline double moment(const MeasureSpec& m, std::span<const double> g) {
  require(g.size() == m.mass.size(), ErrorKind::ShapeMismatch, "moment: length differs from node count");
  double acc = 0.0;
  for (std::size_t i = 0; i < m.mass.size(); ++i) acc += m.mass[i] * g[i];
  return acc;
}

template <class Fn>
  requires std::is_invocable_r_v<double, Fn, double>
double moment(const MeasureSpec& m, Fn&& g) {
  const auto x = m.grid->nodes();
  double acc = 0.0;
  for (std::size_t i = 0; i < m.mass.size(); ++i) acc += m.mass[i] * g(x[i]);
  return acc;
}

}  // namespace cdflow
