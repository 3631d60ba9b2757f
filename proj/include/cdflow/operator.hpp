#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "cdflow/errors.hpp"
#include "cdflow/grid.hpp"
#include "cdflow/weights.hpp"

namespace cdflow {

// L f = phi f'' - (beta - 1) phi' f' with reversible measure mu_{phi,beta}.
struct OperatorSpec {
  WeightFunction w;
  double beta = 0.0;
  std::shared_ptr<const MeasureSpec> measure;

  const Grid& grid() const { return *measure->grid; }
  GridPtr grid_ptr() const { return measure->grid; }
};

inline OperatorSpec make_operator(const WeightFunction& w, double beta, const MeasureOptions& opt = {}) {
  return OperatorSpec{w, beta, std::make_shared<const MeasureSpec>(build_measure(w, beta, opt))};
}

inline OperatorSpec make_operator(std::shared_ptr<const MeasureSpec> m) {
  require(m != nullptr, ErrorKind::InvalidArgument, "null measure");
  return OperatorSpec{m->weight, m->beta, std::move(m)};
}

template <class Fn>
GridFunction sample(const OperatorSpec& op, Fn&& fn) {
  return sample(op.grid_ptr(), std::forward<Fn>(fn));
}

namespace detail {

inline void check_operands(const OperatorSpec& op, const GridFunction& f) {
  check_same_grid(f, op.grid());
}

inline GridFunction like(const GridFunction& f) { return GridFunction{f.grid, std::vector<double>(f.size())}; }

}  // namespace detail

inline GridFunction gamma(const OperatorSpec& op, const GridFunction& f, const GridFunction& g) {
  detail::check_operands(op, f);
  detail::check_operands(op, g);
  const auto df = fd::d1(op.grid(), f.values);
  const auto dg = fd::d1(op.grid(), g.values);
  GridFunction out = detail::like(f);
  const auto x = op.grid().nodes();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op.w.eval(x[i]) * df[i] * dg[i];
  return out;
}

inline GridFunction gamma(const OperatorSpec& op, const GridFunction& f) { return gamma(op, f, f); }

inline GridFunction apply_L(const OperatorSpec& op, const GridFunction& f) {
  detail::check_operands(op, f);
  const auto df = fd::d1(op.grid(), f.values);
  const auto ddf = fd::d2(op.grid(), f.values);
  GridFunction out = detail::like(f);
  const auto x = op.grid().nodes();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = op.w.eval(x[i]) * ddf[i] - (op.beta - 1.0) * op.w.d1(x[i]) * df[i];
  return out;
}

inline GridFunction gamma2(const OperatorSpec& op, const GridFunction& f) {
  detail::check_operands(op, f);
  const auto df = fd::d1(op.grid(), f.values);
  const auto ddf = fd::d2(op.grid(), f.values);
  GridFunction out = detail::like(f);
  const auto x = op.grid().nodes();
  const double b = op.beta;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double p = op.w.eval(x[i]), p1 = op.w.d1(x[i]), p2 = op.w.d2(x[i]);
    out[i] = 0.5 * ((2.0 * b - 1.0) * p * p2 + (1.0 - b) * p1 * p1) * df[i] * df[i] +
             p * p1 * df[i] * ddf[i] + p * p * ddf[i] * ddf[i];
  }
  return out;
}

inline GridFunction gamma2_by_definition(const OperatorSpec& op, const GridFunction& f) {
  const GridFunction lf = apply_L(op, f);
  const GridFunction l_gamma = apply_L(op, gamma(op, f));
  const GridFunction cross = gamma(op, f, lf);
  GridFunction out = detail::like(f);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * l_gamma[i] - cross[i];
  return out;
}

// max |a''(b')^2 - (Gamma(b, Gamma(a, b)) - Gamma(a, Gamma(b)) / 2)| with Gamma(u, v) = u'v'.
inline double hessian_identity_check(const std::function<double(double)>& a,
                                     const std::function<double(double)>& b, const GridPtr& grid) {
  const GridFunction fa = sample(grid, a), fb = sample(grid, b);
  const Grid& g = *grid;
  const auto da = fd::d1(g, fa.values), db = fd::d1(g, fb.values), dda = fd::d2(g, fa.values);
  std::vector<double> gab(g.size()), gbb(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    gab[i] = da[i] * db[i];
    gbb[i] = db[i] * db[i];
  }
  const auto dgab = fd::d1(g, gab), dgbb = fd::d1(g, gbb);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double lhs = dda[i] * db[i] * db[i];
    const double rhs = db[i] * dgab[i] - 0.5 * da[i] * dgbb[i];
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

inline double hessian_identity_check(const std::function<double(double)>& a,
                                     const std::function<double(double)>& b) {
  return hessian_identity_check(a, b, Grid::uniform(2.0, 401));
}

}  // namespace cdflow
