#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "cdflow/discretization.hpp"
#include "cdflow/errors.hpp"
#include "cdflow/tridiagonal.hpp"

namespace cdflow {

enum class EntropyKind { variance, power, xlogx };

struct PhiEntropy {
  EntropyKind kind = EntropyKind::variance;
  double p = 2.0;

  static PhiEntropy variance() { return {EntropyKind::variance, 2.0}; }
  static PhiEntropy power(double p) {
    require(p > 1.0 && p <= 2.0, ErrorKind::OutOfRange, "power entropy needs p in (1, 2]");
    return {EntropyKind::power, p};
  }
  static PhiEntropy xlogx() { return {EntropyKind::xlogx, 1.0}; }

  bool nonlinear() const { return kind != EntropyKind::variance; }

  double phi(double x) const {
    switch (kind) {
      case EntropyKind::variance: return x * x;
      case EntropyKind::power: return std::pow(x, p);
      case EntropyKind::xlogx: return x * std::log(x);
    }
    return 0.0;
  }
  double d1(double x) const {
    switch (kind) {
      case EntropyKind::variance: return 2.0 * x;
      case EntropyKind::power: return p * std::pow(x, p - 1.0);
      case EntropyKind::xlogx: return std::log(x) + 1.0;
    }
    return 0.0;
  }
  double d2(double x) const {
    switch (kind) {
      case EntropyKind::variance: return 2.0;
      case EntropyKind::power: return p * (p - 1.0) * std::pow(x, p - 2.0);
      case EntropyKind::xlogx: return 1.0 / x;
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case EntropyKind::variance: return "variance";
      case EntropyKind::power: return "power";
      case EntropyKind::xlogx: return "xlogx";
    }
    return "variance";
  }
};

struct FlowConfig {
  std::shared_ptr<const DiscretizedOperator> dop;
  PhiEntropy entropy;
  double t_end = 2.0;
  double dt = 1e-4;
  int record_every = 100;
  GridFunction initial;
  double scheme_weight = 0.5;  // 1/2 is Crank-Nicolson, 1 is implicit Euler
  double floor = 1e-12;
  double tol = 1e-6;
  bool keep_states = false;
};

struct FlowTrace {
  std::vector<double> times, lambda, lambda1, lambda2, mass, psi;
  std::vector<double> residual_linear, residual_refined;
  std::vector<double> scale;  // |lambda2| + 2K|lambda1|, for relative residuals
  std::vector<std::vector<double>> states;
  double K = 0.0;
  double theta = 0.0;
  double psi_inf = 0.0;  // Phi(mass)
  std::size_t clamp_events = 0;
  bool diagnostic = false;
  PhiEntropy entropy;

  std::size_t size() const { return times.size(); }

  double min_relative(const std::vector<double>& r) const {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::min(worst, scale[i] > 0.0 ? r[i] / scale[i] : 0.0);
    return worst;
  }
};

namespace detail {

struct FlowEvaluator {
  const DiscretizedOperator& dop;
  const PhiEntropy& phi;
  double floor;
  std::size_t* clamps;

  double value(double f) const { return phi.nonlinear() ? std::max(f, floor) : f; }

  void check(std::span<const double> f) const {
    if (!phi.nonlinear()) return;
    for (double v : f) {
      if (!(v > 0.0)) fail(ErrorKind::PositivityLost, "f_t reached " + std::to_string(v));
      if (v < floor) ++*clamps;
    }
  }

  double mass(std::span<const double> f) const { return dop.integral(f); }

  double psi(std::span<const double> f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += dop.mass[i] * phi.phi(value(f[i]));
    return acc;
  }

  // Bregman form: int Phi(f) - Phi(m) - Phi'(m)(f - m) dmu.
  double lambda(std::span<const double> f, double m) const {
    const double pm = phi.phi(m), dm = phi.d1(m);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double v = value(f[i]);
      acc += dop.mass[i] * (phi.phi(v) - pm - dm * (v - m));
    }
    return std::max(acc, 0.0);
  }

  // -sum_e a_e (Phi'(f_{i+1}) - Phi'(f_i)) (f_{i+1} - f_i) = -int Phi''(f) Gamma(f) dmu.
  double lambda1(std::span<const double> f) const {
    const auto& a = dop.edge;
    double acc = 0.0;
    if (!phi.nonlinear()) {
      for (std::size_t e = 0; e < a.size(); ++e) {
        const double d = f[e + 1] - f[e];
        acc += a[e] * d * d;
      }
      return -2.0 * acc;
    }
    double prev = phi.d1(value(f[0]));
    for (std::size_t e = 0; e < a.size(); ++e) {
      const double next = phi.d1(value(f[e + 1]));
      acc += a[e] * (next - prev) * (f[e + 1] - f[e]);
      prev = next;
    }
    return -acc;
  }
};

}  // namespace detail

inline FlowTrace run_flow(const FlowConfig& cfg, double K, double theta) {
  require(cfg.dop != nullptr, ErrorKind::InvalidArgument, "flow needs a discretized operator");
  const DiscretizedOperator& dop = *cfg.dop;
  require(cfg.dt > 0.0 && std::isfinite(cfg.dt), ErrorKind::InvalidArgument, "dt must be positive");
  require(cfg.t_end > 0.0 && std::isfinite(cfg.t_end), ErrorKind::InvalidArgument, "t_end must be positive");
  require(cfg.record_every >= 1, ErrorKind::InvalidArgument, "record_every must be >= 1");
  require(cfg.scheme_weight >= 0.5 && cfg.scheme_weight <= 1.0, ErrorKind::InvalidArgument,
          "scheme weight must lie in [1/2, 1]");
  require(K > 0.0, ErrorKind::InvalidArgument, "K must be positive");
  require(theta >= 0.0, ErrorKind::InvalidArgument, "theta must be nonnegative");
  check_same_grid(cfg.initial, dop.grid());
  check_finite(cfg.initial);
  if (cfg.entropy.nonlinear())
    for (double v : cfg.initial.values)
      require(v > 0.0, ErrorKind::InvalidArgument, "initial data must be positive for this entropy");

  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
  require(steps >= 2, ErrorKind::InvalidArgument, "need at least two time steps");
  const std::size_t every = static_cast<std::size_t>(cfg.record_every);

  FlowTrace tr;
  tr.K = K;
  tr.theta = theta;
  tr.entropy = cfg.entropy;
  detail::FlowEvaluator ev{dop, cfg.entropy, cfg.floor, &tr.clamp_events};

  std::vector<char> recorded(steps + 1, 0), needs_l1(steps + 1, 0);
  for (std::size_t s = 0; s <= steps; s += every) recorded[s] = 1;
  recorded[steps] = 1;
  for (std::size_t s = 0; s <= steps; ++s) {
    if (!recorded[s]) continue;
    if (s == 0) {
      needs_l1[0] = needs_l1[1] = needs_l1[2] = 1;
    } else if (s == steps) {
      needs_l1[s] = needs_l1[s - 1] = needs_l1[s - 2] = 1;
    } else {
      needs_l1[s - 1] = needs_l1[s] = needs_l1[s + 1] = 1;
    }
  }
  std::vector<double> l1(steps + 1, std::numeric_limits<double>::quiet_NaN());

  const double w = cfg.scheme_weight;
  tridiag::Symmetric lhs = dop.stiffness();
  for (std::size_t i = 0; i < lhs.size(); ++i) lhs.d[i] = dop.mass[i] + w * cfg.dt * lhs.d[i];
  for (double& e : lhs.e) e *= w * cfg.dt;
  const tridiag::Factor factor(lhs);

  std::vector<double> f = cfg.initial.values;
  const double mass0 = ev.mass(f);
  tr.psi_inf = cfg.entropy.phi(mass0);
  double last_lambda = std::numeric_limits<double>::infinity();
  double noise = 0.0;  // cancellation level of the Bregman sum

  auto record = [&](std::size_t s) {
    const double m = ev.mass(f);
    const double lam = ev.lambda(f, m);
    const double psi = ev.psi(f);
    if (s == 0) noise = 1e-13 * std::abs(psi);
    if (lam > last_lambda * (1.0 + cfg.tol) + noise)
      fail(ErrorKind::StepRejected, "entropy increased at t = " + std::to_string(s * cfg.dt));
    last_lambda = lam;
    tr.times.push_back(static_cast<double>(s) * cfg.dt);
    tr.mass.push_back(m);
    tr.lambda.push_back(lam);
    tr.psi.push_back(psi);
    if (cfg.keep_states) tr.states.push_back(f);
  };

  ev.check(f);
  l1[0] = ev.lambda1(f);
  record(0);
  // (M - (1 - w) dt A) = M / w - ((1 - w) / w)(M + w dt A)
  std::vector<double> work;
  const double a = 1.0 / w, c = (1.0 - w) / w;
  for (std::size_t s = 1; s <= steps; ++s) {
    factor.scaled_update(dop.mass, f, a, c, work);
    ev.check(f);
    if (needs_l1[s]) l1[s] = ev.lambda1(f);
    if (recorded[s]) record(s);
  }

  const double h = cfg.dt;
  std::size_t idx = 0;
  for (std::size_t s = 0; s <= steps; ++s) {
    if (!recorded[s]) continue;
    double d2;
    if (s == 0)
      d2 = (-3.0 * l1[0] + 4.0 * l1[1] - l1[2]) / (2.0 * h);
    else if (s == steps)
      d2 = (3.0 * l1[s] - 4.0 * l1[s - 1] + l1[s - 2]) / (2.0 * h);
    else
      d2 = (l1[s + 1] - l1[s - 1]) / (2.0 * h);
    const double d1 = l1[s];
    tr.lambda1.push_back(d1);
    tr.lambda2.push_back(d2);
    const double lin = d2 + 2.0 * K * d1;
    tr.residual_linear.push_back(lin);
    const double psi = tr.psi[idx];
    tr.residual_refined.push_back(psi > 0.0 ? lin - theta * d1 * d1 / psi : lin);
    tr.scale.push_back(std::abs(d2) + 2.0 * K * std::abs(d1));
    ++idx;
  }
  tr.diagnostic = tr.clamp_events > 0;
  return tr;
}

inline bool decay_certificate(const FlowTrace& tr, double K, double tol = 1e-6) {
  if (tr.size() == 0) return true;
  const double floor = 1e-13 * std::max(std::abs(tr.psi.front()), 1e-300);
  const double l0 = tr.lambda.front(), d0 = -tr.lambda1.front();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double decay = std::exp(-2.0 * K * tr.times[i]) * (1.0 + tol);
    if (tr.lambda[i] > l0 * decay + floor) return false;
    if (-tr.lambda1[i] > d0 * decay + floor * K) return false;
  }
  return true;
}

namespace detail {

// (Psi^{1-theta} - Psi_inf^{1-theta}) / (1 - theta), log(Psi / Psi_inf) at theta = 1,
// written through Psi = Psi_inf + Lambda to avoid cancellation.
inline double refined_energy(double lambda, double psi_inf, double theta) {
  if (theta == 0.0) return lambda;
  const double r = std::log1p(lambda / psi_inf);
  if (theta == 1.0) return r;
  return std::pow(psi_inf, 1.0 - theta) * std::expm1((1.0 - theta) * r) / (1.0 - theta);
}

}  // namespace detail

// Checks, at every recorded time,
//   -Lambda'(t) / Psi(t)^theta <= -Lambda'(0) / Psi(0)^theta e^{-2Kt}   and
//   E_theta(t) <= E_theta(0) e^{-2Kt},
// with Psi = int Phi(f_t) and E_theta the refined-Beckner energy. At theta = 0
// this is decay_certificate.
inline bool refined_decay_certificate(const FlowTrace& tr, double K, double theta, double tol = 1e-6) {
  require(theta >= 0.0, ErrorKind::InvalidArgument, "theta must be nonnegative");
  if (theta == 0.0) return decay_certificate(tr, K, tol);
  if (tr.size() == 0) return true;
  require(tr.psi_inf > 0.0, ErrorKind::Degenerate, "refined certificate needs a positive equilibrium entropy");
  const double floor = 1e-13 * std::max(std::abs(tr.psi.front()), 1e-300);
  const double e0 = detail::refined_energy(tr.lambda.front(), tr.psi_inf, theta);
  const double g0 = -tr.lambda1.front() / std::pow(tr.psi.front(), theta);
  const double efloor = detail::refined_energy(floor, tr.psi_inf, theta);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (tr.lambda[i] <= floor) break;  // equilibrium reached; nothing left to check
    const double decay = std::exp(-2.0 * K * tr.times[i]) * (1.0 + tol);
    const double g = -tr.lambda1[i] / std::pow(tr.psi[i], theta);
    if (g > g0 * decay + floor * K / std::pow(tr.psi[i], theta)) return false;
    if (detail::refined_energy(tr.lambda[i], tr.psi_inf, theta) > e0 * decay + efloor) return false;
  }
  return true;
}

}  // namespace cdflow
