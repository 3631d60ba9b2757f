#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cdflow/errors.hpp"
#include "cdflow/operator.hpp"
#include "cdflow/polynomial.hpp"

namespace cdflow {

enum class CertStatus { certified, violated };
enum class CertMethod { closed_form, grid_scan };

inline std::string to_string(CertStatus s) { return s == CertStatus::certified ? "certified" : "violated"; }
inline std::string to_string(CertMethod m) { return m == CertMethod::closed_form ? "closed-form" : "grid-scan"; }

struct CDCertificate {
  double rho = 0.0;
  double n = 0.0;
  CertStatus status = CertStatus::violated;
  double min_slack = 0.0;
  double argmin_x = 0.0;
  CertMethod method = CertMethod::grid_scan;
  bool at_infinity = false;  // minimum is the x -> infinity limit
};

struct CertifyOptions {
  double slack_tol = 1e-9;
  bool force_grid_scan = false;
};

// Coefficient of phi'^2/phi in the one-dimensional criterion.
inline double cd_k(double beta, double n) {
  const double b = beta - 0.5;
  return b * (b / (n - 1.0) + 0.5);
}

namespace detail {

struct SlackParts {
  Polynomial grad2, curv, phi;  // phi'^2, phi phi'', phi
};

inline SlackParts slack_parts(const WeightFunction& w) {
  const Polynomial& p = w.polynomial();
  const Polynomial d = p.derivative();
  return {d * d, p * d.derivative(), p};
}

// slack * phi = -k phi'^2 + (beta - 1/2) phi phi'' - rho phi
inline Polynomial slack_numerator(const SlackParts& s, double beta, double rho, double n) {
  return (-cd_k(beta, n)) * s.grad2 + (beta - 0.5) * s.curv + (-rho) * s.phi;
}

struct SlackMin {
  double value;
  double x;
  bool at_infinity;
};

inline double slack_limit(const SlackParts& s, double beta, double rho, double n) {
  const double k = cd_k(beta, n), b = beta - 0.5;
  const int deg_phi = s.phi.degree();
  const int top = std::max({s.grad2.degree(), s.curv.degree(), s.phi.degree()});
  for (int j = top; j >= 0; --j) {
    const auto u = static_cast<std::size_t>(j);
    const double a = -k * s.grad2.coefficient(u), c = b * s.curv.coefficient(u), r = -rho * s.phi.coefficient(u);
    const double coef = a + c + r;
    const double scale = std::abs(a) + std::abs(c) + std::abs(r);
    if (std::abs(coef) <= 1e-12 * scale || coef == 0.0) continue;
    if (j > deg_phi) return coef > 0.0 ? std::numeric_limits<double>::infinity()
                                       : -std::numeric_limits<double>::infinity();
    if (j == deg_phi) return coef / s.phi.leading();
    return 0.0;
  }
  return 0.0;
}

inline SlackMin scan_slack(const SlackParts& s, const Grid& g, double beta, double rho, double n) {
  const Polynomial num = slack_numerator(s, beta, rho, n);
  auto slack = [&](double x) { return num(x) / s.phi(x); };
  const auto x = g.nodes();
  std::size_t best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = slack(x[i]);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  double best_x = x[best];
  // Golden-section polish between the neighbouring nodes.
  double lo = x[best > 0 ? best - 1 : 0], hi = x[std::min(best + 1, x.size() - 1)];
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = slack(c), fd = slack(d);
  for (int it = 0; it < 80 && hi - lo > 1e-14 * (1.0 + std::abs(best_x)); ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = slack(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = slack(d);
    }
  }
  if (fc < best_v) {
    best_v = fc;
    best_x = c;
  }
  if (fd < best_v) {
    best_v = fd;
    best_x = d;
  }
  const double lim = slack_limit(s, beta, rho, n);
  if (lim < best_v) return {lim, g.half_width(), true};
  return {best_v, best_x, false};
}

// phi = c0 + c2 x^2: slack = 2 c2 (beta - 1/2) - rho - 4 k c2 t with t = c2 x^2 / phi in [0, 1).
inline SlackMin quadratic_slack(const WeightFunction& w, double R, double beta, double rho, double n) {
  const double c2 = w.polynomial().coefficient(2);
  const double at0 = 2.0 * c2 * (beta - 0.5) - rho;
  const double at_inf = at0 - 4.0 * cd_k(beta, n) * c2;
  if (at_inf < at0) return {at_inf, R, true};
  return {at0, 0.0, false};
}

}  // namespace detail

inline double cd_slack(const OperatorSpec& op, double rho, double n, double x) {
  require_dimension(n);
  const auto parts = detail::slack_parts(op.w);
  return detail::slack_numerator(parts, op.beta, rho, n)(x) / op.w.eval(x);
}

// x -> infinity limit of cd_slack, from leading coefficients.
inline double cd_slack_limit(const OperatorSpec& op, double rho, double n) {
  require_dimension(n);
  return detail::slack_limit(detail::slack_parts(op.w), op.beta, rho, n);
}

// Tensorial criterion in dimension one with Ric = 0, scalar form.
inline double conformal_criterion_slack(const OperatorSpec& op, double rho, double n, double x) {
  require_dimension(n);
  const double p = op.w.eval(x), p1 = op.w.d1(x), p2 = op.w.d2(x);
  const double b = op.beta;
  const double grad = p1 * p1 / (4.0 * p * p);
  return (b - 1.0) * p2 / p + (1.0 - (2.0 * b - 1.0) * (2.0 * b - 1.0) / (n - 1.0)) * grad +
         p2 / (2.0 * p) - 2.0 * b * grad - rho / p;
}

inline CDCertificate certify(const OperatorSpec& op, double rho, double n, const CertifyOptions& opt = {}) {
  require_dimension(n);
  require(rho >= 0.0 && std::isfinite(rho), ErrorKind::OutOfRange, "rho must be >= 0");
  CDCertificate cert;
  cert.rho = rho;
  cert.n = n;
  detail::SlackMin m{};
  if (op.w.degree() == 2 && !opt.force_grid_scan) {
    m = detail::quadratic_slack(op.w, op.grid().half_width(), op.beta, rho, n);
    cert.method = CertMethod::closed_form;
  } else {
    m = detail::scan_slack(detail::slack_parts(op.w), op.grid(), op.beta, rho, n);
    cert.method = CertMethod::grid_scan;
  }
  cert.min_slack = m.value;
  cert.argmin_x = m.x;
  cert.at_infinity = m.at_infinity;
  cert.status = m.value >= -opt.slack_tol ? CertStatus::certified : CertStatus::violated;
  return cert;
}

struct FrontierOptions {
  double rho_max = std::numeric_limits<double>::infinity();
  double n_min = -1e6;
  double n_max = 1e6;
  double eps_n = 1e-6;
  int coarse = 240;
  double rel_tol = 1e-8;
  bool force_grid_scan = false;
};

struct FrontierResult {
  double best_constant = 0.0;
  double rho_star = 0.0;
  double n_star = 0.0;
  CDCertificate certificate;
  CertMethod method = CertMethod::grid_scan;
};

// Largest rho certified at dimension n (before the box cap), i.e. min over x of slack at rho = 0.
inline double rho_max_at(const OperatorSpec& op, double n, bool force_grid_scan = false) {
  require_dimension(n);
  if (op.w.degree() == 2 && !force_grid_scan)
    return detail::quadratic_slack(op.w, op.grid().half_width(), op.beta, 0.0, n).value;
  return detail::scan_slack(detail::slack_parts(op.w), op.grid(), op.beta, 0.0, n).value;
}

inline FrontierResult frontier(const OperatorSpec& op, const FrontierOptions& opt = {}) {
  require(opt.n_min < -opt.eps_n || opt.n_max > 1.0 + opt.eps_n, ErrorKind::InvalidArgument,
          "n range lies inside the excluded band");
  FrontierResult res;
  const double c2 = op.w.polynomial().coefficient(2);
  if (op.w.degree() == 2 && !opt.force_grid_scan && op.beta > 0.5) {
    double rho, n;
    if (op.beta >= 1.5) {
      rho = c2 * (2.0 * op.beta - 1.0);
      n = 2.0 * (1.0 - op.beta);
    } else {
      rho = c2 * (2.0 * op.beta - 1.0) * (2.0 * op.beta - 1.0) / 2.0;
      n = -1.0;
    }
    if (rho <= opt.rho_max && n >= opt.n_min && n <= opt.n_max) {
      res.rho_star = rho;
      res.n_star = n;
      res.best_constant = rho * n / (n - 1.0);
      res.certificate = certify(op, rho, n);
      res.method = CertMethod::closed_form;
      return res;
    }
  }

  const bool scan = opt.force_grid_scan;
  auto value = [&](double n) {
    const double r = std::min(rho_max_at(op, n, scan), opt.rho_max);
    if (!(r > 0.0)) return -std::numeric_limits<double>::infinity();
    return r * n / (n - 1.0);
  };
  struct Side {
    double u_lo, u_hi;
    double (*to_n)(double);
  };
  std::vector<Side> sides;
  if (opt.n_min < -opt.eps_n)
    sides.push_back({std::log(opt.eps_n), std::log(-opt.n_min), [](double u) { return -std::exp(u); }});
  if (opt.n_max > 1.0 + opt.eps_n)
    sides.push_back({std::log(opt.eps_n), std::log(opt.n_max - 1.0), [](double u) { return 1.0 + std::exp(u); }});

  double best = -std::numeric_limits<double>::infinity(), best_n = 0.0;
  auto consider = [&](double n) {
    const double v = value(n);
    if (v > best) {
      best = v;
      best_n = n;
    }
  };
  for (const Side& s : sides) {
    const int m = std::max(opt.coarse, 3);
    std::vector<double> u(m), f(m);
    for (int i = 0; i < m; ++i) {
      u[i] = s.u_lo + (s.u_hi - s.u_lo) * i / (m - 1);
      f[i] = value(s.to_n(u[i]));
    }
    const int j = static_cast<int>(std::max_element(f.begin(), f.end()) - f.begin());
    if (!std::isfinite(f[j])) continue;
    consider(s.to_n(u[j]));
    double lo = u[std::max(j - 1, 0)], hi = u[std::min(j + 1, m - 1)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = value(s.to_n(c)), fd = value(s.to_n(d));
    for (int it = 0; it < 200 && hi - lo > opt.rel_tol * std::max(1.0, std::abs(lo)); ++it) {
      if (fc > fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - gr * (hi - lo);
        fc = value(s.to_n(c));
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + gr * (hi - lo);
        fd = value(s.to_n(d));
      }
    }
    consider(s.to_n(c));
    consider(s.to_n(d));
  }
  // Where the top coefficient of the slack numerator vanishes the asymptote
  // jumps from -infinity to finite; that endpoint is a candidate on its own.
  const int deg = op.w.degree();
  if (deg > 2 && op.beta > 0.5) {
    const double nb = 1.0 + deg * (2.0 * op.beta - 1.0) / (deg - 2.0);
    if (nb <= opt.n_max) consider(nb);
  }
  if (!std::isfinite(best)) fail(ErrorKind::NoFeasiblePair, "no certified (rho, n) with rho > 0 in the search box");

  res.n_star = best_n;
  res.rho_star = std::min(rho_max_at(op, best_n, scan), opt.rho_max);
  res.best_constant = res.rho_star * res.n_star / (res.n_star - 1.0);
  CertifyOptions copt;
  copt.force_grid_scan = scan;
  res.certificate = certify(op, res.rho_star, res.n_star, copt);
  res.method = res.certificate.method;
  return res;
}

}  // namespace cdflow
