#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cdflow/constants.hpp"
#include "cdflow/discretization.hpp"
#include "cdflow/errors.hpp"
#include "cdflow/parallel.hpp"
#include "cdflow/random_fields.hpp"
#include "cdflow/tridiagonal.hpp"

namespace cdflow {

struct GapReport {
  double gap = 0.0;
  double bisection = 0.0;  // Sturm bisection value before inverse iteration
  std::optional<double> predicted;
  std::optional<double> rel_error;
  GridFunction eigenvector;
  int sign_changes = 0;
  int iterations = 0;
  double orthogonality = 0.0;  // |<v, 1>_M|
};

// Sharp rate expected for the operator: C_beta for quadratic phi (scaled by
// its x^2 coefficient), c (beta - 1) otherwise when beta > 1.
inline std::optional<double> predicted_gap(const OperatorSpec& op) {
  if (op.w.degree() == 2 && op.beta > 0.5) return op.w.polynomial().coefficient(2) * c_beta(op.beta);
  if (op.beta > 1.0) return op.w.convexity() * (op.beta - 1.0);
  return std::nullopt;
}

inline GapReport spectral_gap(const DiscretizedOperator& dop, bool weighted = true) {
  const std::size_t n = dop.size();
  const tridiag::Symmetric s = dop.symmetrized(weighted);
  GapReport rep;
  rep.bisection = tridiag::eigenvalue(s, 1);
  const tridiag::ShiftedLU lu(s, rep.bisection);

  std::vector<double> root(n);
  double root_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    root[i] = std::sqrt(dop.mass[i]);
    root_norm += dop.mass[i];
  }
  root_norm = std::sqrt(root_norm);
  for (double& r : root) r /= root_norm;
  auto deflate_normalize = [&](std::vector<double>& v) {
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += v[i] * root[i];
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] -= dot * root[i];
      norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    require(norm > 0.0 && std::isfinite(norm), ErrorKind::SolverStall, "inverse iteration collapsed");
    for (double& x : v) x /= norm;
  };

  const auto x = dop.grid().nodes();
  std::vector<double> v(n), prev;
  for (std::size_t i = 0; i < n; ++i) v[i] = root[i] * std::tanh(x[i]);
  deflate_normalize(v);
  bool converged = false;
  for (int it = 1; it <= 200; ++it) {
    prev = v;
    lu.solve_in_place(v);
    deflate_normalize(v);
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += v[i] * prev[i];
    if (dot < 0.0)
      for (double& a : v) a = -a;
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(v[i] - prev[i]));
    rep.iterations = it;
    if (diff < 1e-12) {
      converged = true;
      break;
    }
  }
  if (!converged) fail(ErrorKind::SolverStall, "inverse iteration did not converge in 200 steps");

  GridFunction f{dop.grid_ptr(), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) f[i] = v[i] / std::sqrt(dop.mass[i]);
  const double mean = dop.integral(f.values);
  for (double& a : f.values) a -= mean;
  const double norm = std::sqrt(dop.mass_product(f.values, f.values));
  for (double& a : f.values) a /= norm;
  if (f.values.back() < f.values.front())
    for (double& a : f.values) a = -a;
  rep.gap = dop.energy(f.values, weighted);
  rep.orthogonality = std::abs(dop.integral(f.values));

  double peak = 0.0;
  for (double a : f.values) peak = std::max(peak, std::abs(a));
  int sign = 0;
  for (double a : f.values) {
    if (std::abs(a) <= 1e-8 * peak) continue;
    const int sg = a > 0.0 ? 1 : -1;
    if (sign != 0 && sg != sign) ++rep.sign_changes;
    sign = sg;
  }
  rep.eigenvector = std::move(f);
  if (weighted) {
    rep.predicted = predicted_gap(dop.op);
    if (rep.predicted) rep.rel_error = std::abs(rep.gap - *rep.predicted) / *rep.predicted;
  }
  return rep;
}

namespace detail {

struct BecknerParts {
  double energy;   // int Gamma(f) dmu (weighted or flat)
  double l2;       // int f^2
  double bracket;  // int f^2 - (int f^{2/p})^p
};

// (1+g)^a - 1 - a g without cancellation for small g.
inline double pow_remainder(double a, double g) {
  if (std::abs(g) < 1e-3) {
    double term = a * (a - 1.0) / 2.0 * g * g, acc = 0.0;
    for (int k = 2; k < 8 && term != 0.0; ++k) {
      acc += term;
      term *= (a - k) / (k + 1) * g;
    }
    return acc;
  }
  return std::expm1(a * std::log1p(g)) - a * g;
}

// Brackets are formed around the mean f/c - 1 with the mass normalized to one, so nearly flat f keeps its digits.
inline BecknerParts beckner_parts(const DiscretizedOperator& dop, double p, std::span<const double> f,
                                  bool weighted) {
  require(p > 1.0 && p <= 2.0, ErrorKind::OutOfRange, "p must lie in (1, 2]");
  require(f.size() == dop.size(), ErrorKind::ShapeMismatch, "test function has the wrong length");
  BecknerParts out{dop.energy(f, weighted), 0.0, 0.0};
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    require(p == 2.0 || f[i] >= 0.0, ErrorKind::InvalidArgument, "Beckner quotient needs f >= 0 for p < 2");
    out.l2 += dop.mass[i] * f[i] * f[i];
    total += dop.mass[i];
  }
  const double c = dop.integral(f) / total;
  if (c == 0.0) {
    out.bracket = out.l2;
  } else {
    const double a = 2.0 / p;
    double G = 0.0, Q = 0.0, B = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double g = f[i] / c - 1.0, w = dop.mass[i] / total;
      G += w * g;
      Q += w * g * g;
      if (p != 2.0) B += w * pow_remainder(a, g);
    }
    const double rest = p == 2.0 ? Q - G * G : 2.0 * G + Q - std::expm1(p * std::log1p(a * G + B));
    out.bracket = total * c * c * rest;
  }
  if (!(out.bracket > 1e-14 * out.l2))
    fail(ErrorKind::DegenerateDenominator, "Beckner bracket vanishes (f is constant)");
  return out;
}

inline double refined_lhs(const BecknerParts& b, double p, double theta) {
  const double ratio_log = std::log1p(-b.bracket / b.l2);  // log((int f^{2/p})^p / int f^2)
  const double pref = p / (p - 1.0);
  if (theta == 0.0) return pref * b.bracket;
  if (theta == 1.0) return -pref * b.l2 * ratio_log;
  return -pref * b.l2 * std::expm1((1.0 - theta) * ratio_log) / (1.0 - theta);
}

}  // namespace detail

inline double beckner_quotient(const DiscretizedOperator& dop, double p, std::span<const double> f,
                               bool weighted = true) {
  const auto b = detail::beckner_parts(dop, p, f, weighted);
  return 2.0 * b.energy / (p / (p - 1.0) * b.bracket);
}

inline double beckner_quotient(const DiscretizedOperator& dop, double p, const GridFunction& f,
                               bool weighted = true) {
  check_same_grid(f, dop.grid());
  return beckner_quotient(dop, p, std::span<const double>(f.values), weighted);
}

// 2 int Gamma(f) over the refined left-hand side; B*_p(C, theta) holds for f iff this is >= 1/C.
inline double refined_beckner_quotient(const DiscretizedOperator& dop, double p, double theta,
                                       std::span<const double> f, bool weighted = true) {
  require(theta >= 0.0, ErrorKind::InvalidArgument, "theta must be nonnegative");
  const auto b = detail::beckner_parts(dop, p, f, weighted);
  return 2.0 * b.energy / detail::refined_lhs(b, p, theta);
}

// Left-hand side of B_p without the 2C factor, p -> 1 form excluded.
inline double beckner_lhs(const DiscretizedOperator& dop, double p, std::span<const double> f) {
  const auto b = detail::beckner_parts(dop, p, f, true);
  return p / (p - 1.0) * b.bracket;
}

// int f^2 log(f^2 / int f^2) dmu
inline double entropy_of_square(const DiscretizedOperator& dop, std::span<const double> f) {
  double l2 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) l2 += dop.mass[i] * f[i] * f[i];
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double s = f[i] * f[i];
    if (s > 0.0) acc += dop.mass[i] * s * std::log(s / l2);
  }
  return acc;
}

// [int Phi''(f) Gamma(f) phi dmu] / [2 Ent^Phi(f)] with Phi = x^p.
inline double phi_entropy_quotient(const DiscretizedOperator& dop, double p, std::span<const double> f) {
  require(p > 1.0 && p <= 2.0, ErrorKind::OutOfRange, "p must lie in (1, 2]");
  require(f.size() == dop.size(), ErrorKind::ShapeMismatch, "test function has the wrong length");
  for (double v : f) require(v > 0.0, ErrorKind::InvalidArgument, "f must be strictly positive");
  double total = 0.0;
  for (double w : dop.mass) total += w;
  const double m = dop.integral(f) / total;
  double ent = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double g = f[i] / m - 1.0;
    ent += dop.mass[i] * (p == 2.0 ? g * g : detail::pow_remainder(p, g));
  }
  ent *= std::pow(m, p);
  double l1 = 0.0;
  if (p == 2.0) {
    l1 = 2.0 * dop.energy(f);
  } else {
    const auto& a = dop.edge;
    double prev = p * std::pow(f[0], p - 1.0);
    for (std::size_t e = 0; e < a.size(); ++e) {
      const double next = p * std::pow(f[e + 1], p - 1.0);
      l1 += a[e] * (next - prev) * (f[e + 1] - f[e]);
      prev = next;
    }
  }
  double psi = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) psi += dop.mass[i] * std::pow(f[i], p);
  if (!(ent > 1e-14 * psi))
    fail(ErrorKind::DegenerateDenominator, "Phi-entropy vanishes (f is constant)");
  return l1 / (2.0 * ent);
}

inline double phi_entropy_quotient(const DiscretizedOperator& dop, double p, const GridFunction& f) {
  check_same_grid(f, dop.grid());
  return phi_entropy_quotient(dop, p, std::span<const double>(f.values));
}

enum class ConstantSource { weighted, cd };

inline std::string to_string(ConstantSource s) { return s == ConstantSource::weighted ? "weighted" : "cd"; }

struct FalsifierOptions {
  double tol_q = 1e-4;
  std::optional<double> theta;  // also test B*_p(C, theta)
  ConstantSource source = ConstantSource::weighted;
  FieldOptions field;
  int max_redraws = 100;
};

struct BecknerReport {
  double p = 2.0;
  double theoretical_C = 0.0;
  ConstantSource source = ConstantSource::weighted;
  bool weighted = true;
  double worst_quotient = std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  GridFunction extremal_candidate;
  std::size_t trials = 0;
  std::size_t redraws = 0;
  std::uint64_t seed = 0;
  double tol_q = 1e-4;
  std::vector<double> quotients;
  std::optional<double> theta;
  std::vector<double> refined_quotients;
  std::size_t refined_violations = 0;
  double worst_refined_quotient = std::numeric_limits<double>::infinity();
  std::size_t monotone_failures = 0;  // refined LHS below the plain LHS
};

inline BecknerReport randomized_falsifier(const DiscretizedOperator& dop, double p, double C, std::size_t trials,
                                          std::uint64_t seed, bool weighted = true,
                                          const FalsifierOptions& opt = {}) {
  require(p > 1.0 && p <= 2.0, ErrorKind::OutOfRange, "p must lie in (1, 2]");
  require(C > 0.0, ErrorKind::InvalidArgument, "C must be positive");
  require(trials >= 1, ErrorKind::InvalidArgument, "trials must be >= 1");
  struct Trial {
    double q = 0.0, qr = 0.0;
    bool monotone_ok = true;
    std::size_t redraws = 0;
    std::uint64_t draw_seed = 0;
  };
  std::vector<Trial> out(trials);
  const auto grid = dop.grid_ptr();
  parallel_for(trials, [&](std::size_t i) {
    Trial& t = out[i];
    std::uint64_t s = trial_seed(seed, i);
    for (int attempt = 0;; ++attempt) {
      const GridFunction f = random_positive_function(grid, s, opt.field);
      try {
        const auto b = detail::beckner_parts(dop, p, f.values, weighted);
        const double lhs = p / (p - 1.0) * b.bracket;
        t.q = 2.0 * b.energy / lhs;
        if (opt.theta) {
          const double rl = detail::refined_lhs(b, p, *opt.theta);
          t.qr = 2.0 * b.energy / rl;
          t.monotone_ok = rl >= lhs * (1.0 - 1e-12);
        }
        t.draw_seed = s;
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateDenominator || attempt >= opt.max_redraws) throw;
        ++t.redraws;
        s = splitmix64(s);
      }
    }
  });

  BecknerReport rep;
  rep.p = p;
  rep.theoretical_C = C;
  rep.source = opt.source;
  rep.weighted = weighted;
  rep.trials = trials;
  rep.seed = seed;
  rep.tol_q = opt.tol_q;
  rep.theta = opt.theta;
  const double threshold = (1.0 / C) * (1.0 - opt.tol_q);
  std::size_t worst = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Trial& t = out[i];
    rep.quotients.push_back(t.q);
    rep.redraws += t.redraws;
    if (t.q < threshold) ++rep.violations;
    if (t.q < rep.worst_quotient) {
      rep.worst_quotient = t.q;
      worst = i;
    }
    if (opt.theta) {
      rep.refined_quotients.push_back(t.qr);
      if (t.qr < threshold) ++rep.refined_violations;
      rep.worst_refined_quotient = std::min(rep.worst_refined_quotient, t.qr);
      if (!t.monotone_ok) ++rep.monotone_failures;
    }
  }
  rep.extremal_candidate = random_positive_function(grid, out[worst].draw_seed, opt.field);
  return rep;
}

struct MinimizerResult {
  double inf_quotient = std::numeric_limits<double>::infinity();
  GridFunction f_min;
  std::vector<double> start_values;    // best value reached from each start
  std::vector<bool> start_downgraded;  // line search failed on that start
};

namespace detail {

// Quotient and its Euclidean gradient.
inline double quotient_with_gradient(const DiscretizedOperator& dop, double p, std::span<const double> f,
                                     bool weighted, std::vector<double>* grad) {
  const auto b = beckner_parts(dop, p, f, weighted);
  const double pref = p / (p - 1.0);
  const double den = pref * b.bracket;
  const double q = 2.0 * b.energy / den;
  if (grad) {
    const std::size_t n = f.size();
    const std::vector<double> af = dop.apply_A(f, weighted);
    grad->assign(n, 0.0);
    double ip = 0.0, mean = 0.0;
    if (p == 2.0) {
      mean = dop.integral(f);
    } else {
      for (std::size_t i = 0; i < n; ++i) ip += dop.mass[i] * std::pow(f[i], 2.0 / p);
    }
    const double ipp = std::pow(ip, p - 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double dden =
          p == 2.0 ? pref * 2.0 * dop.mass[i] * (f[i] - mean)
                   : pref * 2.0 * dop.mass[i] * (f[i] - ipp * std::pow(std::max(f[i], 1e-300), 2.0 / p - 1.0));
      (*grad)[i] = (4.0 * af[i] - q * dden) / den;
    }
  }
  return q;
}

}  // namespace detail

inline MinimizerResult quotient_minimizer(const DiscretizedOperator& dop, double p, bool weighted, int iters,
                                          std::uint64_t seed = 0) {
  require(p > 1.0 && p <= 2.0, ErrorKind::OutOfRange, "p must lie in (1, 2]");
  require(iters >= 0, ErrorKind::InvalidArgument, "iters must be >= 0");
  const auto grid = dop.grid_ptr();
  const std::size_t n = dop.size();
  const double R = dop.grid().half_width();

  std::vector<std::vector<double>> starts;
  starts.push_back(sample(grid, [R](double x) { return x + R + 1.0; }).values);
  starts.push_back(sample(grid, [](double x) { return 1.0 + std::exp(-0.5 * x * x); }).values);
  for (std::uint64_t k = 0; k < 3; ++k) starts.push_back(random_positive_function(grid, trial_seed(seed, k)).values);

  MinimizerResult res;
  for (auto& f : starts) {
    bool downgraded = false;
    auto normalize = [&](std::vector<double>& g) {
      const double s = std::sqrt(dop.mass_product(g, g));
      for (double& v : g) v /= s;
    };
    normalize(f);
    std::vector<double> grad, trial(n);
    double q = detail::quotient_with_gradient(dop, p, f, weighted, &grad);
    int stagnant = 0;
    for (int it = 0; it < iters; ++it) {
      // Preconditioned direction: -(A + q M)^{-1} grad.
      tridiag::Symmetric pre = dop.stiffness(weighted);
      for (std::size_t i = 0; i < n; ++i) pre.d[i] += q * dop.mass[i];
      const tridiag::Factor fac(pre);
      std::vector<double> dir = grad;
      fac.solve_in_place(dir);
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dir[i] = -dir[i];
        slope += grad[i] * dir[i];
      }
      if (!(slope < 0.0)) break;
      double fmax = 0.0;
      for (double v : f) fmax = std::max(fmax, std::abs(v));
      const double floor = p < 2.0 ? 1e-8 * fmax : -std::numeric_limits<double>::infinity();
      double step = 1.0, q_new = q;
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls, step *= 0.5) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = std::max(f[i] + step * dir[i], floor);
        try {
          q_new = detail::quotient_with_gradient(dop, p, trial, weighted, nullptr);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::DegenerateDenominator) throw;
          continue;
        }
        if (q_new <= q + 1e-4 * step * slope) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        downgraded = true;
        break;
      }
      const double rel = (q - q_new) / q;
      f.swap(trial);
      normalize(f);
      q = detail::quotient_with_gradient(dop, p, f, weighted, &grad);
      stagnant = rel < 1e-12 ? stagnant + 1 : 0;
      if (stagnant >= 5) break;
    }
    res.start_values.push_back(q);
    res.start_downgraded.push_back(downgraded);
    if (q < res.inf_quotient) {
      res.inf_quotient = q;
      res.f_min = GridFunction{grid, f};
    }
  }
  return res;
}

}  // namespace cdflow
