#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "cdflow/errors.hpp"

namespace cdflow::tridiag {

// Symmetric tridiagonal matrix: diagonal d (n), off-diagonal e (n - 1).
struct Symmetric {
  std::vector<double> d, e;
  std::size_t size() const { return d.size(); }
};

// Twisted factorization of an SPD tridiagonal matrix: elimination runs from
// both ends toward the middle row k, so every sweep carries two independent
// recurrences. Reused across many right-hand sides.
class Factor {
 public:
  Factor() = default;
  explicit Factor(const Symmetric& t) : n_(t.size()), k_(t.size() > 0 ? (t.size() - 1) / 2 : 0) {
    require(n_ > 0, ErrorKind::InvalidArgument, "empty tridiagonal system");
    inv_.assign(n_, 0.0);
    bu_.assign(n_, 0.0);
    auto invert = [](double piv) {
      require(piv != 0.0 && std::isfinite(piv), ErrorKind::SolverStall, "zero pivot in tridiagonal factorization");
      return 1.0 / piv;
    };
    const auto& d = t.d;
    const auto& e = t.e;
    if (k_ > 0) {
      inv_[0] = invert(d[0]);
      bu_[0] = e[0] * inv_[0];
      for (std::size_t i = 1; i < k_; ++i) {
        inv_[i] = invert(d[i] - bu_[i - 1] * e[i - 1]);
        bu_[i] = e[i] * inv_[i];
      }
    }
    if (k_ + 1 < n_) {
      inv_[n_ - 1] = invert(d[n_ - 1]);
      bu_[n_ - 1] = e[n_ - 2] * inv_[n_ - 1];
      for (std::size_t i = n_ - 2; i > k_; --i) {
        inv_[i] = invert(d[i] - bu_[i + 1] * e[i]);
        bu_[i] = e[i - 1] * inv_[i];
      }
    }
    double gamma = d[k_];
    if (k_ > 0) gamma -= e[k_ - 1] * bu_[k_ - 1];
    if (k_ + 1 < n_) gamma -= e[k_] * bu_[k_ + 1];
    inv_[k_] = invert(gamma);
  }

  void solve_in_place(std::span<double> b) const {
    std::vector<double> work;
    sweep([&](std::size_t i) { return b[i]; }, [&](std::size_t i, double y) { b[i] = y; }, work);
  }

  // f <- a T^{-1} (m .* f) - c f.
  void scaled_update(std::span<const double> m, std::span<double> f, double a, double c,
                     std::vector<double>& work) const {
    sweep([&](std::size_t i) { return m[i] * f[i]; }, [&](std::size_t i, double y) { f[i] = a * y - c * f[i]; },
          work);
  }

 private:
  // rhs(i) is read for every i before out(i, x_i) is called for any i.
  template <class Rhs, class Out>
  void sweep(Rhs rhs, Out out, std::vector<double>& z) const {
    const std::size_t n = n_, k = k_;
    const std::size_t top = k, bot = n - 1 - k;
    const std::size_t both = std::min(top, bot);
    z.resize(n);
    if (top > 0) z[0] = rhs(0);
    if (bot > 0) z[n - 1] = rhs(n - 1);
    for (std::size_t j = 1; j < both; ++j) {
      const std::size_t i = j, r = n - 1 - j;
      z[i] = rhs(i) - bu_[i - 1] * z[i - 1];
      z[r] = rhs(r) - bu_[r + 1] * z[r + 1];
    }
    for (std::size_t j = std::max<std::size_t>(both, 1); j < top; ++j) z[j] = rhs(j) - bu_[j - 1] * z[j - 1];
    for (std::size_t j = std::max<std::size_t>(both, 1); j < bot; ++j) {
      const std::size_t r = n - 1 - j;
      z[r] = rhs(r) - bu_[r + 1] * z[r + 1];
    }
    double xk = rhs(k);
    if (top > 0) xk -= bu_[k - 1] * z[k - 1];
    if (bot > 0) xk -= bu_[k + 1] * z[k + 1];
    xk *= inv_[k];
    out(k, xk);
    double yt = xk, yb = xk;
    for (std::size_t j = 1; j <= both; ++j) {
      const std::size_t i = k - j, r = k + j;
      yt = z[i] * inv_[i] - bu_[i] * yt;
      yb = z[r] * inv_[r] - bu_[r] * yb;
      out(i, yt);
      out(r, yb);
    }
    for (std::size_t j = both + 1; j <= top; ++j) {
      yt = z[k - j] * inv_[k - j] - bu_[k - j] * yt;
      out(k - j, yt);
    }
    for (std::size_t j = both + 1; j <= bot; ++j) {
      yb = z[k + j] * inv_[k + j] - bu_[k + j] * yb;
      out(k + j, yb);
    }
  }

  std::size_t n_ = 0, k_ = 0;
  std::vector<double> inv_, bu_;  // bu_[i] = e_i / piv_i above k, e_{i-1} / piv_i below
};

// Number of eigenvalues strictly below lambda (Sturm sequence).
inline std::size_t count_below(const Symmetric& t, double lambda) {
  const double tiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = t.d[0] - lambda;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs(q) < tiny) q = -tiny;
    q = t.d[i] - lambda - t.e[i - 1] * t.e[i - 1] / q;
    if (q < 0.0) ++count;
  }
  return count;
}

inline std::pair<double, double> gershgorin(const Symmetric& t) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.e[i - 1]);
    if (i + 1 < t.size()) r += std::abs(t.e[i]);
    lo = std::min(lo, t.d[i] - r);
    hi = std::max(hi, t.d[i] + r);
  }
  return {lo, hi};
}

// k-th smallest eigenvalue (0-based) by bisection.
inline double eigenvalue(const Symmetric& t, std::size_t k, double rel_tol = 1e-15) {
  auto [lo, hi] = gershgorin(t);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi)) || mid == lo || mid == hi) break;
    (count_below(t, mid) > k ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Partial-pivot LU of (T - sigma I), kept for repeated solves.
class ShiftedLU {
 public:
  ShiftedLU(const Symmetric& t, double sigma) {
    const std::size_t n = t.size();
    u0_.resize(n);
    u1_.assign(n, 0.0);
    u2_.assign(n, 0.0);
    l_.assign(n, 0.0);
    swap_.assign(n, false);
    double scale = 0.0;
    for (double v : t.d) scale = std::max(scale, std::abs(v));
    const double floor = std::max(scale, 1.0) * std::numeric_limits<double>::epsilon();
    // Current row candidates: (a, b, c) at columns (i, i+1, i+2).
    double a = t.d[0] - sigma;
    double b = n > 1 ? t.e[0] : 0.0;
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double sub = t.e[i];
      const double next_d = t.d[i + 1] - sigma;
      const double next_e = i + 2 < n ? t.e[i + 1] : 0.0;
      if (std::abs(sub) > std::abs(a)) {
        swap_[i] = true;
        u0_[i] = sub;
        u1_[i] = next_d;
        u2_[i] = next_e;
        const double m = a / sub;
        l_[i] = m;
        a = b - m * next_d;
        b = c - m * next_e;
      } else {
        if (std::abs(a) < floor) a = floor;
        u0_[i] = a;
        u1_[i] = b;
        u2_[i] = c;
        const double m = sub / a;
        l_[i] = m;
        a = next_d - m * b;
        b = next_e - m * c;
      }
      c = 0.0;
    }
    if (std::abs(a) < floor) a = floor;
    u0_[n - 1] = a;
  }

  void solve_in_place(std::span<double> x) const {
    const std::size_t n = u0_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swap_[i]) std::swap(x[i], x[i + 1]);
      x[i + 1] -= l_[i] * x[i];
    }
    for (std::size_t i = n; i-- > 0;) {
      double v = x[i];
      if (i + 1 < n) v -= u1_[i] * x[i + 1];
      if (i + 2 < n) v -= u2_[i] * x[i + 2];
      x[i] = v / u0_[i];
    }
  }

 private:
  std::vector<double> u0_, u1_, u2_, l_;
  std::vector<bool> swap_;
};

inline void matvec(const Symmetric& t, std::span<const double> x, std::span<double> y) {
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = t.d[i] * x[i];
    if (i > 0) v += t.e[i - 1] * x[i - 1];
    if (i + 1 < n) v += t.e[i] * x[i + 1];
    y[i] = v;
  }
}

}  // namespace cdflow::tridiag
