#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace cdflow {

// Dense real polynomial, coefficients in increasing powers of x.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) { trim(); }
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

  // Builds sum_k even[k] * x^(2k).
  static Polynomial from_even(const std::vector<double>& even) {
    std::vector<double> c(even.empty() ? 1 : 2 * even.size() - 1, 0.0);
    for (std::size_t k = 0; k < even.size(); ++k) c[2 * k] = even[k];
    return Polynomial(std::move(c));
  }

  const std::vector<double>& coefficients() const { return c_; }
  double coefficient(std::size_t power) const { return power < c_.size() ? c_[power] : 0.0; }
  int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }
  double leading() const { return c_.empty() ? 0.0 : c_.back(); }

  double operator()(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<double> d(c_.begin() + 1, c_.end());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] *= static_cast<double>(k + 1);
    return Polynomial(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < a.c_.size(); ++k) r[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) r[k] += b.c_[k];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator*(double s, const Polynomial& p) {
    std::vector<double> r = p.c_;
    for (double& v : r) v *= s;
    return Polynomial(std::move(r));
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return {};
    std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }

  // Zeroes coefficients below rel_tol * (largest magnitude) and trims.
  Polynomial chopped(double rel_tol) const {
    double scale = 0.0;
    for (double v : c_) scale = std::max(scale, std::abs(v));
    std::vector<double> r = c_;
    for (double& v : r)
      if (std::abs(v) <= rel_tol * scale) v = 0.0;
    return Polynomial(std::move(r));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }

  std::vector<double> c_;
};

}  // namespace cdflow
