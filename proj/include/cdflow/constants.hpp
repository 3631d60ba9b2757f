#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "cdflow/errors.hpp"

namespace cdflow {

struct ConstantReport {
  std::string name;
  std::map<std::string, double> inputs;
  std::optional<double> value;  // empty when the inputs are inadmissible
  bool validity = false;
  std::string reason;
};

inline double c_phi(double n, double beta) {
  require(beta != 1.0, ErrorKind::Degenerate, "beta = 1 annihilates the denominator");
  require(beta != n + 1.0, ErrorKind::Degenerate, "beta = n + 1 annihilates the denominator");
  require(beta > n + 1.0, ErrorKind::OutOfRange, "c_phi needs beta > n + 1");
  const double m = beta - 1.0 - n;
  return (8.0 * m * (2.0 * beta - 1.0) + 9.0 * n) / (8.0 * m * (beta - 1.0));
}

inline double p_star_weighted(double n, double beta) {
  require(beta != n + 1.0, ErrorKind::Degenerate, "beta = n + 1 annihilates the denominator");
  require(beta > n + 1.0, ErrorKind::OutOfRange, "p_star_weighted needs beta > n + 1");
  require(n >= 0.0, ErrorKind::OutOfRange, "p_star_weighted needs n >= 0");
  const double m = beta - 1.0 - n;
  return 1.0 + (8.0 * m + 9.0 * n) / (8.0 * beta * m + 9.0 * n);
}

inline double p_star_negative_dim(double n) {
  require(n < -2.0, ErrorKind::OutOfRange, "p_star_negative_dim needs n < -2");
  return 1.0 + (1.0 - 4.0 * n) / (2.0 * n * n + 1.0);
}

inline double q_star(double n) {
  require(n < -2.0, ErrorKind::OutOfRange, "q_star needs n < -2");
  return 2.0 * n * (n + 2.0) / (1.0 - 4.0 * n);
}

struct AlphaTheta {
  double alpha;
  double theta;
};

inline AlphaTheta alpha_theta(double p, double n) {
  require(p != 1.0, ErrorKind::Degenerate, "p = 1");
  require(n != -2.0, ErrorKind::Degenerate, "n = -2");
  require(p > 1.0 && p <= 2.0, ErrorKind::OutOfRange, "p must lie in (1, 2]");
  const double q = (2.0 - p) / (p - 1.0);
  const double alpha = q / (2.0 * (n + 2.0) * (n + 2.0)) * (q * (4.0 * n - 1.0) + 2.0 * n * (n + 2.0));
  return {alpha, alpha * p / (p - 1.0)};
}

inline double poincare_constant(double rho, double n) {
  require_dimension(n);
  require(rho > 0.0, ErrorKind::NonpositiveCurvature, "rho must be positive");
  return (n - 1.0) / (rho * n);
}

// Best constant rho n / (n - 1) reached by CD pairs of the quadratic weight.
inline double c_beta(double beta) {
  require(beta > 0.5, ErrorKind::OutOfRange, "C_beta needs beta > 1/2");
  if (beta >= 1.5) return 2.0 * (beta - 1.0);
  return (beta - 0.5) * (beta - 0.5);
}

inline double p_star_bgs(double d, double beta) {
  require(beta > d, ErrorKind::OutOfRange, "p*_BGS needs beta > d");
  return 1.0 + 1.0 / (beta - d);
}

enum class PhiFamily { power, xlogx };

inline bool phi_condition_check(PhiFamily family, double n, double beta, double p = 2.0) {
  if (family == PhiFamily::xlogx) return c_phi(n, beta) <= 2.0;
  require(p > 1.0 && p <= 2.0, ErrorKind::OutOfRange, "power family needs p in (1, 2]");
  return p >= p_star_weighted(n, beta) && p <= 2.0;
}

// Dispatch by name for the command line; errors become an invalid report.
inline ConstantReport evaluate_constant(const std::string& name, const std::map<std::string, double>& in) {
  ConstantReport r{name, in, std::nullopt, false, ""};
  auto get = [&](const char* key) {
    auto it = in.find(key);
    if (it == in.end()) fail(ErrorKind::InvalidArgument, name + " needs --" + key);
    return it->second;
  };
  try {
    if (name == "c_phi") {
      r.value = c_phi(get("n"), get("beta"));
    } else if (name == "p_star_weighted") {
      r.value = p_star_weighted(get("n"), get("beta"));
    } else if (name == "p_star" || name == "p_star_negative_dim") {
      r.value = p_star_negative_dim(get("n"));
    } else if (name == "q_star") {
      r.value = q_star(get("n"));
    } else if (name == "alpha") {
      r.value = alpha_theta(get("p"), get("n")).alpha;
    } else if (name == "theta") {
      r.value = alpha_theta(get("p"), get("n")).theta;
    } else if (name == "poincare_constant") {
      r.value = poincare_constant(get("rho"), get("n"));
    } else if (name == "c_beta") {
      r.value = c_beta(get("beta"));
    } else if (name == "p_star_bgs") {
      r.value = p_star_bgs(in.count("d") ? in.at("d") : 1.0, get("beta"));
    } else {
      fail(ErrorKind::InvalidArgument, "unknown constant '" + name + "'");
    }
    r.validity = true;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw;
    r.value.reset();
    r.reason = e.what();
  }
  return r;
}

}  // namespace cdflow
