#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cdflow/grid.hpp"

namespace cdflow {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) { return splitmix64(master ^ index); }

struct FieldOptions {
  double clamp = 4.0;  // |log f| <= clamp
  double amp_min = 1e-3;
  double amp_max = 3.0;
};

namespace detail {

inline double hermite_e(int k, double y) {
  double a = 1.0, b = y;
  if (k == 0) return a;
  for (int j = 1; j < k; ++j) {
    const double c = y * b - j * a;
    a = b;
    b = c;
  }
  return b;
}

}  // namespace detail

// Random smooth bounded field u, mixing (each group kept with probability 1/2,
// at least one group always present):
//   sparse low-order Hermite polynomials He_k(x/s), k = 1..3;
//   Hermite functions He_k(y) exp(-y^2/4), k = 0..3;
//   a tilt tanh(x/s);
//   Gaussian bumps.
// Then f = exp(U tanh(A u / U)) with amplitude A log-uniform.
class RandomField {
 public:
  RandomField(std::mt19937_64& rng, const FieldOptions& opt = {}) : clamp_(opt.clamp) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto coin = [&] { return unit(rng) < 0.5; };
    do {
      use_poly_ = coin();
      use_herm_ = coin();
      use_tilt_ = coin();
      use_bump_ = coin();
    } while (!(use_poly_ || use_herm_ || use_tilt_ || use_bump_));

    poly_scale_ = std::exp(std::log(0.5) + unit(rng) * std::log(8.0));
    for (int k = 0; k < 3; ++k) poly_[k] = coin() ? normal(rng) / (k + 1) : 0.0;
    if (poly_[0] == 0.0 && poly_[1] == 0.0 && poly_[2] == 0.0) poly_[0] = normal(rng);

    herm_scale_ = 0.5 + 1.5 * unit(rng);
    for (int k = 0; k < 4; ++k) herm_[k] = normal(rng) / (k + 1);

    tilt_ = normal(rng);
    tilt_scale_ = std::exp(std::log(0.5) + unit(rng) * std::log(40.0));

    for (auto& b : bumps_) {
      b.weight = normal(rng);
      b.center = 2.0 * normal(rng);
      b.width = 0.3 + 1.2 * unit(rng);
    }
    amplitude_ = std::exp(std::log(opt.amp_min) + unit(rng) * (std::log(opt.amp_max) - std::log(opt.amp_min)));
  }

  double field(double x) const {
    double u = 0.0;
    if (use_poly_) {
      const double y = x / poly_scale_;
      for (int k = 0; k < 3; ++k)
        if (poly_[k] != 0.0) u += poly_[k] * detail::hermite_e(k + 1, y);
    }
    if (use_herm_) {
      const double y = x / herm_scale_;
      const double env = std::exp(-0.25 * y * y);
      for (int k = 0; k < 4; ++k) u += herm_[k] * detail::hermite_e(k, y) * env;
    }
    if (use_tilt_) u += tilt_ * std::tanh(x / tilt_scale_);
    if (use_bump_)
      for (const auto& b : bumps_) {
        const double z = (x - b.center) / b.width;
        u += b.weight * std::exp(-0.5 * z * z);
      }
    return u;
  }

  double operator()(double x) const { return std::exp(clamp_ * std::tanh(amplitude_ * field(x) / clamp_)); }

  double amplitude() const { return amplitude_; }

 private:
  struct Bump {
    double weight, center, width;
  };
  double clamp_;
  bool use_poly_ = false, use_herm_ = false, use_tilt_ = false, use_bump_ = false;
  double poly_scale_ = 1.0, poly_[3] = {0, 0, 0};
  double herm_scale_ = 1.0, herm_[4] = {0, 0, 0, 0};
  double tilt_ = 0.0, tilt_scale_ = 1.0;
  Bump bumps_[2] = {};
  double amplitude_ = 1.0;
};

inline GridFunction random_positive_function(const GridPtr& grid, std::uint64_t seed, const FieldOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  const RandomField field(rng, opt);
  return sample(grid, field);
}

}  // namespace cdflow
