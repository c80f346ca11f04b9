#pragma once
#include <algorithm>
#include <cmath>

#include "spikes/errors.hpp"

namespace spikes {

// Power nonlinearity f(t) = |t|^{p-2} t with primitive F(t) = |t|^p / p.
// Odd, superlinear, subcritical for the dimensions handled here (N <= 3
// requires 2 < p; p < 2N/(N-2) only binds for N = 3).
struct Nonlinearity {
  double p = 3.0;

  double f(double t) const {
    if (t == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(t), p - 1.0), t);
  }
  double F(double t) const { return std::pow(std::abs(t), p) / p; }
  double fprime(double t) const {
    if (t == 0.0) return 0.0;
    return (p - 1.0) * std::pow(std::abs(t), p - 2.0);
  }
  // Hoelder exponent of f near 0; controls the correction-size exponent.
  double sigma() const { return std::min(1.0, p - 2.0); }
};

inline Nonlinearity make_nonlinearity(double p) {
  require(p > 2.0, ErrorKind::BadConfig, "nonlinearity exponent must satisfy p > 2");
  return Nonlinearity{p};
}

}  // namespace spikes
