#include "qcse/digamma.hpp"

#include <cmath>
#include <stdexcept>

namespace qcse {

double digamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::invalid_argument("digamma: requires finite x > 0");
  }
  // psi(x) = psi(x+1) - 1/x until the asymptotic series is accurate.
  double acc = 0.0;
  while (x < 8.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  // Bernoulli-number tail of the asymptotic expansion.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = -0.5 * inv;
  series -= inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
  return acc + std::log(x) + series;
}

}  // namespace qcse
