#include "qcse/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcse {

SignTestResult sign_test_greater(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("sign_test_greater: size mismatch");
  SignTestResult r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > y[i]) ++r.wins;
    else if (x[i] < y[i]) ++r.losses;
    else ++r.ties;
  }
  const int n = r.wins + r.losses;
  if (n == 0) {
    r.p_value = 1.0;
    return r;
  }
  // P[Bin(n, 1/2) >= wins], exact. n is small (seed counts), so the
  // binomial coefficients stay well inside double range.
  double tail = 0.0;
  double coef = 1.0;  // C(n, 0)
  for (int j = 0; j <= n; ++j) {
    if (j >= r.wins) tail += coef;
    coef = coef * (n - j) / (j + 1);
  }
  r.p_value = tail * std::pow(0.5, n);
  return r;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double v : xs) s += v;
  return s / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median: empty input");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return (n % 2 == 1) ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace qcse
