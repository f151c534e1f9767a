#pragma once

#include <cstdint>
#include <vector>

namespace qcse {

struct SignTestResult {
  int wins = 0;    ///< pairs with x > y
  int losses = 0;  ///< pairs with x < y
  int ties = 0;    ///< dropped
  double p_value = 1.0;
};

/// One-sided paired sign test of "x tends to exceed y": ties dropped,
/// p = P[Binomial(wins+losses, 1/2) >= wins]. Exact integer binomials.
/// n = 0 after dropping ties yields p = 1.
SignTestResult sign_test_greater(const std::vector<double>& x,
                                 const std::vector<double>& y);

double mean(const std::vector<double>& xs);
double median(std::vector<double> xs);  // by value: sorts a copy

}  // namespace qcse
