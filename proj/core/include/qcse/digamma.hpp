#pragma once

namespace qcse {

/// Digamma psi(x) for x > 0: recurrence up the axis followed by the
/// asymptotic (Bernoulli) series. Absolute error below 1e-12 on
/// [1e-3, 1e6]. Throws std::invalid_argument for x <= 0 or non-finite x.
double digamma(double x);

}  // namespace qcse
