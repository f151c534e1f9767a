#pragma once

#include <Eigen/Dense>

#include "qcse/dataset.hpp"

namespace qcse {

/// Per-transition Monte-Carlo return of the behavior policy, computed once
/// from the offline dataset by discounted return-to-go along each episode.
/// Truncated episodes (including partial medium-replay trajectories)
/// bootstrap with zero.
struct ReferenceValues {
  Eigen::VectorXd value;  ///< aligned with the dataset's transitions
};

ReferenceValues compute_reference_values(const Dataset& ds, double gamma);

}  // namespace qcse
