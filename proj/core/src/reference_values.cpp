#include "qcse/reference_values.hpp"

namespace qcse {

ReferenceValues compute_reference_values(const Dataset& ds, double gamma) {
  ds.validate();
  ReferenceValues rv;
  rv.value.resize(static_cast<Eigen::Index>(ds.transitions.size()));
  const auto starts = ds.episode_starts();
  for (std::size_t e = 0; e < starts.size(); ++e) {
    const std::size_t begin = starts[e];
    const std::size_t end = (e + 1 < starts.size()) ? starts[e + 1] : ds.transitions.size();
    double g = 0.0;  // zero bootstrap at terminal and truncated ends alike
    for (std::size_t i = end; i-- > begin;) {
      g = ds.transitions[i].reward + gamma * (ds.transitions[i].done ? 0.0 : g);
      rv.value[static_cast<Eigen::Index>(i)] = g;
    }
  }
  return rv;
}

}  // namespace qcse
