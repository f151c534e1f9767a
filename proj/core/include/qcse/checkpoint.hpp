#pragma once

#include <map>
#include <string>
#include <vector>

#include "qcse/mlp.hpp"

namespace qcse {

/// Checkpoint container: named networks plus free-form metadata. On disk:
/// magic, version, a JSON header describing sections, then each section's
/// flat parameter array as raw doubles. load(save(x)) restores parameters
/// bit-identically.
struct Checkpoint {
  struct Section {
    MlpSpec spec;
    Eigen::VectorXd params;
  };
  std::map<std::string, Section> sections;
  std::string meta_json = "{}";

  void put(const std::string& name, const Mlp& net);
  /// Rebuild a network from a section; throws if the name is missing.
  Mlp get(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace qcse
