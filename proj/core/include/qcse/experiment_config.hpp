#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qcse/trainer.hpp"

namespace qcse {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fully-resolved experiment description. Parsed from a JSON config file
/// with strict schema validation: unknown keys are rejected, defaults are
/// expanded, and every run writes the resolved form beside its outputs.
struct ExperimentConfig {
  EnvSpec env;

  std::string dataset_path;
  struct GenerateBlock {
    bool present = false;
    std::string behavior = "medium";
    std::int64_t size = 20000;
    std::uint64_t seed = 1;
  } generate;

  ActorCriticConfig agent;  ///< dims/kind filled from the environment
  TrainConfig train;
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir;
  std::vector<int> knn_sweep = {0, 10, 15, 25, 50, 85, 100, 110};

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);

  /// Resolved (defaults-expanded) JSON form.
  std::string resolved_json() const;
};

}  // namespace qcse
