#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qcse/envs.hpp"

namespace qcse {

struct DatasetMeta {
  int schema_version = 1;
  std::string env_id;
  std::string behavior_id;
  std::uint64_t seed = 0;
  ActionKind action_kind = ActionKind::discrete;
  int state_dim = 0;
  int action_dim = 0;  ///< box width, or the discrete action count
};

/// Ordered transitions from one environment under one behavior policy.
struct Dataset {
  DatasetMeta meta;
  std::vector<Transition> transitions;

  /// Nonempty, consistent dimensions, finite rewards.
  void validate() const;
  bool operator==(const Dataset& other) const;

  /// Episode start indices, inferred from terminal flags and state
  /// discontinuities (a truncated episode is followed by a reset).
  std::vector<std::size_t> episode_starts() const;
  /// Mean undiscounted return per episode (the trailing partial episode
  /// counts; both sides of any comparison are treated alike).
  double average_episode_return() const;
};

struct DatasetSchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Length-prefixed binary records behind a JSON header; round-trips
/// bit-exactly. Throws DatasetSchemaError on malformed input and
/// std::runtime_error on I/O failure.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace qcse
