#pragma once

#include <cstdint>
#include <vector>

#include "qcse/envs.hpp"
#include "qcse/rng.hpp"

namespace qcse {

enum class BufferSource { offline, online };

/// FIFO transition store with uniform with-replacement sampling. Entries
/// are addressed by the absolute push index, which stays valid for an
/// entry's whole lifetime regardless of eviction; an auxiliary per-entry
/// scalar rides along (the trainer stores online return-to-go there).
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, BufferSource source);

  /// Returns the absolute index of the pushed entry.
  std::uint64_t push(Transition t, double aux = 0.0);

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  BufferSource source() const { return source_; }

  std::uint64_t total_pushed() const { return total_; }
  std::uint64_t first_live() const { return total_ - data_.size(); }
  bool live(std::uint64_t abs) const { return abs >= first_live() && abs < total_; }

  const Transition& at(std::uint64_t abs) const;
  double aux(std::uint64_t abs) const;
  void set_aux(std::uint64_t abs, double v);

  /// n absolute indices, uniform over live entries, with replacement.
  std::vector<std::uint64_t> sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t slot(std::uint64_t abs) const { return static_cast<std::size_t>(abs % capacity_); }
  std::vector<Transition> data_;
  std::vector<double> aux_;
  std::size_t capacity_;
  std::uint64_t total_ = 0;
  BufferSource source_;
};

}  // namespace qcse
