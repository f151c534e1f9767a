#include "qcse/replay_buffer.hpp"

#include <stdexcept>

namespace qcse {

ReplayBuffer::ReplayBuffer(std::size_t capacity, BufferSource source)
    : capacity_(capacity), source_(source) {
  if (capacity_ < 1) throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
}

std::uint64_t ReplayBuffer::push(Transition t, double aux) {
  const std::uint64_t abs = total_;
  const std::size_t s = slot(abs);
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
    aux_.push_back(aux);
  } else {
    data_[s] = std::move(t);
    aux_[s] = aux;
  }
  ++total_;
  return abs;
}

const Transition& ReplayBuffer::at(std::uint64_t abs) const {
  if (!live(abs)) throw std::out_of_range("ReplayBuffer::at: entry evicted or unwritten");
  return data_[slot(abs)];
}

double ReplayBuffer::aux(std::uint64_t abs) const {
  if (!live(abs)) throw std::out_of_range("ReplayBuffer::aux: entry evicted or unwritten");
  return aux_[slot(abs)];
}

void ReplayBuffer::set_aux(std::uint64_t abs, double v) {
  if (!live(abs)) throw std::out_of_range("ReplayBuffer::set_aux: entry evicted or unwritten");
  aux_[slot(abs)] = v;
}

std::vector<std::uint64_t> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (data_.empty()) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
  std::vector<std::uint64_t> idx(n);
  const std::uint64_t base = first_live();
  for (std::size_t i = 0; i < n; ++i) {
    idx[i] = base + static_cast<std::uint64_t>(rng.uniform_int(static_cast<int>(data_.size())));
  }
  return idx;
}

}  // namespace qcse
