#include "qos/queues.hpp"

#include <algorithm>

namespace qos {

void PacketQueue::push(Slot arrival_slot, PacketCount count) {
  if (count <= 0) return;
  if (!batches_.empty() && batches_.back().arrival_slot == arrival_slot) {
    batches_.back().count += count;
  } else {
    batches_.push_back({arrival_slot, count});
  }
  size_ += count;
}

PacketCount PacketQueue::pop_back(PacketCount count) {
  PacketCount removed = 0;
  while (removed < count && !batches_.empty()) {
    auto& tail = batches_.back();
    const PacketCount take = std::min(tail.count, count - removed);
    tail.count -= take;
    removed += take;
    if (tail.count == 0) batches_.pop_back();
  }
  size_ -= removed;
  return removed;
}

PacketCount PacketQueue::clear() {
  const PacketCount n = size_;
  batches_.clear();
  size_ = 0;
  return n;
}

PacketCount update_data_queue(PacketCount q, PacketCount served_actual,
                              PacketCount dropped_actual, PacketCount a_t) {
  return q - served_actual - dropped_actual + a_t;
}

double update_virtual_queue(double y, double alpha, PacketCount s_t, PacketCount s_i) {
  return std::max(0.0, y + service_share(alpha, s_t) - static_cast<double>(s_i));
}

double update_persistent_queue(double z, double zeta, double alpha, PacketCount s_t,
                               bool backlogged, PacketCount s_i, PacketCount d_i) {
  const double owed = backlogged ? service_share(alpha, s_t) : 0.0;
  return std::max(0.0, z + zeta * (owed - static_cast<double>(s_i) -
                                   static_cast<double>(d_i)));
}

}  // namespace qos
