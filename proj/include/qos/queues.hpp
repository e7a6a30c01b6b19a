#pragma once

#include <algorithm>
#include <deque>

#include "qos/model.hpp"

namespace qos {

// Packets that arrived in the same slot; the FIFO stores packets run-length
// encoded since every packet of a slot shares its arrival stamp.
struct PacketBatch {
  Slot arrival_slot = 0;
  PacketCount count = 0;
};

class PacketQueue {
 public:
  PacketCount size() const { return size_; }
  bool empty() const { return size_ == 0; }

  void push(Slot arrival_slot, PacketCount count);

  // Remove up to `count` packets from the head; on_batch(arrival_slot, n) is
  // called for every removed run. Returns the number removed.
  template <class OnBatch>
  PacketCount pop_front(PacketCount count, OnBatch&& on_batch) {
    PacketCount removed = 0;
    while (removed < count && !batches_.empty()) {
      auto& head = batches_.front();
      const PacketCount take = std::min(head.count, count - removed);
      on_batch(head.arrival_slot, take);
      head.count -= take;
      removed += take;
      if (head.count == 0) batches_.pop_front();
    }
    size_ -= removed;
    return removed;
  }
  PacketCount pop_front(PacketCount count) {
    return pop_front(count, [](Slot, PacketCount) {});
  }
  PacketCount pop_back(PacketCount count);
  // Discards everything; returns the number discarded.
  PacketCount clear();

  const std::deque<PacketBatch>& batches() const { return batches_; }

 private:
  std::deque<PacketBatch> batches_;
  PacketCount size_ = 0;
};

// Q' = Q - served - dropped + A, with realized quantities.
PacketCount update_data_queue(PacketCount q, PacketCount served_actual,
                              PacketCount dropped_actual, PacketCount a_t);

// Y' = [Y + alpha S(t) - S_i(t)]^+ with the decided allocation.
double update_virtual_queue(double y, double alpha, PacketCount s_t, PacketCount s_i);

// Z' = [Z + zeta (alpha S(t) I - S_i(t) - D_i(t))]^+ with I = 1 iff Q(t) > 0.
double update_persistent_queue(double z, double zeta, double alpha, PacketCount s_t,
                               bool backlogged, PacketCount s_i, PacketCount d_i);

}  // namespace qos
