#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qos/bounds.hpp"
#include "qos/model.hpp"

namespace qos {

// Histogram of per-packet wait times in slots.
class WaitStats {
 public:
  void record(Slot wait, PacketCount packets);

  PacketCount count() const { return count_; }
  Slot max() const { return max_; }
  double mean() const;
  // Smallest wait w with P(wait <= w) >= p; 0 when empty.
  Slot percentile(double p) const;

 private:
  std::vector<PacketCount> histogram_;
  PacketCount count_ = 0;
  double total_ = 0.0;
  Slot max_ = 0;
};

// Welford accumulator.
class RunningMoments {
 public:
  void add(double x);
  std::uint64_t count() const { return n_; }
  double mean() const { return n_ ? mean_ : 0.0; }
  double stddev() const;  // population standard deviation

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct FlowEpochMetrics {
  int flow_id = 0;
  Slot slots = 0;
  PacketCount arrivals = 0;
  PacketCount allocated = 0;
  PacketCount served = 0;
  PacketCount dropped = 0;
  PacketCount drop_decisions = 0;
  double weighted_drop_decisions = 0.0;
  double weighted_drops = 0.0;
  RunningMoments queue;  // Q(t) at the start of every slot
  WaitStats wait;
  PacketCount q_end = 0;
  double y_end = 0.0;
  double z_end = 0.0;

  double per_slot(double total) const { return slots ? total / static_cast<double>(slots) : 0.0; }
  double avg_arrival() const { return per_slot(static_cast<double>(arrivals)); }
  double avg_served() const { return per_slot(static_cast<double>(served)); }
  double avg_dropped() const { return per_slot(static_cast<double>(dropped)); }
  double avg_drop_decision() const { return per_slot(static_cast<double>(drop_decisions)); }
  double avg_weighted_drop_decision() const { return per_slot(weighted_drop_decisions); }
  double avg_weighted_drop() const { return per_slot(weighted_drops); }
};

// Averages reset at every join/leave slot.
struct EpochMetrics {
  Slot start = 1;
  Slot end = 1;  // exclusive
  PacketCount capacity_total = 0;
  std::vector<FlowEpochMetrics> flows;

  double avg_capacity() const {
    return end > start ? static_cast<double>(capacity_total) / static_cast<double>(end - start)
                       : 0.0;
  }
  const FlowEpochMetrics* find(int flow_id) const;
};

struct FlowTotals {
  int flow_id = 0;
  Slot slots_present = 0;
  PacketCount arrivals = 0;
  PacketCount served = 0;
  PacketCount dropped = 0;
  PacketCount abandoned = 0;  // discarded when the flow left
  PacketCount final_queue = 0;
  double weighted_drop_decisions = 0.0;
  double weighted_drops = 0.0;
  PacketCount capacity_total = 0;  // sum of S(t) over slots present
  double y_final = 0.0;
  double z_final = 0.0;
  Slot max_wait = 0;

  double avg_served() const {
    return slots_present ? static_cast<double>(served) / static_cast<double>(slots_present) : 0.0;
  }
  double avg_capacity() const {
    return slots_present ? static_cast<double>(capacity_total) / static_cast<double>(slots_present)
                         : 0.0;
  }
  // Y(T)/T over the slots the flow was present.
  double y_ratio() const {
    return slots_present ? y_final / static_cast<double>(slots_present) : 0.0;
  }
};

enum class InvariantKind {
  kQueueBound,
  kPersistentBound,
  kCombinedBound,
  kVirtualBound,
  kPersistentZero,
  kDelayBound,
};

inline constexpr InvariantKind kAllInvariants[] = {
    InvariantKind::kQueueBound,   InvariantKind::kPersistentBound,
    InvariantKind::kCombinedBound, InvariantKind::kVirtualBound,
    InvariantKind::kPersistentZero, InvariantKind::kDelayBound,
};

std::string_view to_string(InvariantKind kind);

struct BoundViolation {
  Slot t = 0;
  int flow_id = 0;
  InvariantKind kind = InvariantKind::kQueueBound;
  double observed = 0.0;
  double bound = 0.0;
};

struct InvariantStatus {
  int flow_id = 0;
  InvariantKind kind = InvariantKind::kQueueBound;
  bool applicable = false;
  std::string reason;  // why not applicable
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
};

struct FlowBounds {
  int flow_id = 0;
  BoundSet bounds;
};

struct MetricsReport {
  PolicyKind policy = PolicyKind::kPiHat;
  Slot horizon = 0;
  PacketCount capacity_total = 0;
  std::vector<EpochMetrics> epochs;
  std::vector<FlowTotals> totals;
  std::vector<FlowBounds> theoretical_bounds;
  std::vector<InvariantStatus> invariants;
  std::vector<BoundViolation> violations;  // first entries only
  std::uint64_t violation_count = 0;

  double avg_capacity() const {
    return horizon ? static_cast<double>(capacity_total) / static_cast<double>(horizon) : 0.0;
  }
  const FlowTotals* totals_for(int flow_id) const;
  // Total violations of one kind across flows.
  std::uint64_t violations_of(InvariantKind kind) const;
  bool invariant_applicable(InvariantKind kind) const;
};

struct FlowSlotRecord {
  int flow_id = 0;
  PacketCount a_t = 0;
  PacketCount s_alloc = 0;
  PacketCount d_drop = 0;
  PacketCount served = 0;
  PacketCount dropped = 0;
  PacketCount q_before = 0;
  PacketCount q_after = 0;
  double y_after = 0.0;
  double z_after = 0.0;
  std::optional<double> lambda;  // mean used for this slot's draw
  // Running epoch averages after this slot.
  double avg_arrival = 0.0;
  double avg_served = 0.0;
  double avg_weighted_drop_decision = 0.0;
  double avg_weighted_drop = 0.0;
};

struct SlotTrace {
  Slot t = 0;
  PacketCount s_t = 0;
  std::vector<FlowSlotRecord> flows;  // present flows, in spec order

  const FlowSlotRecord* find(int flow_id) const;
};

}  // namespace qos
