#include "qos/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace qos {

void WaitStats::record(Slot wait, PacketCount packets) {
  if (packets <= 0) return;
  const auto idx = static_cast<std::size_t>(std::max<Slot>(wait, 0));
  if (idx >= histogram_.size()) histogram_.resize(idx + 1, 0);
  histogram_[idx] += packets;
  count_ += packets;
  total_ += static_cast<double>(wait) * static_cast<double>(packets);
  max_ = std::max(max_, wait);
}

double WaitStats::mean() const {
  return count_ ? total_ / static_cast<double>(count_) : 0.0;
}

Slot WaitStats::percentile(double p) const {
  if (count_ == 0) return 0;
  const double target = std::clamp(p, 0.0, 1.0) * static_cast<double>(count_);
  PacketCount seen = 0;
  for (std::size_t w = 0; w < histogram_.size(); ++w) {
    seen += histogram_[w];
    if (static_cast<double>(seen) >= target && seen > 0) return static_cast<Slot>(w);
  }
  return max_;
}

void RunningMoments::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningMoments::stddev() const {
  return n_ ? std::sqrt(m2_ / static_cast<double>(n_)) : 0.0;
}

const FlowEpochMetrics* EpochMetrics::find(int flow_id) const {
  for (const auto& f : flows) {
    if (f.flow_id == flow_id) return &f;
  }
  return nullptr;
}

std::string_view to_string(InvariantKind kind) {
  switch (kind) {
    case InvariantKind::kQueueBound: return "queue_bound";
    case InvariantKind::kPersistentBound: return "persistent_bound";
    case InvariantKind::kCombinedBound: return "combined_bound";
    case InvariantKind::kVirtualBound: return "virtual_bound";
    case InvariantKind::kPersistentZero: return "persistent_zero";
    case InvariantKind::kDelayBound: return "delay_bound";
  }
  return "unknown";
}

const FlowTotals* MetricsReport::totals_for(int flow_id) const {
  for (const auto& t : totals) {
    if (t.flow_id == flow_id) return &t;
  }
  return nullptr;
}

std::uint64_t MetricsReport::violations_of(InvariantKind kind) const {
  std::uint64_t n = 0;
  for (const auto& s : invariants) {
    if (s.kind == kind) n += s.violations;
  }
  return n;
}

bool MetricsReport::invariant_applicable(InvariantKind kind) const {
  return std::any_of(invariants.begin(), invariants.end(),
                     [&](const InvariantStatus& s) { return s.kind == kind && s.applicable; });
}

const FlowSlotRecord* SlotTrace::find(int flow_id) const {
  for (const auto& f : flows) {
    if (f.flow_id == flow_id) return &f;
  }
  return nullptr;
}

}  // namespace qos
