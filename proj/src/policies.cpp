#include "qos/policies.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace qos {

PacketCount PolicyOutput::total_allocated() const {
  PacketCount total = 0;
  for (const auto& d : flows) total += d.s_alloc;
  return total;
}

double sra_weight(const FlowSnapshot& flow) {
  return flow.config.zeta * flow.z + static_cast<double>(flow.q) + flow.y;
}

bool drop_threshold_exceeded(PacketCount q, double z, const FlowConfig& config) {
  return static_cast<double>(q) + config.zeta * z > config.v_param * config.weight;
}

std::vector<PacketCount> sra_allocate(const PolicyInput& input) {
  std::vector<PacketCount> alloc(input.flows.size(), 0);
  if (input.flows.empty()) return alloc;
  std::size_t best = 0;
  for (std::size_t i = 1; i < input.flows.size(); ++i) {
    const double wi = sra_weight(input.flows[i]);
    const double wb = sra_weight(input.flows[best]);
    if (wi > wb || (wi == wb && input.flows[i].config.id < input.flows[best].config.id)) {
      best = i;
    }
  }
  alloc[best] = input.s_t;
  return alloc;
}

PacketCount drop_pi_bar(PacketCount q, double z, const FlowConfig& config) {
  if (!config.drop_cap) {
    throw QosError(ErrorKind::kMissingDropCap,
                   fmt::format("flow {} has no drop_cap", config.id));
  }
  return drop_threshold_exceeded(q, z, config) ? *config.drop_cap : 0;
}

PacketCount drop_pi_hat(PacketCount q, double z, PacketCount a_t, PacketCount s_t,
                        const FlowConfig& config) {
  if (!drop_threshold_exceeded(q, z, config)) return 0;
  return std::max(a_t, ceil_share(config.alpha, s_t));
}

namespace {

PacketCount require_arrivals(const FlowSnapshot& f) {
  if (!f.a_t) {
    throw QosError(ErrorKind::kMissingArrivalCount,
                   fmt::format("flow {} needs its current-slot arrival count",
                               f.config.id));
  }
  return *f.a_t;
}

}  // namespace

PolicyOutput step_pi_static(const PolicyInput& input) {
  PolicyOutput out;
  out.flows.reserve(input.flows.size());
  for (const auto& f : input.flows) {
    const PacketCount a_t = require_arrivals(f);
    const bool over = static_cast<double>(f.q) > f.config.v_param * f.config.weight;
    out.flows.push_back(
        {f.config.id, floor_share(f.config.alpha, input.s_t), over ? a_t : 0});
  }
  return out;
}

PolicyOutput step_policy(PolicyKind kind, const PolicyInput& input) {
  if (kind == PolicyKind::kPiStatic) return step_pi_static(input);

  const auto alloc = sra_allocate(input);
  PolicyOutput out;
  out.flows.reserve(input.flows.size());
  for (std::size_t i = 0; i < input.flows.size(); ++i) {
    const auto& f = input.flows[i];
    PacketCount drop = 0;
    if (kind == PolicyKind::kPiBar) {
      drop = drop_pi_bar(f.q, f.z, f.config);
    } else {
      drop = drop_pi_hat(f.q, f.z, require_arrivals(f), input.s_t, f.config);
    }
    out.flows.push_back({f.config.id, alloc[i], drop});
  }
  return out;
}

double drift_objective(const PolicyInput& input, const PolicyOutput& decision) {
  double total = 0.0;
  for (std::size_t i = 0; i < input.flows.size(); ++i) {
    const auto& f = input.flows[i];
    const double backlog = f.config.zeta * f.z + static_cast<double>(f.q);
    total += -(backlog + f.y) * static_cast<double>(decision.flows[i].s_alloc);
    total += (f.config.v_param * f.config.weight - backlog) *
             static_cast<double>(decision.flows[i].d_drop);
  }
  return total;
}

}  // namespace qos
