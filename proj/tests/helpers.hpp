#pragma once

#include <optional>

#include "qos/model.hpp"

namespace qos::test {

inline FlowConfig bursty_flow(int id, double alpha, PacketCount eta, double lambda, PacketCount nu,
                              double v = 1000.0) {
  FlowConfig f;
  f.id = id;
  f.alpha = alpha;
  f.v_param = v;
  f.source = BurstySourceSpec{eta, lambda, nu};
  return f;
}

// eta packets in every slot (nu = 1 and an overwhelming mean).
inline FlowConfig constant_flow(int id, double alpha, PacketCount per_slot, double v = 1000.0) {
  return bursty_flow(id, alpha, per_slot, 1e6, 1, v);
}

inline FlowConfig aimd_flow(int id, double alpha, double v = 1000.0) {
  FlowConfig f;
  f.id = id;
  f.alpha = alpha;
  f.v_param = v;
  f.source = AimdSourceSpec{};
  return f;
}

inline ScenarioSpec make_spec(std::vector<FlowConfig> flows, PolicyKind policy,
                              Slot horizon = 1000, PacketCount capacity = 50) {
  ScenarioSpec s;
  s.flows = std::move(flows);
  s.policy = policy;
  s.horizon = horizon;
  s.channel.s_max = capacity;
  s.channel.s_min = capacity;
  return s;
}

}  // namespace qos::test
