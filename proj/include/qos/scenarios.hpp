#pragma once

#include <cstdint>

#include "qos/model.hpp"

namespace qos {

// Defaults shared by the reproduction scenarios: S(t) = 50 constant, w = 1,
// zeta = 1, V = 1000, T = 10^5.
struct ExperimentParams {
  PolicyKind policy = PolicyKind::kPiHat;
  double v = 1000.0;
  double zeta = 1.0;
  double weight = 1.0;
  PacketCount capacity = 50;
  Slot horizon = 100000;
  std::uint64_t seed = 1;
  Slot feedback_delay = 0;
};

// Two bursty flows with the service/arrival combinations of the reference
// parameter table: row 1 alpha = (0.2, 0.8), row 2 (0.2, 0.4), row 3
// (0.2, 0.6) with burst size eta. Under pi_bar every flow gets
// D^max = max{A^max, ceil(alpha S^max)}.
ScenarioSpec table_scenario(int row, const ExperimentParams& params, PacketCount eta = 1);

// Bursty flows (1, 20, 300) with alpha = (0.2, 0.6); f1 leaves at 7*10^4,
// f2 joins at 3*10^4.
ScenarioSpec bursty_join_leave(const ExperimentParams& params);

inline constexpr Slot kSecondFlowJoin = 30000;
inline constexpr Slot kFirstFlowLeave = 70000;

// Same membership pattern with AIMD sources.
ScenarioSpec closed_loop_join_leave(const ExperimentParams& params);

// Two AIMD flows present for the whole horizon.
ScenarioSpec closed_loop_pair(const ExperimentParams& params);

}  // namespace qos
