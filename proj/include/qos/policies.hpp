#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qos/model.hpp"

namespace qos {

// One present flow as seen by a policy at the start of a slot.
struct FlowSnapshot {
  FlowConfig config;
  PacketCount q = 0;
  double y = 0.0;
  double z = 0.0;
  std::optional<PacketCount> a_t;  // current-slot arrivals (pi_hat, pi_static)
};

struct PolicyInput {
  std::vector<FlowSnapshot> flows;
  PacketCount s_t = 0;
};

struct FlowDecision {
  int flow_id = 0;
  PacketCount s_alloc = 0;
  PacketCount d_drop = 0;

  bool operator==(const FlowDecision&) const = default;
};

// Decisions are index-aligned with PolicyInput::flows.
struct PolicyOutput {
  std::vector<FlowDecision> flows;

  PacketCount total_allocated() const;
};

// zeta*Z + Q + Y, the service-allocation weight.
double sra_weight(const FlowSnapshot& flow);

// Q + zeta*Z > V*w, strictly.
bool drop_threshold_exceeded(PacketCount q, double z, const FlowConfig& config);

// All of S(t) to the largest weight; ties go to the lowest flow id.
std::vector<PacketCount> sra_allocate(const PolicyInput& input);

PacketCount drop_pi_bar(PacketCount q, double z, const FlowConfig& config);
PacketCount drop_pi_hat(PacketCount q, double z, PacketCount a_t, PacketCount s_t,
                        const FlowConfig& config);

// Static isolation: floor(alpha*S(t)) each, drop A(t) when Q > V*w.
PolicyOutput step_pi_static(const PolicyInput& input);

PolicyOutput step_policy(PolicyKind kind, const PolicyInput& input);

// Decision-dependent part of the drift-plus-penalty bound:
//   sum_i -(zeta Z_i + Q_i + Y_i) S_i + (V w_i - zeta Z_i - Q_i) D_i
double drift_objective(const PolicyInput& input, const PolicyOutput& decision);

struct OracleResult {
  PolicyOutput decision;
  double objective = 0.0;
};

inline constexpr PacketCount kOracleMaxCapacity = 12;
inline constexpr PacketCount kOracleMaxDropCap = 6;
inline constexpr std::size_t kOracleMaxFlows = 3;

// Exhaustive search over every integer allocation with sum <= S(t) and every
// D_i in {0..d_max[i]}. Throws InstanceTooLarge beyond the guards above.
OracleResult oracle_min_drift(const PolicyInput& input,
                              std::span<const PacketCount> d_max);

}  // namespace qos
