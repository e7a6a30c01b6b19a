#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "qos/model.hpp"

namespace qos {

enum class BoundKind {
  kQueue,          // Q <= V w + A^max
  kPersistent,     // Z <= V w / zeta + zeta alpha S^max
  kCombined,       // zeta Z + Q <= V w + zeta^2 alpha S^max + A^max
  kVirtual,        // Y <= n (V + zeta^2 S^max + max A^max) + (n + 1) S^max
  kDelayPiHat,     // worst-case wait under pi_hat
  kDelayPiStatic,  // worst-case wait under pi_static
};

std::string_view to_string(BoundKind kind);

struct BoundParams {
  double v = 0.0;
  double weight = 1.0;
  double zeta = 1.0;
  double alpha = 0.0;
  std::size_t n = 1;
  PacketCount s_max = 0;
  PacketCount s_min = 0;
  std::optional<PacketCount> a_max;      // this flow
  std::optional<PacketCount> max_a_max;  // over all flows
};

// Bounds that are undefined for the given parameters (unknown A^max, S^min = 0
// for the delay bounds) are left empty.
struct BoundSet {
  std::optional<double> q_bound;
  std::optional<double> z_bound;
  std::optional<double> qz_bound;
  std::optional<double> y_bound;
  std::optional<double> delay_bound_pi_hat;
  std::optional<double> delay_bound_pi_static;

  std::optional<double> get(BoundKind kind) const;
  // Throws UndefinedBound when the bound is not defined.
  double require(BoundKind kind) const;
};

BoundSet compute_bounds(const BoundParams& params);

// Bound parameters for one flow of a scenario (n and max A^max taken over
// every flow of the scenario).
BoundParams bound_params_for(const ScenarioSpec& spec, const FlowConfig& flow);

struct DriftConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

// C1 = n (S^max)^2 + sum_i (A^max_i + S^max + D^max_i)^2 / 2
// C2 = sum_i (S^max + D^max_i)^2
// Throws UndefinedBound when any A^max or D^max is unknown.
DriftConstants drift_constants(std::span<const FlowConfig> flows, PacketCount s_max);

}  // namespace qos
