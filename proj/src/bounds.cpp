#include "qos/bounds.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace qos {

std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::kQueue: return "q_bound";
    case BoundKind::kPersistent: return "z_bound";
    case BoundKind::kCombined: return "qz_bound";
    case BoundKind::kVirtual: return "y_bound";
    case BoundKind::kDelayPiHat: return "delay_bound_pi_hat";
    case BoundKind::kDelayPiStatic: return "delay_bound_pi_static";
  }
  return "unknown";
}

std::optional<double> BoundSet::get(BoundKind kind) const {
  switch (kind) {
    case BoundKind::kQueue: return q_bound;
    case BoundKind::kPersistent: return z_bound;
    case BoundKind::kCombined: return qz_bound;
    case BoundKind::kVirtual: return y_bound;
    case BoundKind::kDelayPiHat: return delay_bound_pi_hat;
    case BoundKind::kDelayPiStatic: return delay_bound_pi_static;
  }
  return std::nullopt;
}

double BoundSet::require(BoundKind kind) const {
  const auto value = get(kind);
  if (!value) {
    throw QosError(ErrorKind::kUndefinedBound,
                   fmt::format("{} is undefined for these parameters", to_string(kind)));
  }
  return *value;
}

BoundSet compute_bounds(const BoundParams& p) {
  const double vw = p.v * p.weight;
  const double s_max = static_cast<double>(p.s_max);
  const double s_min = static_cast<double>(p.s_min);
  const double zeta2 = p.zeta * p.zeta;
  const double n = static_cast<double>(p.n);

  BoundSet b;
  b.z_bound = vw / p.zeta + p.zeta * p.alpha * s_max;
  if (p.a_max) {
    const double a = static_cast<double>(*p.a_max);
    b.q_bound = vw + a;
    b.qz_bound = vw + zeta2 * p.alpha * s_max + a;
    if (p.s_min > 0 && p.alpha > 0.0) {
      const double rate = p.alpha * s_min;
      b.delay_bound_pi_hat = s_max / s_min + (1.0 + 1.0 / zeta2) * vw / rate + a / rate;
      b.delay_bound_pi_static = 1.0 + vw / rate + a / rate;
    }
  }
  if (p.max_a_max) {
    const double a = static_cast<double>(*p.max_a_max);
    b.y_bound = n * (p.v + zeta2 * s_max + a) + (n + 1.0) * s_max;
  }
  return b;
}

BoundParams bound_params_for(const ScenarioSpec& spec, const FlowConfig& flow) {
  BoundParams p;
  p.v = flow.v_param;
  p.weight = flow.weight;
  p.zeta = flow.zeta;
  p.alpha = flow.alpha;
  p.n = spec.flows.size();
  p.s_max = spec.channel.s_max;
  p.s_min = spec.channel.s_min;
  p.a_max = flow.effective_a_max();

  PacketCount largest = 0;
  bool all_known = true;
  for (const auto& f : spec.flows) {
    const auto a = f.effective_a_max();
    if (!a) {
      all_known = false;
      break;
    }
    largest = std::max(largest, *a);
  }
  if (all_known) p.max_a_max = largest;
  return p;
}

DriftConstants drift_constants(std::span<const FlowConfig> flows, PacketCount s_max) {
  DriftConstants out;
  const double s = static_cast<double>(s_max);
  out.c1 = static_cast<double>(flows.size()) * s * s;
  for (const auto& f : flows) {
    const auto a_max = f.effective_a_max();
    if (!a_max || !f.drop_cap) {
      throw QosError(ErrorKind::kUndefinedBound,
                     fmt::format("flow {} lacks A^max or D^max", f.id));
    }
    const double a = static_cast<double>(*a_max);
    const double d = static_cast<double>(*f.drop_cap);
    out.c1 += (a + s + d) * (a + s + d) / 2.0;
    out.c2 += (s + d) * (s + d);
  }
  return out;
}

}  // namespace qos
