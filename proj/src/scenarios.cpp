#include "qos/scenarios.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <stdexcept>

namespace qos {

namespace {

ScenarioSpec base(const ExperimentParams& p) {
  ScenarioSpec spec;
  spec.channel.kind = ChannelKind::kConstant;
  spec.channel.s_max = p.capacity;
  spec.channel.s_min = p.capacity;
  spec.policy = p.policy;
  spec.horizon = p.horizon;
  spec.seed = p.seed;
  spec.feedback_delay = p.feedback_delay;
  return spec;
}

FlowConfig flow(int id, double alpha, SourceSpec source, const ExperimentParams& p) {
  FlowConfig f;
  f.id = id;
  f.alpha = alpha;
  f.weight = p.weight;
  f.zeta = p.zeta;
  f.v_param = p.v;
  f.source = source;
  if (const auto* b = std::get_if<BurstySourceSpec>(&source)) {
    f.a_max = b->max_arrivals();
    if (p.policy == PolicyKind::kPiBar) {
      f.drop_cap = std::max(*f.a_max, ceil_share(alpha, p.capacity));
    }
  }
  return f;
}

BurstySourceSpec bursty(PacketCount eta, double lambda, PacketCount nu) {
  return BurstySourceSpec{eta, lambda, nu};
}

}  // namespace

ScenarioSpec table_scenario(int row, const ExperimentParams& p, PacketCount eta) {
  ScenarioSpec spec = base(p);
  switch (row) {
    case 1:
      spec.flows = {flow(1, 0.2, bursty(1, 10, 300), p), flow(2, 0.8, bursty(1, 40, 300), p)};
      break;
    case 2:
      spec.flows = {flow(1, 0.2, bursty(1, 30, 300), p), flow(2, 0.4, bursty(1, 70, 300), p)};
      break;
    case 3: {
      if (eta < 1 || 300 % eta != 0) {
        throw std::invalid_argument(fmt::format("eta must divide 300 (got {})", eta));
      }
      const double e = static_cast<double>(eta);
      spec.flows = {flow(1, 0.2, bursty(eta, 10.0 / e, 300 / eta), p),
                    flow(2, 0.6, bursty(eta, 30.0 / e, 300 / eta), p)};
      break;
    }
    default:
      throw std::invalid_argument(fmt::format("no table row {}", row));
  }
  return spec;
}

ScenarioSpec bursty_join_leave(const ExperimentParams& p) {
  ScenarioSpec spec = base(p);
  FlowConfig f1 = flow(1, 0.2, bursty(1, 20, 300), p);
  FlowConfig f2 = flow(2, 0.6, bursty(1, 20, 300), p);
  f1.leave_slot = kFirstFlowLeave;
  f2.join_slot = kSecondFlowJoin;
  spec.flows = {f1, f2};
  return spec;
}

ScenarioSpec closed_loop_join_leave(const ExperimentParams& p) {
  ScenarioSpec spec = base(p);
  FlowConfig f1 = flow(1, 0.2, AimdSourceSpec{}, p);
  FlowConfig f2 = flow(2, 0.6, AimdSourceSpec{}, p);
  f1.leave_slot = kFirstFlowLeave;
  f2.join_slot = kSecondFlowJoin;
  spec.flows = {f1, f2};
  return spec;
}

ScenarioSpec closed_loop_pair(const ExperimentParams& p) {
  ScenarioSpec spec = base(p);
  spec.flows = {flow(1, 0.2, AimdSourceSpec{}, p), flow(2, 0.6, AimdSourceSpec{}, p)};
  return spec;
}

}  // namespace qos
