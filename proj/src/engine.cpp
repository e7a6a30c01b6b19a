#include "qos/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <set>
#include <stdexcept>

namespace qos {

BoundViolationError::BoundViolationError(const BoundViolation& v)
    : QosError(ErrorKind::kBoundViolation,
               fmt::format("slot {}: flow {} violates {} ({} > {})", v.t, v.flow_id,
                           to_string(v.kind), v.observed, v.bound)),
      violation_(v) {}

namespace {

constexpr std::uint64_t kChannelStream = 0;

bool shares_integral(const ScenarioSpec& spec, const FlowConfig& flow) {
  for (PacketCount s : spec.channel.support()) {
    const double share = service_share(flow.alpha, s);
    if (share != std::floor(share)) return false;
  }
  return true;
}

void set_entry(InvariantPlan& plan, InvariantKind kind, std::optional<double> bound,
               std::string missing_reason) {
  auto& e = plan.at(kind);
  if (bound) {
    e.applicable = true;
    e.bound = *bound;
  } else {
    e.reason = std::move(missing_reason);
  }
}

}  // namespace

InvariantPlan plan_invariants(const ScenarioSpec& spec, const FlowConfig& flow) {
  InvariantPlan plan;
  plan.bounds = compute_bounds(bound_params_for(spec, flow));
  const BoundSet& b = plan.bounds;
  const bool is_static = spec.policy == PolicyKind::kPiStatic;
  const bool integral = shares_integral(spec, flow);
  const char* no_a_max = "A^max unknown for this source";
  const char* fractional = "alpha*S(t) is fractional for some channel value";

  set_entry(plan, InvariantKind::kQueueBound, b.q_bound, no_a_max);

  if (is_static && !integral) {
    for (auto kind : {InvariantKind::kPersistentBound, InvariantKind::kCombinedBound,
                      InvariantKind::kVirtualBound, InvariantKind::kPersistentZero}) {
      plan.at(kind).reason = fractional;
    }
  } else {
    set_entry(plan, InvariantKind::kPersistentBound, b.z_bound, "");
    set_entry(plan, InvariantKind::kCombinedBound, b.qz_bound, no_a_max);
    set_entry(plan, InvariantKind::kVirtualBound, b.y_bound,
              "A^max unknown for some flow of the scenario");
    if (is_static) {
      set_entry(plan, InvariantKind::kPersistentZero, 0.0, "");
    } else {
      plan.at(InvariantKind::kPersistentZero).reason = "only asserted under pi_static";
    }
  }

  auto& delay = plan.at(InvariantKind::kDelayBound);
  if (spec.policy == PolicyKind::kPiBar) {
    delay.reason = "no delay bound stated for pi_bar";
  } else if (spec.drop_discipline != DropDiscipline::kHead) {
    delay.reason = "delay bound requires head-drop";
  } else if (is_static && !integral) {
    delay.reason = fractional;
  } else {
    const auto bound = is_static ? b.delay_bound_pi_static : b.delay_bound_pi_hat;
    set_entry(plan, InvariantKind::kDelayBound, bound,
              "delay bound needs S^min > 0, alpha > 0 and a known A^max");
  }
  return plan;
}

std::vector<BoundViolation> check_invariants(Slot t, const FlowConfig& flow,
                                             const FlowState& state,
                                             const InvariantPlan& plan) {
  std::vector<BoundViolation> out;
  auto check = [&](InvariantKind kind, double observed) {
    const auto& e = plan.at(kind);
    if (e.applicable && observed > e.bound) out.push_back({t, flow.id, kind, observed, e.bound});
  };
  const double q = static_cast<double>(state.q());
  check(InvariantKind::kQueueBound, q);
  check(InvariantKind::kPersistentBound, state.z);
  check(InvariantKind::kCombinedBound, flow.zeta * state.z + q);
  check(InvariantKind::kVirtualBound, state.y);
  check(InvariantKind::kPersistentZero, state.z);
  return out;
}

struct Simulator::Impl {
  struct Flow {
    const FlowConfig* config = nullptr;
    FlowState state;
    std::optional<ArrivalSource> source;
    InvariantPlan plan;
    FlowEpochMetrics epoch;
    bool in_epoch = false;
    FlowTotals totals;
    std::array<std::uint64_t, std::size(kAllInvariants)> checks{};
    std::array<std::uint64_t, std::size(kAllInvariants)> violations{};
  };

  ScenarioSpec spec;
  RunOptions options;
  ChannelSampler channel;
  std::vector<Flow> flows;
  std::set<Slot> boundaries;
  Slot next = 1;
  Slot epoch_start = 1;
  PacketCount epoch_capacity = 0;
  PacketCount capacity_total = 0;
  std::vector<EpochMetrics> closed_epochs;
  std::vector<BoundViolation> violation_log;
  std::uint64_t violation_count = 0;
  PolicyInput input;
  SlotTrace trace;

  Impl(ScenarioSpec s, RunOptions o)
      : spec(validate_scenario(std::move(s))),
        options(o),
        channel(spec.channel, make_rng(spec.seed, kChannelStream)) {
    flows.resize(spec.flows.size());
    for (std::size_t i = 0; i < flows.size(); ++i) {
      const FlowConfig& cfg = spec.flows[i];
      flows[i].config = &cfg;
      flows[i].plan = plan_invariants(spec, cfg);
      flows[i].totals.flow_id = cfg.id;
      if (cfg.join_slot > 1) boundaries.insert(cfg.join_slot);
      if (cfg.leave_slot && *cfg.leave_slot <= spec.horizon) boundaries.insert(*cfg.leave_slot);
    }
  }

  Flow& flow_by_id(int id) {
    for (auto& f : flows) {
      if (f.config->id == id) return f;
    }
    throw std::out_of_range(fmt::format("no flow with id {}", id));
  }

  EpochMetrics epoch_snapshot(Slot end) const {
    EpochMetrics e;
    e.start = epoch_start;
    e.end = end;
    e.capacity_total = epoch_capacity;
    for (const auto& f : flows) {
      if (f.in_epoch) e.flows.push_back(f.epoch);
    }
    return e;
  }

  void record_violation(const BoundViolation& v) {
    ++violation_count;
    ++flow_by_id(v.flow_id).violations[static_cast<std::size_t>(v.kind)];
    if (violation_log.size() < options.max_logged_violations) violation_log.push_back(v);
    if (options.strict) throw BoundViolationError(v);
  }

  void handle_membership(Slot t) {
    const bool boundary = boundaries.count(t) > 0;
    if (boundary) {
      closed_epochs.push_back(epoch_snapshot(t));
      epoch_start = t;
      epoch_capacity = 0;
    }
    for (std::size_t i = 0; i < flows.size(); ++i) {
      Flow& f = flows[i];
      const FlowConfig& cfg = *f.config;
      if (cfg.leave_slot && *cfg.leave_slot == t && f.state.present) {
        f.totals.abandoned += f.state.queue.clear();
        f.state.present = false;
        f.source.reset();
      }
      if (cfg.join_slot == t) {
        f.state = FlowState{};
        f.state.present = true;
        f.source.emplace(cfg.source, make_rng(spec.seed, static_cast<std::uint64_t>(cfg.id) + 1),
                         spec.feedback_delay);
      }
      if (boundary || t == 1) {
        f.in_epoch = f.state.present;
        f.epoch = FlowEpochMetrics{};
        f.epoch.flow_id = cfg.id;
      }
    }
  }

  const SlotTrace& step() {
    if (next > spec.horizon) throw std::logic_error("simulation already finished");
    const Slot t = next;
    handle_membership(t);

    const PacketCount s_t = channel.next(t);
    capacity_total += s_t;
    epoch_capacity += s_t;

    std::vector<Flow*> present;
    input.flows.clear();
    input.s_t = s_t;
    trace.t = t;
    trace.s_t = s_t;
    trace.flows.clear();
    for (auto& f : flows) {
      if (!f.state.present) continue;
      present.push_back(&f);
      FlowSlotRecord rec;
      rec.flow_id = f.config->id;
      if (f.source->closed_loop()) rec.lambda = f.source->lambda();
      rec.a_t = f.source->draw();
      rec.q_before = f.state.q();
      trace.flows.push_back(rec);
      input.flows.push_back({*f.config, f.state.q(), f.state.y, f.state.z, rec.a_t});
    }

    const PolicyOutput decision = step_policy(spec.policy, input);
    if (decision.flows.size() != present.size() || decision.total_allocated() > s_t) {
      throw std::logic_error(fmt::format("slot {}: infeasible policy output", t));
    }

    for (std::size_t i = 0; i < present.size(); ++i) {
      Flow& f = *present[i];
      const FlowConfig& cfg = *f.config;
      FlowSlotRecord& rec = trace.flows[i];
      const FlowDecision& d = decision.flows[i];
      rec.s_alloc = d.s_alloc;
      rec.d_drop = d.d_drop;
      const bool backlogged = rec.q_before > 0;

      Slot slot_max_wait = -1;
      auto record_wait = [&](Slot arrival, PacketCount n) {
        const Slot wait = t - arrival;
        f.epoch.wait.record(wait, n);
        slot_max_wait = std::max(slot_max_wait, wait);
      };
      rec.served = f.state.queue.pop_front(std::min(rec.q_before, d.s_alloc), record_wait);
      const PacketCount drop_target = std::min(rec.q_before - rec.served, d.d_drop);
      if (spec.drop_discipline == DropDiscipline::kTail) {
        rec.dropped = f.state.queue.pop_back(drop_target);
      } else if (spec.wait_includes_dropped) {
        rec.dropped = f.state.queue.pop_front(drop_target, record_wait);
      } else {
        rec.dropped = f.state.queue.pop_front(drop_target);
      }
      f.state.queue.push(t, rec.a_t);

      f.state.y = update_virtual_queue(f.state.y, cfg.alpha, s_t, d.s_alloc);
      f.state.z = update_persistent_queue(f.state.z, cfg.zeta, cfg.alpha, s_t, backlogged,
                                          d.s_alloc, d.d_drop);
      if (options.inject_z_fault && *options.inject_z_fault == t) f.state.z += kInjectedZFault;

      const PacketCount nacks = spec.nack_mode == NackMode::kPerPacket ? rec.dropped
                                                                       : (d.d_drop > 0 ? 1 : 0);
      f.source->deliver(t, rec.served, nacks);

      rec.q_after = f.state.q();
      rec.y_after = f.state.y;
      rec.z_after = f.state.z;

      FlowEpochMetrics& e = f.epoch;
      ++e.slots;
      e.arrivals += rec.a_t;
      e.allocated += d.s_alloc;
      e.served += rec.served;
      e.dropped += rec.dropped;
      e.drop_decisions += d.d_drop;
      e.weighted_drop_decisions += cfg.weight * static_cast<double>(d.d_drop);
      e.weighted_drops += cfg.weight * static_cast<double>(rec.dropped);
      e.queue.add(static_cast<double>(rec.q_before));
      e.q_end = rec.q_after;
      e.y_end = rec.y_after;
      e.z_end = rec.z_after;
      rec.avg_arrival = e.avg_arrival();
      rec.avg_served = e.avg_served();
      rec.avg_weighted_drop_decision = e.avg_weighted_drop_decision();
      rec.avg_weighted_drop = e.avg_weighted_drop();

      FlowTotals& tot = f.totals;
      ++tot.slots_present;
      tot.arrivals += rec.a_t;
      tot.served += rec.served;
      tot.dropped += rec.dropped;
      tot.weighted_drop_decisions += cfg.weight * static_cast<double>(d.d_drop);
      tot.weighted_drops += cfg.weight * static_cast<double>(rec.dropped);
      tot.capacity_total += s_t;
      tot.y_final = f.state.y;
      tot.z_final = f.state.z;
      tot.max_wait = std::max(tot.max_wait, std::max<Slot>(slot_max_wait, 0));

      if (options.check_invariants) {
        for (auto kind : kAllInvariants) {
          if (kind != InvariantKind::kDelayBound && f.plan.at(kind).applicable) {
            ++f.checks[static_cast<std::size_t>(kind)];
          }
        }
        for (const auto& v : check_invariants(t, cfg, f.state, f.plan)) record_violation(v);
        const auto& delay = f.plan.at(InvariantKind::kDelayBound);
        if (delay.applicable && slot_max_wait >= 0) {
          ++f.checks[static_cast<std::size_t>(InvariantKind::kDelayBound)];
          if (static_cast<double>(slot_max_wait) > delay.bound) {
            record_violation({t, cfg.id, InvariantKind::kDelayBound,
                              static_cast<double>(slot_max_wait), delay.bound});
          }
        }
      }
    }
    ++next;
    return trace;
  }

  MetricsReport report() const {
    MetricsReport r;
    r.policy = spec.policy;
    r.horizon = next - 1;
    r.capacity_total = capacity_total;
    r.epochs = closed_epochs;
    if (next > epoch_start) r.epochs.push_back(epoch_snapshot(next));
    for (const auto& f : flows) {
      FlowTotals tot = f.totals;
      tot.final_queue = f.state.present ? f.state.q() : 0;
      r.totals.push_back(tot);
      r.theoretical_bounds.push_back({f.config->id, f.plan.bounds});
      for (auto kind : kAllInvariants) {
        const auto idx = static_cast<std::size_t>(kind);
        const auto& e = f.plan.at(kind);
        InvariantStatus s;
        s.flow_id = f.config->id;
        s.kind = kind;
        s.applicable = options.check_invariants && e.applicable;
        s.reason = options.check_invariants ? e.reason : "invariant checking disabled";
        s.checks = f.checks[idx];
        s.violations = f.violations[idx];
        r.invariants.push_back(std::move(s));
      }
    }
    r.violations = violation_log;
    r.violation_count = violation_count;
    return r;
  }
};

Simulator::Simulator(ScenarioSpec spec, RunOptions options)
    : impl_(std::make_unique<Impl>(std::move(spec), options)) {}
Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

bool Simulator::finished() const { return impl_->next > impl_->spec.horizon; }
Slot Simulator::next_slot() const { return impl_->next; }
const SlotTrace& Simulator::step() { return impl_->step(); }

void Simulator::run_to_end(const TraceSink& sink) {
  while (!finished()) {
    const SlotTrace& tr = impl_->step();
    if (sink) sink(tr);
  }
}

MetricsReport Simulator::report() const { return impl_->report(); }
const ScenarioSpec& Simulator::spec() const { return impl_->spec; }
const FlowState& Simulator::state(int flow_id) const { return impl_->flow_by_id(flow_id).state; }
FlowState& Simulator::state(int flow_id) { return impl_->flow_by_id(flow_id).state; }
const PolicyInput& Simulator::last_policy_input() const { return impl_->input; }

MetricsReport run(const ScenarioSpec& spec, const RunOptions& options, const TraceSink& sink) {
  Simulator sim(spec, options);
  sim.run_to_end(sink);
  return sim.report();
}

}  // namespace qos
