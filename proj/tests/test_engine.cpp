#include <doctest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"
#include "qos/arrivals.hpp"
#include "qos/engine.hpp"
#include "qos/report_io.hpp"
#include "qos/scenarios.hpp"

using namespace qos;
using namespace qos::test;

namespace {

std::string trace_of(const ScenarioSpec& spec) {
  std::ostringstream out;
  TraceCsvWriter writer(out, spec);
  run(spec, {}, [&](const SlotTrace& tr) { writer.write(tr); });
  return out.str();
}

void check_conservation(const MetricsReport& r) {
  for (const auto& t : r.totals) {
    CAPTURE(t.flow_id);
    CHECK(t.arrivals == t.served + t.dropped + t.abandoned + t.final_queue);
  }
}

const InvariantStatus& status_of(const MetricsReport& r, int flow, InvariantKind kind) {
  for (const auto& s : r.invariants) {
    if (s.flow_id == flow && s.kind == kind) return s;
  }
  throw std::logic_error("missing status");
}

}  // namespace

TEST_CASE("row 1 under pi_hat meets the guaranteed rates") {
  ExperimentParams p;
  const auto report = run(table_scenario(1, p));
  CHECK(report.violation_count == 0);
  CHECK(report.totals_for(1)->avg_served() == doctest::Approx(10).epsilon(0.02));
  CHECK(report.totals_for(2)->avg_served() == doctest::Approx(40).epsilon(0.02));
  check_conservation(report);
}

TEST_CASE("silent sources leave every queue empty") {
  auto spec = make_spec({bursty_flow(1, 0.3, 1, 1e-12, 10), bursty_flow(2, 0.5, 1, 1e-12, 10)},
                        PolicyKind::kPiHat, 200);
  Simulator sim(spec);
  double y2_expected = 0.0;
  while (!sim.finished()) {
    const auto& tr = sim.step();
    for (const auto& f : tr.flows) {
      REQUIRE(f.q_after == 0);
      REQUIRE(f.dropped == 0);
      REQUIRE(f.d_drop == 0);
    }
    // The argmax picks whichever flow has the larger Y; the other accrues alpha*S.
    const auto* a = tr.find(1);
    const auto* b = tr.find(2);
    REQUIRE(((a->s_alloc == 50 && b->s_alloc == 0) || (a->s_alloc == 0 && b->s_alloc == 50)));
    y2_expected = b->s_alloc == 50 ? 0.0 : y2_expected + 25.0;
    REQUIRE(b->y_after == y2_expected);
  }
}

TEST_CASE("pi_static keeps Z at zero") {
  ExperimentParams p;
  p.policy = PolicyKind::kPiStatic;
  p.horizon = 20000;
  auto spec = table_scenario(3, p, 10);
  Simulator sim(spec);
  while (!sim.finished()) {
    for (const auto& f : sim.step().flows) REQUIRE(f.z_after == 0.0);
  }
  const auto r = sim.report();
  CHECK(r.invariant_applicable(InvariantKind::kPersistentZero));
  CHECK(r.violations_of(InvariantKind::kPersistentZero) == 0);
}

TEST_CASE("wait times count whole slots from arrival to service") {
  SUBCASE("minimum wait is one slot") {
    auto spec = make_spec({constant_flow(1, 1.0, 5)}, PolicyKind::kPiHat, 100);
    const auto r = run(spec);
    const auto& e = r.epochs.at(0).flows.at(0);
    CHECK(e.wait.max() == 1);
    CHECK(e.wait.count() == 5 * 99);
  }
  SUBCASE("held packets age") {
    auto spec = make_spec({constant_flow(1, 1.0, 5)}, PolicyKind::kPiHat, 7);
    spec.channel.kind = ChannelKind::kSequence;
    spec.channel.s_min = 0;
    spec.channel.values = {0, 0, 0, 0, 0, 0, 50};
    const auto r = run(spec);
    const auto& e = r.epochs.at(0).flows.at(0);
    // Batches from slots 1..6 are all served in slot 7.
    CHECK(e.wait.count() == 30);
    CHECK(e.wait.max() == 6);
    CHECK(e.wait.mean() == doctest::Approx(3.5));
  }
  SUBCASE("arrival in slot 5, service in slot 7") {
    auto spec = make_spec({constant_flow(1, 1.0, 5)}, PolicyKind::kPiHat, 7);
    spec.channel.kind = ChannelKind::kSequence;
    spec.channel.s_min = 0;
    spec.channel.values = {0, 0, 0, 0, 20, 0, 10};
    Simulator sim(spec);
    while (!sim.finished()) sim.step();
    // Slot 5 clears slots 1..4; slot 7 serves slots 5 and 6.
    const auto r = sim.report();
    const auto& e = r.epochs.at(0).flows.at(0);
    CHECK(e.wait.max() == 4);
    CHECK(e.served == 30);
    CHECK(e.wait.percentile(1.0) == 4);
  }
}

TEST_CASE("dropped packets can be included in wait statistics") {
  auto spec = make_spec({constant_flow(1, 1.0, 20, 10)}, PolicyKind::kPiHat, 300, 10);
  const auto without = run(spec);
  spec.wait_includes_dropped = true;
  const auto with = run(spec);
  CHECK(with.epochs[0].flows[0].wait.count() > without.epochs[0].flows[0].wait.count());
}

TEST_CASE("conservation holds across policies, disciplines and membership changes") {
  for (auto policy : {PolicyKind::kPiBar, PolicyKind::kPiHat, PolicyKind::kPiStatic}) {
    for (auto disc : {DropDiscipline::kHead, DropDiscipline::kTail}) {
      ExperimentParams p;
      p.policy = policy;
      p.v = 100;
      auto spec = bursty_join_leave(p);
      spec.drop_discipline = disc;
      const auto r = run(spec);
      check_conservation(r);
      CHECK(r.totals_for(1)->abandoned > 0);
    }
  }
}

TEST_CASE("per-slot conservation in the trace") {
  ExperimentParams p;
  p.v = 50;
  p.horizon = 5000;
  run(table_scenario(2, p), {}, [](const SlotTrace& tr) {
    for (const auto& f : tr.flows) {
      REQUIRE(f.q_after == f.q_before - f.served - f.dropped + f.a_t);
      REQUIRE(f.served == std::min(f.q_before, f.s_alloc));
      REQUIRE(f.dropped == std::min(f.q_before - f.served, f.d_drop));
    }
  });
}

TEST_CASE("identical specs give identical traces") {
  ExperimentParams p;
  p.horizon = 20000;
  p.feedback_delay = 25;
  const auto spec = closed_loop_pair(p);
  CHECK(trace_of(spec) == trace_of(spec));
  auto other = spec;
  other.seed = 2;
  CHECK(trace_of(spec) != trace_of(other));
}

TEST_CASE("corrupted Z is reported at the slot it happens") {
  ExperimentParams p;
  p.horizon = 2000;
  const auto spec = table_scenario(1, p);

  SUBCASE("injection hook") {
    RunOptions opts;
    opts.inject_z_fault = 777;
    const auto r = run(spec, opts);
    REQUIRE(r.violation_count > 0);
    CHECK(r.violations.front().t == 777);
    CHECK(r.violations.front().kind == InvariantKind::kPersistentBound);
  }
  SUBCASE("direct state access") {
    Simulator sim(spec);
    while (sim.next_slot() <= 500) sim.step();
    sim.state(2).z += 1e6;
    const auto checks = check_invariants(500, spec.flows[1], sim.state(2),
                                         plan_invariants(spec, spec.flows[1]));
    CHECK_FALSE(checks.empty());
    sim.step();
    const auto r = sim.report();
    REQUIRE(r.violation_count > 0);
    CHECK(r.violations.front().t == 501);
    CHECK(r.violations.front().flow_id == 2);
  }
  SUBCASE("strict mode throws") {
    RunOptions opts;
    opts.inject_z_fault = 10;
    opts.strict = true;
    try {
      run(spec, opts);
      FAIL("expected BoundViolationError");
    } catch (const BoundViolationError& e) {
      CHECK(e.violation().t == 10);
      CHECK(e.kind() == ErrorKind::kBoundViolation);
    }
  }
}

TEST_CASE("closed-loop sources mark A^max-dependent checks not applicable") {
  ExperimentParams p;
  p.horizon = 3000;
  const auto r = run(closed_loop_pair(p));
  const auto& q = status_of(r, 1, InvariantKind::kQueueBound);
  CHECK_FALSE(q.applicable);
  CHECK(q.reason.find("A^max") != std::string::npos);
  CHECK_FALSE(status_of(r, 1, InvariantKind::kCombinedBound).applicable);
  CHECK_FALSE(status_of(r, 1, InvariantKind::kDelayBound).applicable);
  CHECK(status_of(r, 1, InvariantKind::kPersistentBound).applicable);
}

TEST_CASE("delay checks require head-drop and a positive S^min") {
  ExperimentParams p;
  p.horizon = 1000;
  auto spec = table_scenario(1, p);
  spec.drop_discipline = DropDiscipline::kTail;
  CHECK_FALSE(plan_invariants(spec, spec.flows[0]).at(InvariantKind::kDelayBound).applicable);
  spec.drop_discipline = DropDiscipline::kHead;
  spec.channel.kind = ChannelKind::kSeededRandom;
  spec.channel.s_min = 0;
  CHECK_FALSE(plan_invariants(spec, spec.flows[0]).at(InvariantKind::kDelayBound).applicable);
  spec.channel.s_min = 40;
  CHECK(plan_invariants(spec, spec.flows[0]).at(InvariantKind::kDelayBound).applicable);
}

TEST_CASE("pi_static with fractional shares disables the zero check") {
  auto spec = make_spec({bursty_flow(1, 0.25, 1, 10, 100)}, PolicyKind::kPiStatic, 1000);
  const auto plan = plan_invariants(spec, spec.flows[0]);
  CHECK_FALSE(plan.at(InvariantKind::kPersistentZero).applicable);
  CHECK(plan.at(InvariantKind::kQueueBound).applicable);
  const auto r = run(spec);
  CHECK(r.violation_count == 0);
}

TEST_CASE("epochs reset at join and leave slots") {
  ExperimentParams p;
  const auto r = run(bursty_join_leave(p));
  REQUIRE(r.epochs.size() == 3);
  CHECK(r.epochs[0].start == 1);
  CHECK(r.epochs[0].end == 30000);
  CHECK(r.epochs[1].start == 30000);
  CHECK(r.epochs[1].end == 70000);
  CHECK(r.epochs[2].start == 70000);
  CHECK(r.epochs[2].end == 100001);
  CHECK(r.epochs[0].flows.size() == 1);
  CHECK(r.epochs[1].flows.size() == 2);
  CHECK(r.epochs[2].flows.size() == 1);
  CHECK(r.epochs[2].flows[0].flow_id == 2);
  CHECK(r.epochs[1].find(1)->slots == 40000);
  CHECK(r.violation_count == 0);
}

TEST_CASE("trace averages follow the epoch") {
  ExperimentParams p;
  p.horizon = 40000;
  auto spec = bursty_join_leave(p);
  spec.flows[0].leave_slot.reset();
  Simulator sim(spec);
  double f1_served = 0;
  Slot f1_slots = 0;
  while (!sim.finished()) {
    const auto& tr = sim.step();
    if (tr.t == kSecondFlowJoin) {
      f1_served = 0;
      f1_slots = 0;
    }
    const auto* f = tr.find(1);
    f1_served += static_cast<double>(f->served);
    ++f1_slots;
    REQUIRE(f->avg_served == doctest::Approx(f1_served / static_cast<double>(f1_slots)));
  }
}

TEST_CASE("zero-delay feedback reaches the next draw") {
  auto spec = make_spec({aimd_flow(1, 1.0)}, PolicyKind::kPiHat, 50);
  Simulator sim(spec);
  const auto first = sim.step().flows[0];
  CHECK(first.lambda == 1.0);
  const double expected = aimd_step(1.0, first.served, first.d_drop > 0 ? 1 : 0);
  CHECK(sim.step().flows[0].lambda == doctest::Approx(expected));
}

TEST_CASE("per-packet NACKs collapse the rate harder") {
  ExperimentParams p;
  p.horizon = 20000;
  p.v = 100;
  auto spec = closed_loop_pair(p);
  const auto event = run(spec);
  spec.nack_mode = NackMode::kPerPacket;
  const auto packet = run(spec);
  CHECK(packet.totals_for(2)->arrivals < event.totals_for(2)->arrivals);
}

TEST_CASE("random valid specs run without internal failures") {
  Rng rng = make_rng(99, 0);
  std::uniform_int_distribution<int> n_flows(0, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> small(1, 6);
  std::uniform_int_distribution<int> policy(0, 2);
  int ran = 0;
  for (int trial = 0; trial < 300; ++trial) {
    ScenarioSpec spec;
    spec.horizon = 400;
    spec.seed = static_cast<std::uint64_t>(trial);
    spec.policy = static_cast<PolicyKind>(policy(rng));
    spec.drop_discipline = unit(rng) < 0.5 ? DropDiscipline::kHead : DropDiscipline::kTail;
    spec.nack_mode = unit(rng) < 0.5 ? NackMode::kPerDecision : NackMode::kPerPacket;
    spec.feedback_delay = small(rng) * 3;
    spec.channel.s_max = small(rng) * 10;
    const int kind = small(rng) % 3;
    spec.channel.kind = static_cast<ChannelKind>(kind);
    spec.channel.s_min = kind == 0 ? spec.channel.s_max : spec.channel.s_max / small(rng);
    if (kind == 1) {
      for (int i = 0; i < small(rng); ++i) {
        spec.channel.values.push_back(spec.channel.s_min +
                                      static_cast<PacketCount>(unit(rng) *
                                          static_cast<double>(spec.channel.s_max - spec.channel.s_min)));
      }
    }
    double budget = 1.0;
    const int n = n_flows(rng);
    for (int i = 0; i < n; ++i) {
      FlowConfig f;
      f.id = i;
      f.alpha = budget * unit(rng);
      budget -= f.alpha;
      f.weight = unit(rng);
      f.zeta = 0.25 + 4 * unit(rng);
      f.v_param = 200 * unit(rng);
      if (spec.policy != PolicyKind::kPiBar && unit(rng) < 0.3) {
        f.source = AimdSourceSpec{};
      } else {
        f.source = BurstySourceSpec{small(rng), 0.5 + 10 * unit(rng), small(rng) * 5};
        const PacketCount a_max = *f.effective_a_max();
        f.drop_cap = std::max(a_max, ceil_share(f.alpha, spec.channel.s_max)) + small(rng) - 1;
      }
      f.join_slot = 1 + static_cast<Slot>(unit(rng) * 150);
      if (unit(rng) < 0.5) f.leave_slot = f.join_slot + 1 + static_cast<Slot>(unit(rng) * 200);
      spec.flows.push_back(f);
    }
    if (!check_scenario(spec).empty()) continue;
    ++ran;
    CAPTURE(trial);
    MetricsReport r;
    REQUIRE_NOTHROW(r = run(spec));
    check_conservation(r);
    CHECK(r.violation_count == 0);
  }
  CHECK(ran > 200);
}
