#include <doctest.h>

#include <set>

#include "qos/presets.hpp"

using namespace qos;

namespace {

Preset shortened(const std::string& name, Slot horizon) {
  Preset p = expand_preset(name, 3);
  for (auto& point : p.points) {
    point.spec.horizon = horizon;
    for (auto& f : point.spec.flows) {
      if (f.join_slot > 1) f.join_slot = horizon / 3;
      if (f.leave_slot) f.leave_slot = 2 * horizon / 3;
    }
  }
  return p;
}

}  // namespace

TEST_CASE("preset expansion") {
  CHECK(expand_preset("zeta_sweep", 1).points.size() == 16);
  CHECK(expand_preset("policy_compare_v_sweep", 1).points.size() == 14);
  CHECK(expand_preset("isolation_bursty", 1).points.size() == 4);
  CHECK(expand_preset("join_leave", 1).points.size() == 2);
  CHECK(expand_preset("feedback_delay_sweep", 1).points.size() == 20);
  const auto snap = expand_preset("feedback_snapshot", 1);
  CHECK(snap.points.size() == 3);
  CHECK(snap.periodicity);
  CHECK(snap.default_thin == 1);
  CHECK_THROWS_AS(expand_preset("nope", 1), std::invalid_argument);

  for (const auto& name : preset_names()) {
    const auto p = expand_preset(name, 9);
    std::set<std::string> labels;
    for (const auto& point : p.points) {
      CHECK(labels.insert(point.label).second);
      CHECK(point.spec.seed == 9);
      CHECK(check_scenario(point.spec).empty());
      CHECK(point.keys.size() == p.points.front().keys.size());
    }
  }
}

TEST_CASE("experiment defaults") {
  const auto p = expand_preset("zeta_sweep", 1);
  CHECK(p.points.front().spec.horizon == 100000);
  CHECK(p.points.front().spec.channel.s_max == 50);
  CHECK(p.points.back().spec.flows[0].zeta == 31);
  CHECK(p.points.front().spec.flows[0].v_param == 1000);
}

TEST_CASE("aggregate CSV is stable across runs and parallelism") {
  const Preset p = shortened("join_leave", 3000);
  const auto a = run_points(p, 0, 1);
  const auto b = run_points(p, 0, 2);
  CHECK(aggregate_csv(p, a) == aggregate_csv(p, b));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].trace_csv == b[i].trace_csv);
  const std::string agg = aggregate_csv(p, a);
  CHECK(agg.rfind("preset,policy,seed,epoch_start,epoch_end,flow_id,", 0) == 0);
  // Two points x (1 + 2 + 1) epoch-flow rows plus the header.
  CHECK(std::count(agg.begin(), agg.end(), '\n') == 9);
}

TEST_CASE("snapshot preset emits periodicity rows") {
  const Preset p = shortened("feedback_snapshot", 3000);
  const auto results = run_points(p, 0, 1);
  const std::string csv = periodicity_csv(p, results);
  CHECK(csv.rfind("preset,d,seed,flow_id,phase_start,phase_end,peak_lag,peak_acf\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 2);
}
