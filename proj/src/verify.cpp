#include "qos/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <random>
#include <set>

#include "qos/arrivals.hpp"
#include "qos/engine.hpp"
#include "qos/policies.hpp"

namespace qos {

namespace {

constexpr std::uint64_t kVerifyStream = 0x7665726966ULL;

std::string_view outcome_name(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::kPass: return "pass";
    case CheckOutcome::kFail: return "FAIL";
    case CheckOutcome::kNotApplicable: return "n/a";
  }
  return "?";
}

std::string_view invariant_label(InvariantKind kind) {
  switch (kind) {
    case InvariantKind::kQueueBound: return "Q <= Vw + A^max";
    case InvariantKind::kPersistentBound: return "Z <= Vw/zeta + zeta*alpha*S^max";
    case InvariantKind::kCombinedBound: return "zeta*Z + Q <= Vw + zeta^2*alpha*S^max + A^max";
    case InvariantKind::kVirtualBound: return "Y <= n(V + zeta^2*S^max + max A^max) + (n+1)S^max";
    case InvariantKind::kPersistentZero: return "Z identically zero";
    case InvariantKind::kDelayBound: return "max wait <= delay bound";
  }
  return "?";
}

// Shrinks a live policy input to oracle size and compares objectives.
bool shadow_matches(const PolicyInput& live, double& policy_value, double& oracle_value) {
  PolicyInput shadow;
  shadow.s_t = std::min(live.s_t, kOracleMaxCapacity);
  std::vector<PacketCount> caps;
  for (std::size_t i = 0; i < live.flows.size() && i < kOracleMaxFlows; ++i) {
    FlowSnapshot f = live.flows[i];
    const PacketCount natural =
        f.config.drop_cap.value_or(std::max(f.config.a_max.value_or(0),
                                            ceil_share(f.config.alpha, shadow.s_t)));
    f.config.drop_cap = std::min(natural, kOracleMaxDropCap);
    caps.push_back(*f.config.drop_cap);
    shadow.flows.push_back(std::move(f));
  }
  const PolicyOutput decision = step_policy(PolicyKind::kPiBar, shadow);
  policy_value = drift_objective(shadow, decision);
  oracle_value = oracle_min_drift(shadow, caps).objective;
  const double scale = std::max({1.0, std::abs(policy_value), std::abs(oracle_value)});
  return std::abs(policy_value - oracle_value) <= 1e-9 * scale;
}

}  // namespace

std::string VerifyLine::render() const {
  std::string s = fmt::format("{}: {}", name, outcome_name(outcome));
  if (!detail.empty()) s += fmt::format(" ({})", detail);
  return s;
}

bool VerifyResult::all_pass() const {
  return std::none_of(lines.begin(), lines.end(),
                      [](const VerifyLine& l) { return l.outcome == CheckOutcome::kFail; });
}

VerifyResult verify_scenario(const ScenarioSpec& spec, std::size_t oracle_checks) {
  Simulator sim(spec, RunOptions{});
  const Slot horizon = sim.spec().horizon;

  Rng rng = make_rng(sim.spec().seed, kVerifyStream);
  std::uniform_int_distribution<Slot> pick(1, horizon);
  std::multiset<Slot> chosen;
  for (std::size_t k = 0; k < oracle_checks; ++k) chosen.insert(pick(rng));

  std::size_t compared = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
  while (!sim.finished()) {
    const SlotTrace& tr = sim.step();
    const auto hits = chosen.count(tr.t);
    if (hits == 0 || sim.last_policy_input().flows.empty()) continue;
    double pv = 0.0;
    double ov = 0.0;
    const bool ok = shadow_matches(sim.last_policy_input(), pv, ov);
    compared += hits;
    if (!ok) {
      mismatches += hits;
      if (first_mismatch.empty()) {
        first_mismatch = fmt::format("slot {}: policy {} vs oracle {}", tr.t, pv, ov);
      }
    }
  }

  const MetricsReport report = sim.report();
  VerifyResult result;
  for (InvariantKind kind : kAllInvariants) {
    VerifyLine line{std::string(invariant_label(kind)), CheckOutcome::kNotApplicable, ""};
    std::uint64_t checks = 0;
    std::uint64_t violations = 0;
    std::string reason;
    bool applicable = false;
    for (const auto& s : report.invariants) {
      if (s.kind != kind) continue;
      if (s.applicable) {
        applicable = true;
        checks += s.checks;
        violations += s.violations;
      } else if (reason.empty()) {
        reason = fmt::format("flow {}: {}", s.flow_id, s.reason);
      }
    }
    if (applicable) {
      line.outcome = violations == 0 ? CheckOutcome::kPass : CheckOutcome::kFail;
      if (violations) line.detail = fmt::format("{} violations in {} checks", violations, checks);
    } else {
      line.detail = reason;
    }
    // Only the pi_static line is meaningful for the zero check.
    if (kind == InvariantKind::kPersistentZero && sim.spec().policy != PolicyKind::kPiStatic) {
      continue;
    }
    result.lines.push_back(std::move(line));
  }

  bool conserved = true;
  for (const auto& t : report.totals) {
    conserved = conserved && t.arrivals == t.served + t.dropped + t.abandoned + t.final_queue;
  }
  result.lines.push_back({"packet conservation",
                          conserved ? CheckOutcome::kPass : CheckOutcome::kFail, ""});

  VerifyLine oracle{"one-step oracle agreement", CheckOutcome::kPass,
                    fmt::format("{} shadow instances", compared)};
  if (mismatches) {
    oracle.outcome = CheckOutcome::kFail;
    oracle.detail = fmt::format("{} of {} mismatched; first at {}", mismatches, compared,
                                first_mismatch);
  }
  result.lines.push_back(std::move(oracle));
  return result;
}

}  // namespace qos
