#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qos/arrivals.hpp"
#include "qos/bounds.hpp"
#include "qos/metrics.hpp"
#include "qos/model.hpp"
#include "qos/policies.hpp"
#include "qos/queues.hpp"

namespace qos {

struct RunOptions {
  bool check_invariants = true;
  bool strict = false;  // throw BoundViolationError on the first violation
  std::size_t max_logged_violations = 1000;
  // Fault-injection hook: adds kInjectedZFault to every present flow's Z
  // right after the updates of this slot.
  std::optional<Slot> inject_z_fault;
};

inline constexpr double kInjectedZFault = 1e6;

class BoundViolationError : public QosError {
 public:
  explicit BoundViolationError(const BoundViolation& v);
  const BoundViolation& violation() const { return violation_; }

 private:
  BoundViolation violation_;
};

struct FlowState {
  PacketQueue queue;
  double y = 0.0;
  double z = 0.0;
  bool present = false;

  PacketCount q() const { return queue.size(); }
};

// Which bounds are checked for one flow, and against what values.
struct InvariantPlan {
  struct Entry {
    bool applicable = false;
    double bound = 0.0;
    std::string reason;
  };
  std::array<Entry, std::size(kAllInvariants)> entries;
  BoundSet bounds;

  const Entry& at(InvariantKind kind) const { return entries[static_cast<std::size_t>(kind)]; }
  Entry& at(InvariantKind kind) { return entries[static_cast<std::size_t>(kind)]; }
};

InvariantPlan plan_invariants(const ScenarioSpec& spec, const FlowConfig& flow);

// State bounds evaluated after the slot's updates (the delay bound is checked
// separately, at service time).
std::vector<BoundViolation> check_invariants(Slot t, const FlowConfig& flow,
                                             const FlowState& state,
                                             const InvariantPlan& plan);

using TraceSink = std::function<void(const SlotTrace&)>;

class Simulator {
 public:
  // Validates the spec; throws ValidationError when it is rejected.
  explicit Simulator(ScenarioSpec spec, RunOptions options = {});
  ~Simulator();
  Simulator(Simulator&&) noexcept;
  Simulator& operator=(Simulator&&) noexcept;

  bool finished() const;
  Slot next_slot() const;
  const SlotTrace& step();
  void run_to_end(const TraceSink& sink = {});

  // Snapshot of the metrics so far; the open epoch ends at next_slot().
  MetricsReport report() const;

  const ScenarioSpec& spec() const;
  const FlowState& state(int flow_id) const;
  // Mutable access for fault-injection harnesses.
  FlowState& state(int flow_id);
  const PolicyInput& last_policy_input() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

MetricsReport run(const ScenarioSpec& spec, const RunOptions& options = {},
                  const TraceSink& sink = {});

}  // namespace qos
