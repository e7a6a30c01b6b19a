#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qos {

// Slots are the only unit of time; all delays are reported in slots.
using Slot = std::int64_t;
using PacketCount = std::int64_t;

// Truncated-Poisson bursty source: A = eta * k with k ~ Poisson(lambda)
// truncated at nu (the tail mass collapses onto nu).
struct BurstySourceSpec {
  PacketCount eta = 1;
  double lambda = 1.0;
  PacketCount nu = 1;

  PacketCount max_arrivals() const { return eta * nu; }
};

// Closed-loop Poisson source whose mean follows the AIMD recursion driven by
// delayed ACK/NACK counts.
struct AimdSourceSpec {};

using SourceSpec = std::variant<BurstySourceSpec, AimdSourceSpec>;

enum class PolicyKind { kPiBar, kPiHat, kPiStatic };
enum class DropDiscipline { kHead, kTail };
enum class NackMode { kPerDecision, kPerPacket };
enum class ChannelKind { kConstant, kSequence, kSeededRandom };

std::string_view to_string(PolicyKind kind);
std::string_view to_string(DropDiscipline discipline);
std::string_view to_string(NackMode mode);
std::string_view to_string(ChannelKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);
std::optional<DropDiscipline> parse_drop_discipline(std::string_view name);
std::optional<NackMode> parse_nack_mode(std::string_view name);
std::optional<ChannelKind> parse_channel_kind(std::string_view name);

struct FlowConfig {
  int id = 0;
  double alpha = 0.0;     // guaranteed fraction of S(t)
  double weight = 1.0;    // drop penalty weight
  double zeta = 1.0;
  double v_param = 0.0;
  std::optional<PacketCount> drop_cap;  // D^max, required by pi_bar
  std::optional<PacketCount> a_max;     // A^max, derived for bursty sources
  Slot join_slot = 1;
  std::optional<Slot> leave_slot;       // absent: stays until the horizon
  SourceSpec source = AimdSourceSpec{};

  bool present_at(Slot t) const {
    return join_slot <= t && (!leave_slot || t < *leave_slot);
  }
  bool closed_loop() const {
    return std::holds_alternative<AimdSourceSpec>(source);
  }
  // A^max when known: explicit value, else eta*nu for bursty sources.
  std::optional<PacketCount> effective_a_max() const;
};

struct ChannelModel {
  ChannelKind kind = ChannelKind::kConstant;
  PacketCount s_max = 50;
  PacketCount s_min = 50;
  std::vector<PacketCount> values;  // kSequence only, cycled

  // Every capacity value the channel can emit (for seeded-random, the whole
  // integer range).
  std::vector<PacketCount> support() const;
};

struct ScenarioSpec {
  std::vector<FlowConfig> flows;
  ChannelModel channel;
  PolicyKind policy = PolicyKind::kPiHat;
  Slot horizon = 100000;
  Slot feedback_delay = 0;
  std::uint64_t seed = 1;
  DropDiscipline drop_discipline = DropDiscipline::kHead;
  NackMode nack_mode = NackMode::kPerDecision;
  bool wait_includes_dropped = false;

  const FlowConfig* find_flow(int id) const;
};

enum class ErrorKind {
  kAdmissionViolation,
  kMissingDropCap,
  kInvalidParameter,
  kMissingArrivalCount,
  kInstanceTooLarge,
  kUndefinedBound,
  kBoundViolation,
};

std::string_view to_string(ErrorKind kind);

class QosError : public std::runtime_error {
 public:
  QosError(ErrorKind kind, const std::string& message);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ValidationIssue {
  ErrorKind kind;
  std::string message;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const { return issues_; }
  bool has(ErrorKind kind) const;

 private:
  std::vector<ValidationIssue> issues_;
};

// Every violated invariant of the scenario; empty when the spec is valid.
std::vector<ValidationIssue> check_scenario(const ScenarioSpec& spec);

// Returns the spec unchanged when valid, otherwise throws ValidationError
// carrying the full issue list.
ScenarioSpec validate_scenario(ScenarioSpec spec);

// alpha * s, snapped to the nearest integer when within rounding noise.
double service_share(double alpha, PacketCount s);
PacketCount ceil_share(double alpha, PacketCount s);
PacketCount floor_share(double alpha, PacketCount s);

}  // namespace qos
