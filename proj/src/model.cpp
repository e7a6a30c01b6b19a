#include "qos/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace qos {

namespace {

constexpr double kAdmissionSlack = 1e-9;

template <class Enum, std::size_t N>
std::optional<Enum> lookup(const std::pair<std::string_view, Enum> (&table)[N],
                           std::string_view name) {
  for (const auto& [key, value] : table) {
    if (key == name) return value;
  }
  return std::nullopt;
}

constexpr std::pair<std::string_view, PolicyKind> kPolicyNames[] = {
    {"pi_bar", PolicyKind::kPiBar},
    {"pi_hat", PolicyKind::kPiHat},
    {"pi_static", PolicyKind::kPiStatic},
};
constexpr std::pair<std::string_view, DropDiscipline> kDisciplineNames[] = {
    {"head", DropDiscipline::kHead},
    {"tail", DropDiscipline::kTail},
};
constexpr std::pair<std::string_view, NackMode> kNackNames[] = {
    {"event", NackMode::kPerDecision},
    {"packet", NackMode::kPerPacket},
};
constexpr std::pair<std::string_view, ChannelKind> kChannelNames[] = {
    {"constant", ChannelKind::kConstant},
    {"sequence", ChannelKind::kSequence},
    {"seeded-random", ChannelKind::kSeededRandom},
};

template <class Enum, std::size_t N>
std::string_view name_of(const std::pair<std::string_view, Enum> (&table)[N],
                         Enum value) {
  for (const auto& [key, v] : table) {
    if (v == value) return key;
  }
  return "unknown";
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

std::string_view to_string(PolicyKind kind) { return name_of(kPolicyNames, kind); }
std::string_view to_string(DropDiscipline d) { return name_of(kDisciplineNames, d); }
std::string_view to_string(NackMode mode) { return name_of(kNackNames, mode); }
std::string_view to_string(ChannelKind kind) { return name_of(kChannelNames, kind); }

std::optional<PolicyKind> parse_policy(std::string_view name) {
  return lookup(kPolicyNames, name);
}
std::optional<DropDiscipline> parse_drop_discipline(std::string_view name) {
  return lookup(kDisciplineNames, name);
}
std::optional<NackMode> parse_nack_mode(std::string_view name) {
  return lookup(kNackNames, name);
}
std::optional<ChannelKind> parse_channel_kind(std::string_view name) {
  return lookup(kChannelNames, name);
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kAdmissionViolation: return "AdmissionViolation";
    case ErrorKind::kMissingDropCap: return "MissingDropCap";
    case ErrorKind::kInvalidParameter: return "InvalidParameter";
    case ErrorKind::kMissingArrivalCount: return "MissingArrivalCount";
    case ErrorKind::kInstanceTooLarge: return "InstanceTooLarge";
    case ErrorKind::kUndefinedBound: return "UndefinedBound";
    case ErrorKind::kBoundViolation: return "BoundViolation";
  }
  return "Unknown";
}

QosError::QosError(ErrorKind kind, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", to_string(kind), message)),
      kind_(kind) {}

namespace {

std::string join_issues(const std::vector<ValidationIssue>& issues) {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "; ";
    out += fmt::format("{}: {}", to_string(issue.kind), issue.message);
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

bool ValidationError::has(ErrorKind kind) const {
  return std::any_of(issues_.begin(), issues_.end(),
                     [kind](const auto& i) { return i.kind == kind; });
}

std::optional<PacketCount> FlowConfig::effective_a_max() const {
  if (a_max) return a_max;
  if (const auto* bursty = std::get_if<BurstySourceSpec>(&source)) {
    return bursty->max_arrivals();
  }
  return std::nullopt;
}

std::vector<PacketCount> ChannelModel::support() const {
  switch (kind) {
    case ChannelKind::kConstant:
      return {s_max};
    case ChannelKind::kSequence: {
      std::set<PacketCount> unique(values.begin(), values.end());
      return {unique.begin(), unique.end()};
    }
    case ChannelKind::kSeededRandom: {
      std::vector<PacketCount> all;
      for (PacketCount s = s_min; s <= s_max; ++s) all.push_back(s);
      return all;
    }
  }
  return {};
}

const FlowConfig* ScenarioSpec::find_flow(int id) const {
  for (const auto& f : flows) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

double service_share(double alpha, PacketCount s) {
  const double raw = alpha * static_cast<double>(s);
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) <= 1e-9 * std::max(1.0, std::abs(raw))) {
    return nearest;
  }
  return raw;
}

PacketCount ceil_share(double alpha, PacketCount s) {
  return static_cast<PacketCount>(std::ceil(service_share(alpha, s)));
}

PacketCount floor_share(double alpha, PacketCount s) {
  return static_cast<PacketCount>(std::floor(service_share(alpha, s)));
}

namespace {

void check_channel(const ChannelModel& ch, std::vector<ValidationIssue>& out) {
  auto bad = [&](std::string msg) {
    out.push_back({ErrorKind::kInvalidParameter, std::move(msg)});
  };
  if (ch.s_max <= 0) bad(fmt::format("channel s_max must be positive (got {})", ch.s_max));
  if (ch.s_min < 0 || ch.s_min > ch.s_max) {
    bad(fmt::format("channel requires 0 <= s_min <= s_max (got s_min={}, s_max={})",
                    ch.s_min, ch.s_max));
  }
  switch (ch.kind) {
    case ChannelKind::kConstant:
      if (ch.s_min != ch.s_max) {
        bad(fmt::format("constant channel requires s_min == s_max (got {} and {})",
                        ch.s_min, ch.s_max));
      }
      break;
    case ChannelKind::kSequence:
      if (ch.values.empty()) bad("sequence channel needs at least one value");
      for (std::size_t i = 0; i < ch.values.size(); ++i) {
        if (ch.values[i] < ch.s_min || ch.values[i] > ch.s_max) {
          bad(fmt::format("sequence value {} at index {} outside [{}, {}]",
                          ch.values[i], i, ch.s_min, ch.s_max));
        }
      }
      break;
    case ChannelKind::kSeededRandom:
      break;
  }
}

void check_flow(const ScenarioSpec& spec, const FlowConfig& f,
                std::vector<ValidationIssue>& out) {
  auto bad = [&](std::string msg) {
    out.push_back({ErrorKind::kInvalidParameter,
                   fmt::format("flow {}: {}", f.id, std::move(msg))});
  };
  if (f.id < 0) bad("id must be nonnegative");
  if (!finite(f.alpha) || f.alpha < 0.0 || f.alpha > 1.0) {
    bad(fmt::format("alpha must lie in [0, 1] (got {})", f.alpha));
  }
  if (!finite(f.weight) || f.weight < 0.0 || f.weight > 1.0) {
    bad(fmt::format("weight must lie in [0, 1] (got {})", f.weight));
  }
  if (!finite(f.zeta) || f.zeta <= 0.0) {
    bad(fmt::format("zeta must be positive (got {})", f.zeta));
  }
  if (!finite(f.v_param) || f.v_param < 0.0) {
    bad(fmt::format("v_param must be nonnegative (got {})", f.v_param));
  }
  if (f.drop_cap && *f.drop_cap < 0) bad("drop_cap must be nonnegative");
  if (f.a_max && *f.a_max < 0) bad("a_max must be nonnegative");
  if (f.join_slot < 1 || f.join_slot > spec.horizon) {
    bad(fmt::format("join_slot {} outside [1, {}]", f.join_slot, spec.horizon));
  }
  if (f.leave_slot &&
      (*f.leave_slot <= f.join_slot || *f.leave_slot > spec.horizon)) {
    bad(fmt::format("leave_slot {} must satisfy join_slot < leave_slot <= {}",
                    *f.leave_slot, spec.horizon));
  }

  if (const auto* b = std::get_if<BurstySourceSpec>(&f.source)) {
    if (b->eta < 1) bad(fmt::format("bursty eta must be >= 1 (got {})", b->eta));
    if (b->nu < 1) bad(fmt::format("bursty nu must be >= 1 (got {})", b->nu));
    if (!finite(b->lambda) || b->lambda <= 0.0) {
      bad(fmt::format("bursty lambda must be positive (got {})", b->lambda));
    }
    if (f.a_max && b->eta >= 1 && b->nu >= 1 && *f.a_max < b->max_arrivals()) {
      bad(fmt::format("a_max {} is below the source maximum eta*nu = {}", *f.a_max,
                      b->max_arrivals()));
    }
  } else if (f.a_max) {
    bad("a_max cannot be set for an unbounded closed-loop source");
  }

  if (spec.policy == PolicyKind::kPiBar) {
    const auto a_max = f.effective_a_max();
    if (!f.drop_cap) {
      out.push_back({ErrorKind::kMissingDropCap,
                     fmt::format("flow {}: pi_bar requires drop_cap", f.id)});
    } else if (!a_max) {
      out.push_back({ErrorKind::kMissingDropCap,
                     fmt::format("flow {}: pi_bar requires a known a_max", f.id)});
    } else {
      const PacketCount needed =
          std::max(*a_max, ceil_share(f.alpha, spec.channel.s_max));
      if (*f.drop_cap < needed) {
        out.push_back(
            {ErrorKind::kMissingDropCap,
             fmt::format("flow {}: drop_cap {} < max(a_max, ceil(alpha*S^max)) = {}",
                         f.id, *f.drop_cap, needed)});
      }
    }
  }
}

}  // namespace

std::vector<ValidationIssue> check_scenario(const ScenarioSpec& spec) {
  std::vector<ValidationIssue> out;
  if (spec.horizon < 1) {
    out.push_back({ErrorKind::kInvalidParameter,
                   fmt::format("horizon must be >= 1 (got {})", spec.horizon)});
  }
  if (spec.feedback_delay < 0) {
    out.push_back({ErrorKind::kInvalidParameter,
                   fmt::format("feedback_delay must be >= 0 (got {})",
                               spec.feedback_delay)});
  }
  check_channel(spec.channel, out);

  std::set<int> ids;
  for (const auto& f : spec.flows) {
    if (!ids.insert(f.id).second) {
      out.push_back({ErrorKind::kInvalidParameter,
                     fmt::format("duplicate flow id {}", f.id)});
    }
    check_flow(spec, f, out);
  }

  // The present set only grows at join slots, so those are the only slots
  // where the admission sum can peak.
  std::set<Slot> candidates{1};
  for (const auto& f : spec.flows) candidates.insert(f.join_slot);
  for (Slot t : candidates) {
    double total = 0.0;
    for (const auto& f : spec.flows) {
      if (f.present_at(t)) total += f.alpha;
    }
    if (total > 1.0 + kAdmissionSlack) {
      out.push_back({ErrorKind::kAdmissionViolation,
                     fmt::format("sum of alpha over flows present at slot {} is {} > 1",
                                 t, total)});
    }
  }
  return out;
}

ScenarioSpec validate_scenario(ScenarioSpec spec) {
  auto issues = check_scenario(spec);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return spec;
}

}  // namespace qos
