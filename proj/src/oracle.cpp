#include <limits>

#include <fmt/format.h>

#include "qos/policies.hpp"

namespace qos {

namespace {

struct Search {
  const PolicyInput& input;
  std::span<const PacketCount> d_max;
  std::vector<PacketCount> s;
  std::vector<PacketCount> d;
  double best = std::numeric_limits<double>::infinity();
  std::vector<PacketCount> best_s;
  std::vector<PacketCount> best_d;

  double evaluate() const {
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& f = input.flows[i];
      const double zq = f.config.zeta * f.z + static_cast<double>(f.q);
      total += -(zq + f.y) * static_cast<double>(s[i]);
      total += (f.config.v_param * f.config.weight - zq) * static_cast<double>(d[i]);
    }
    return total;
  }

  void drops(std::size_t i) {
    if (i == d.size()) {
      const double value = evaluate();
      if (value < best) {
        best = value;
        best_s = s;
        best_d = d;
      }
      return;
    }
    for (PacketCount x = 0; x <= d_max[i]; ++x) {
      d[i] = x;
      drops(i + 1);
    }
  }

  void allocations(std::size_t i, PacketCount remaining) {
    if (i == s.size()) {
      drops(0);
      return;
    }
    for (PacketCount x = 0; x <= remaining; ++x) {
      s[i] = x;
      allocations(i + 1, remaining - x);
    }
  }
};

}  // namespace

OracleResult oracle_min_drift(const PolicyInput& input,
                              std::span<const PacketCount> d_max) {
  const std::size_t n = input.flows.size();
  if (d_max.size() != n) {
    throw QosError(ErrorKind::kInvalidParameter,
                   fmt::format("oracle got {} drop caps for {} flows", d_max.size(), n));
  }
  if (n > kOracleMaxFlows || input.s_t > kOracleMaxCapacity || input.s_t < 0) {
    throw QosError(ErrorKind::kInstanceTooLarge,
                   fmt::format("oracle limited to n <= {} and S(t) <= {} (got n={}, S={})",
                               kOracleMaxFlows, kOracleMaxCapacity, n, input.s_t));
  }
  for (PacketCount cap : d_max) {
    if (cap > kOracleMaxDropCap || cap < 0) {
      throw QosError(ErrorKind::kInstanceTooLarge,
                     fmt::format("oracle limited to D^max <= {} (got {})",
                                 kOracleMaxDropCap, cap));
    }
  }

  Search search{input, d_max, std::vector<PacketCount>(n, 0),
                std::vector<PacketCount>(n, 0), std::numeric_limits<double>::infinity(),
                {}, {}};
  search.allocations(0, input.s_t);

  OracleResult result;
  result.objective = n == 0 ? 0.0 : search.best;
  for (std::size_t i = 0; i < n; ++i) {
    result.decision.flows.push_back(
        {input.flows[i].config.id, search.best_s[i], search.best_d[i]});
  }
  return result;
}

}  // namespace qos
