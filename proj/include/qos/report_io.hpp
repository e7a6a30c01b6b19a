#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qos/metrics.hpp"
#include "qos/model.hpp"

namespace qos {

inline constexpr int kSummarySchemaVersion = 1;

// Per-flow column suffixes of the trace CSV, in order. Each flow contributes
// one group "f<id>_<suffix>" after the leading "t,s_t" columns.
const std::vector<std::string>& trace_flow_columns();

// Wide trace CSV: one row per recorded slot. Rows are written for slots with
// (t - 1) % thin == 0. Cells of flows absent in a slot are empty.
class TraceCsvWriter {
 public:
  TraceCsvWriter(std::ostream& out, const ScenarioSpec& spec, Slot thin = 1);

  std::string header() const;
  void write(const SlotTrace& trace);

 private:
  std::ostream& out_;
  std::vector<int> flow_ids_;
  Slot thin_;
};

nlohmann::json report_to_json(const MetricsReport& report, const ScenarioSpec& spec);
void write_summary(const MetricsReport& report, const ScenarioSpec& spec,
                   const std::filesystem::path& path);

// Shortest decimal that round-trips.
std::string format_number(double value);

}  // namespace qos
