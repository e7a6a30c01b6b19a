#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qos/metrics.hpp"
#include "qos/model.hpp"
#include "qos/periodicity.hpp"

namespace qos {

struct PresetPoint {
  std::string label;  // file stem of the point's outputs
  std::vector<std::pair<std::string, std::string>> keys;  // swept parameters
  ScenarioSpec spec;
};

struct Preset {
  std::string name;
  std::vector<PresetPoint> points;
  Slot default_thin = 100;
  bool periodicity = false;  // also emit periodicity.csv
};

const std::vector<std::string>& preset_names();

// Throws std::invalid_argument for an unknown name.
Preset expand_preset(std::string_view name, std::uint64_t seed);

// Autocorrelation peak of one flow's arrival series over the slots in which
// every flow of the scenario is present.
struct PeriodicityRow {
  int flow_id = 0;
  Slot phase_start = 0;
  Slot phase_end = 0;  // exclusive
  std::optional<PeriodEstimate> period;
};

struct PointResult {
  MetricsReport report;
  std::string trace_csv;
  std::vector<PeriodicityRow> periodicity;
};

// Runs every point (independently, on up to `threads` workers; 0 picks the
// hardware concurrency). Results are index-aligned with the points.
std::vector<PointResult> run_points(const Preset& preset, Slot thin, unsigned threads);

// Long format: one row per point x epoch x flow, keyed by the swept
// parameters.
std::string aggregate_csv(const Preset& preset, const std::vector<PointResult>& results);
std::string periodicity_csv(const Preset& preset, const std::vector<PointResult>& results);

// Expands, runs and writes <out>/<label>.csv, <out>/<label>.json,
// <out>/aggregate.csv (and <out>/periodicity.csv when enabled).
// thin = 0 uses the preset default.
std::vector<PointResult> run_preset(std::string_view name, std::uint64_t seed,
                                    const std::filesystem::path& out_dir, Slot thin = 0,
                                    unsigned threads = 0);

}  // namespace qos
