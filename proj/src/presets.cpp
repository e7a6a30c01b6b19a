#include "qos/presets.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fmt/format.h>
#include <fstream>
#include <iterator>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qos/engine.hpp"
#include "qos/report_io.hpp"
#include "qos/scenarios.hpp"

namespace qos {

namespace {

std::string num(double v) { return format_number(v); }

Preset zeta_sweep(std::uint64_t seed) {
  Preset p{"zeta_sweep", {}, 100, false};
  for (int zeta = 1; zeta <= 31; zeta += 2) {
    ExperimentParams params;
    params.zeta = zeta;
    params.seed = seed;
    p.points.push_back({fmt::format("zeta_{}", zeta), {{"zeta", num(zeta)}},
                        table_scenario(1, params)});
  }
  return p;
}

Preset policy_compare_v_sweep(std::uint64_t seed) {
  Preset p{"policy_compare_v_sweep", {}, 100, false};
  for (PolicyKind policy : {PolicyKind::kPiBar, PolicyKind::kPiHat}) {
    for (double v : {50.0, 100.0, 150.0, 200.0, 400.0, 700.0, 1000.0}) {
      ExperimentParams params;
      params.policy = policy;
      params.v = v;
      params.seed = seed;
      p.points.push_back({fmt::format("{}_v{}", to_string(policy), v),
                          {{"policy", std::string(to_string(policy))}, {"v", num(v)}},
                          table_scenario(2, params)});
    }
  }
  return p;
}

Preset isolation_bursty(std::uint64_t seed) {
  Preset p{"isolation_bursty", {}, 100, false};
  for (PolicyKind policy : {PolicyKind::kPiHat, PolicyKind::kPiStatic}) {
    for (PacketCount eta : {1, 10}) {
      ExperimentParams params;
      params.policy = policy;
      params.seed = seed;
      p.points.push_back({fmt::format("{}_eta{}", to_string(policy), eta),
                          {{"policy", std::string(to_string(policy))}, {"eta", num(eta)}},
                          table_scenario(3, params, eta)});
    }
  }
  return p;
}

Preset join_leave(std::uint64_t seed) {
  Preset p{"join_leave", {}, 100, false};
  for (PolicyKind policy : {PolicyKind::kPiHat, PolicyKind::kPiStatic}) {
    ExperimentParams params;
    params.policy = policy;
    params.seed = seed;
    p.points.push_back({std::string(to_string(policy)),
                        {{"policy", std::string(to_string(policy))}},
                        bursty_join_leave(params)});
  }
  return p;
}

Preset feedback_delay_sweep(std::uint64_t seed) {
  Preset p{"feedback_delay_sweep", {}, 100, false};
  for (PolicyKind policy : {PolicyKind::kPiHat, PolicyKind::kPiStatic}) {
    for (Slot d : {0, 10, 25, 50, 75, 100, 200, 300, 400, 500}) {
      ExperimentParams params;
      params.policy = policy;
      params.seed = seed;
      params.feedback_delay = d;
      p.points.push_back({fmt::format("{}_d{}", to_string(policy), d),
                          {{"policy", std::string(to_string(policy))}, {"d", num(d)}},
                          closed_loop_pair(params)});
    }
  }
  return p;
}

Preset feedback_snapshot(std::uint64_t seed) {
  Preset p{"feedback_snapshot", {}, 1, true};
  for (Slot d : {0, 50, 500}) {
    ExperimentParams params;
    params.seed = seed;
    params.feedback_delay = d;
    p.points.push_back({fmt::format("d{}", d), {{"d", num(d)}}, closed_loop_join_leave(params)});
  }
  return p;
}

PointResult run_point(const PresetPoint& point, Slot thin, bool periodicity) {
  PointResult result;
  std::ostringstream csv;
  TraceCsvWriter writer(csv, point.spec, thin);

  const std::size_t n_flows = point.spec.flows.size();
  std::vector<std::vector<double>> series(n_flows);
  Slot phase_start = 0;
  Slot phase_end = 0;
  auto sink = [&](const SlotTrace& tr) {
    writer.write(tr);
    if (!periodicity || tr.flows.size() != n_flows || n_flows < 2) return;
    if (phase_start == 0) phase_start = tr.t;
    phase_end = tr.t + 1;
    for (std::size_t i = 0; i < n_flows; ++i) {
      series[i].push_back(static_cast<double>(tr.flows[i].a_t));
    }
  };
  result.report = run(point.spec, RunOptions{}, sink);
  result.trace_csv = csv.str();
  if (periodicity && phase_start > 0) {
    for (std::size_t i = 0; i < n_flows; ++i) {
      result.periodicity.push_back(
          {point.spec.flows[i].id, phase_start, phase_end, dominant_period(series[i])});
    }
  }
  return result;
}

std::string key_header(const Preset& preset) {
  std::string h = "preset";
  if (!preset.points.empty()) {
    for (const auto& [k, v] : preset.points.front().keys) h += "," + k;
  }
  return h + ",seed";
}

std::string key_cells(const Preset& preset, const PresetPoint& point) {
  std::string c = preset.name;
  for (const auto& [k, v] : point.keys) c += "," + v;
  return c + fmt::format(",{}", point.spec.seed);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << content;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "zeta_sweep", "policy_compare_v_sweep", "isolation_bursty",
      "join_leave", "feedback_delay_sweep",   "feedback_snapshot"};
  return names;
}

Preset expand_preset(std::string_view name, std::uint64_t seed) {
  if (name == "zeta_sweep") return zeta_sweep(seed);
  if (name == "policy_compare_v_sweep") return policy_compare_v_sweep(seed);
  if (name == "isolation_bursty") return isolation_bursty(seed);
  if (name == "join_leave") return join_leave(seed);
  if (name == "feedback_delay_sweep") return feedback_delay_sweep(seed);
  if (name == "feedback_snapshot") return feedback_snapshot(seed);
  throw std::invalid_argument(fmt::format("unknown preset \"{}\"", name));
}

std::vector<PointResult> run_points(const Preset& preset, Slot thin, unsigned threads) {
  if (thin <= 0) thin = preset.default_thin;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(preset.points.size()));

  std::vector<PointResult> results(preset.points.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < preset.points.size(); i = next++) {
      try {
        results[i] = run_point(preset.points[i], thin, preset.periodicity);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::string aggregate_csv(const Preset& preset, const std::vector<PointResult>& results) {
  std::string out = key_header(preset) +
                    ",epoch_start,epoch_end,flow_id,slots,avg_capacity,avg_arrival,avg_served,"
                    "avg_dropped,avg_drop_decision,avg_w_drop_decision,avg_w_drop,queue_mean,"
                    "queue_std,wait_max,wait_mean,wait_p99,y_end,z_end,violations\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const std::string keys = key_cells(preset, preset.points[i]);
    const MetricsReport& r = results[i].report;
    for (const auto& e : r.epochs) {
      for (const auto& f : e.flows) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", keys,
                           e.start, e.end, f.flow_id, f.slots, e.avg_capacity(), f.avg_arrival(),
                           f.avg_served(), f.avg_dropped(), f.avg_drop_decision(),
                           f.avg_weighted_drop_decision(), f.avg_weighted_drop(), f.queue.mean(),
                           f.queue.stddev(), f.wait.max(), f.wait.mean(), f.wait.percentile(0.99),
                           f.y_end, f.z_end, r.violation_count);
      }
    }
  }
  return out;
}

std::string periodicity_csv(const Preset& preset, const std::vector<PointResult>& results) {
  std::string out = key_header(preset) + ",flow_id,phase_start,phase_end,peak_lag,peak_acf\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const std::string keys = key_cells(preset, preset.points[i]);
    for (const auto& row : results[i].periodicity) {
      out += fmt::format("{},{},{},{},", keys, row.flow_id, row.phase_start, row.phase_end);
      if (row.period) out += fmt::format("{},{}", row.period->lag, row.period->acf);
      else out += ",";
      out += "\n";
    }
  }
  return out;
}

std::vector<PointResult> run_preset(std::string_view name, std::uint64_t seed,
                                    const std::filesystem::path& out_dir, Slot thin,
                                    unsigned threads) {
  const Preset preset = expand_preset(name, seed);
  auto results = run_points(preset, thin, threads);
  std::filesystem::create_directories(out_dir);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& point = preset.points[i];
    write_file(out_dir / (point.label + ".csv"), results[i].trace_csv);
    write_file(out_dir / (point.label + ".json"),
               report_to_json(results[i].report, point.spec).dump(2) + "\n");
  }
  write_file(out_dir / "aggregate.csv", aggregate_csv(preset, results));
  if (preset.periodicity) write_file(out_dir / "periodicity.csv", periodicity_csv(preset, results));
  return results;
}

}  // namespace qos
