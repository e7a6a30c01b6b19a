#include "qos/report_io.hpp"

#include <fmt/format.h>
#include <fstream>
#include <iterator>

namespace qos {

using nlohmann::json;

const std::vector<std::string>& trace_flow_columns() {
  static const std::vector<std::string> cols = {
      "present",        "a_t",         "s_alloc",    "d_drop",
      "served_actual",  "dropped_actual", "q_after", "y_after",
      "z_after",        "lambda",      "avg_arrival", "avg_served",
      "avg_w_drop_decision", "avg_w_drop"};
  return cols;
}

std::string format_number(double value) { return fmt::format("{}", value); }

TraceCsvWriter::TraceCsvWriter(std::ostream& out, const ScenarioSpec& spec, Slot thin)
    : out_(out), thin_(thin < 1 ? 1 : thin) {
  for (const auto& f : spec.flows) flow_ids_.push_back(f.id);
  out_ << header() << '\n';
}

std::string TraceCsvWriter::header() const {
  std::string h = "t,s_t";
  for (int id : flow_ids_) {
    for (const auto& c : trace_flow_columns()) h += fmt::format(",f{}_{}", id, c);
  }
  return h;
}

void TraceCsvWriter::write(const SlotTrace& trace) {
  if ((trace.t - 1) % thin_ != 0) return;
  fmt::memory_buffer row;
  auto out = std::back_inserter(row);
  fmt::format_to(out, "{},{}", trace.t, trace.s_t);
  for (int id : flow_ids_) {
    const FlowSlotRecord* r = trace.find(id);
    if (!r) {
      for (std::size_t i = 0; i < trace_flow_columns().size(); ++i) fmt::format_to(out, ",");
      continue;
    }
    fmt::format_to(out, ",1,{},{},{},{},{},{},{},{},", r->a_t, r->s_alloc, r->d_drop,
                   r->served, r->dropped, r->q_after, r->y_after, r->z_after);
    if (r->lambda) fmt::format_to(out, "{}", *r->lambda);
    fmt::format_to(out, ",{},{},{},{}", r->avg_arrival, r->avg_served,
                   r->avg_weighted_drop_decision, r->avg_weighted_drop);
  }
  row.push_back('\n');
  out_.write(row.data(), static_cast<std::streamsize>(row.size()));
}

namespace {

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json epoch_flow_json(const FlowEpochMetrics& f) {
  return {
      {"flow_id", f.flow_id},
      {"slots", f.slots},
      {"arrivals", f.arrivals},
      {"allocated", f.allocated},
      {"served", f.served},
      {"dropped", f.dropped},
      {"drop_decisions", f.drop_decisions},
      {"avg_arrival", f.avg_arrival()},
      {"avg_served", f.avg_served()},
      {"avg_dropped", f.avg_dropped()},
      {"avg_drop_decision", f.avg_drop_decision()},
      {"avg_weighted_drop_decision", f.avg_weighted_drop_decision()},
      {"avg_weighted_drop", f.avg_weighted_drop()},
      {"queue_mean", f.queue.mean()},
      {"queue_std", f.queue.stddev()},
      {"wait_count", f.wait.count()},
      {"wait_max", f.wait.max()},
      {"wait_mean", f.wait.mean()},
      {"wait_p50", f.wait.percentile(0.5)},
      {"wait_p99", f.wait.percentile(0.99)},
      {"q_end", f.q_end},
      {"y_end", f.y_end},
      {"z_end", f.z_end},
  };
}

}  // namespace

json report_to_json(const MetricsReport& report, const ScenarioSpec& spec) {
  json j;
  j["schema_version"] = kSummarySchemaVersion;
  j["policy"] = std::string(to_string(report.policy));
  j["horizon"] = report.horizon;
  j["seed"] = spec.seed;
  j["feedback_delay"] = spec.feedback_delay;
  j["avg_capacity"] = report.avg_capacity();

  j["epochs"] = json::array();
  for (const auto& e : report.epochs) {
    json je = {{"start", e.start}, {"end", e.end}, {"avg_capacity", e.avg_capacity()}};
    je["flows"] = json::array();
    for (const auto& f : e.flows) je["flows"].push_back(epoch_flow_json(f));
    j["epochs"].push_back(std::move(je));
  }

  j["totals"] = json::array();
  for (const auto& t : report.totals) {
    j["totals"].push_back({
        {"flow_id", t.flow_id},
        {"slots_present", t.slots_present},
        {"arrivals", t.arrivals},
        {"served", t.served},
        {"dropped", t.dropped},
        {"abandoned", t.abandoned},
        {"final_queue", t.final_queue},
        {"avg_served", t.avg_served()},
        {"avg_capacity", t.avg_capacity()},
        {"weighted_drop_decisions", t.weighted_drop_decisions},
        {"weighted_drops", t.weighted_drops},
        {"y_final", t.y_final},
        {"z_final", t.z_final},
        {"y_ratio", t.y_ratio()},
        {"max_wait", t.max_wait},
    });
  }

  j["theoretical_bounds"] = json::array();
  for (const auto& b : report.theoretical_bounds) {
    j["theoretical_bounds"].push_back({
        {"flow_id", b.flow_id},
        {"q_bound", optional_number(b.bounds.q_bound)},
        {"z_bound", optional_number(b.bounds.z_bound)},
        {"qz_bound", optional_number(b.bounds.qz_bound)},
        {"y_bound", optional_number(b.bounds.y_bound)},
        {"delay_bound_pi_hat", optional_number(b.bounds.delay_bound_pi_hat)},
        {"delay_bound_pi_static", optional_number(b.bounds.delay_bound_pi_static)},
    });
  }

  j["invariants"] = json::array();
  for (const auto& s : report.invariants) {
    json js = {{"flow_id", s.flow_id},
               {"kind", std::string(to_string(s.kind))},
               {"applicable", s.applicable},
               {"checks", s.checks},
               {"violations", s.violations}};
    if (!s.applicable) js["reason"] = s.reason;
    j["invariants"].push_back(std::move(js));
  }

  json logged = json::array();
  for (const auto& v : report.violations) {
    logged.push_back({{"t", v.t},
                      {"flow_id", v.flow_id},
                      {"kind", std::string(to_string(v.kind))},
                      {"observed", v.observed},
                      {"bound", v.bound}});
  }
  j["violations"] = {{"count", report.violation_count}, {"logged", std::move(logged)}};
  return j;
}

void write_summary(const MetricsReport& report, const ScenarioSpec& spec,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << report_to_json(report, spec).dump(2) << '\n';
}

}  // namespace qos
