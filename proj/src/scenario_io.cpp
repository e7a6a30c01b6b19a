#include "qos/scenario_io.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace qos {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ScenarioParseError(fmt::format("{}: {}", path, what));
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) fail(path, fmt::format("unknown field \"{}\"", key));
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  return j;
}

double as_real(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::int64_t as_int(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::floor(v) &&
        std::abs(v) < static_cast<double>(std::numeric_limits<std::int64_t>::max())) {
      return static_cast<std::int64_t>(v);
    }
  }
  fail(path, "expected an integer");
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

template <class T, class Parse>
T as_enum(const json& j, const std::string& path, Parse parse) {
  const auto name = as_string(j, path);
  const auto value = parse(name);
  if (!value) fail(path, fmt::format("unrecognized value \"{}\"", name));
  return *value;
}

SourceSpec source_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  if (j.size() != 1) fail(path, "expected exactly one of \"bursty\" or \"aimd\"");
  if (j.contains("aimd")) {
    const auto p = path + ".aimd";
    require_object(j.at("aimd"), p);
    reject_unknown(j.at("aimd"), p, {});
    return AimdSourceSpec{};
  }
  if (j.contains("bursty")) {
    const auto p = path + ".bursty";
    const json& b = require_object(j.at("bursty"), p);
    reject_unknown(b, p, {"eta", "lambda", "nu"});
    for (const char* key : {"eta", "lambda", "nu"}) {
      if (!b.contains(key)) fail(p, fmt::format("missing \"{}\"", key));
    }
    BurstySourceSpec s;
    s.eta = as_int(b.at("eta"), p + ".eta");
    s.lambda = as_real(b.at("lambda"), p + ".lambda");
    s.nu = as_int(b.at("nu"), p + ".nu");
    return s;
  }
  fail(path, "expected exactly one of \"bursty\" or \"aimd\"");
}

FlowConfig flow_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path,
                 {"id", "alpha", "weight", "zeta", "v_param", "drop_cap", "a_max",
                  "join_slot", "leave_slot", "source"});
  for (const char* key : {"id", "alpha", "v_param", "source"}) {
    if (!j.contains(key)) fail(path, fmt::format("missing \"{}\"", key));
  }
  FlowConfig f;
  const auto id = as_int(j.at("id"), path + ".id");
  if (id < std::numeric_limits<int>::min() || id > std::numeric_limits<int>::max()) {
    fail(path + ".id", "out of range");
  }
  f.id = static_cast<int>(id);
  f.alpha = as_real(j.at("alpha"), path + ".alpha");
  f.v_param = as_real(j.at("v_param"), path + ".v_param");
  if (j.contains("weight")) f.weight = as_real(j.at("weight"), path + ".weight");
  if (j.contains("zeta")) f.zeta = as_real(j.at("zeta"), path + ".zeta");
  if (j.contains("drop_cap") && !j.at("drop_cap").is_null()) {
    f.drop_cap = as_int(j.at("drop_cap"), path + ".drop_cap");
  }
  if (j.contains("a_max") && !j.at("a_max").is_null()) {
    f.a_max = as_int(j.at("a_max"), path + ".a_max");
  }
  if (j.contains("join_slot")) f.join_slot = as_int(j.at("join_slot"), path + ".join_slot");
  if (j.contains("leave_slot") && !j.at("leave_slot").is_null()) {
    f.leave_slot = as_int(j.at("leave_slot"), path + ".leave_slot");
  }
  f.source = source_from_json(j.at("source"), path + ".source");
  return f;
}

ChannelModel channel_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"kind", "s_max", "s_min", "values"});
  ChannelModel c;
  if (j.contains("kind")) c.kind = as_enum<ChannelKind>(j.at("kind"), path + ".kind", parse_channel_kind);
  if (j.contains("s_max")) c.s_max = as_int(j.at("s_max"), path + ".s_max");
  if (j.contains("s_min")) c.s_min = as_int(j.at("s_min"), path + ".s_min");
  if (j.contains("values")) {
    const json& v = j.at("values");
    if (!v.is_array()) fail(path + ".values", "expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      c.values.push_back(as_int(v[i], fmt::format("{}.values[{}]", path, i)));
    }
  }
  return c;
}

json flow_to_json(const FlowConfig& f) {
  json j;
  j["id"] = f.id;
  j["alpha"] = f.alpha;
  j["weight"] = f.weight;
  j["zeta"] = f.zeta;
  j["v_param"] = f.v_param;
  if (f.drop_cap) j["drop_cap"] = *f.drop_cap;
  if (f.a_max) j["a_max"] = *f.a_max;
  j["join_slot"] = f.join_slot;
  if (f.leave_slot) j["leave_slot"] = *f.leave_slot;
  if (const auto* b = std::get_if<BurstySourceSpec>(&f.source)) {
    j["source"] = {{"bursty", {{"eta", b->eta}, {"lambda", b->lambda}, {"nu", b->nu}}}};
  } else {
    j["source"] = {{"aimd", json::object()}};
  }
  return j;
}

}  // namespace

json scenario_to_json(const ScenarioSpec& spec) {
  json j;
  j["flows"] = json::array();
  for (const auto& f : spec.flows) j["flows"].push_back(flow_to_json(f));
  json ch;
  ch["kind"] = std::string(to_string(spec.channel.kind));
  ch["s_max"] = spec.channel.s_max;
  ch["s_min"] = spec.channel.s_min;
  if (!spec.channel.values.empty()) ch["values"] = spec.channel.values;
  j["channel"] = ch;
  j["policy"] = std::string(to_string(spec.policy));
  j["horizon"] = spec.horizon;
  j["feedback_delay"] = spec.feedback_delay;
  j["seed"] = spec.seed;
  j["drop_discipline"] = std::string(to_string(spec.drop_discipline));
  j["nack_mode"] = std::string(to_string(spec.nack_mode));
  j["wait_includes_dropped"] = spec.wait_includes_dropped;
  return j;
}

ScenarioSpec scenario_from_json(const json& doc) {
  const std::string root = "$";
  require_object(doc, root);
  reject_unknown(doc, root,
                 {"flows", "channel", "policy", "horizon", "feedback_delay", "seed",
                  "drop_discipline", "nack_mode", "wait_includes_dropped"});
  if (!doc.contains("flows")) fail(root, "missing \"flows\"");
  if (!doc.contains("policy")) fail(root, "missing \"policy\"");

  ScenarioSpec spec;
  const json& flows = doc.at("flows");
  if (!flows.is_array()) fail("$.flows", "expected an array");
  for (std::size_t i = 0; i < flows.size(); ++i) {
    spec.flows.push_back(flow_from_json(flows[i], fmt::format("$.flows[{}]", i)));
  }
  if (doc.contains("channel")) spec.channel = channel_from_json(doc.at("channel"), "$.channel");
  spec.policy = as_enum<PolicyKind>(doc.at("policy"), "$.policy", parse_policy);
  if (doc.contains("horizon")) spec.horizon = as_int(doc.at("horizon"), "$.horizon");
  if (doc.contains("feedback_delay")) {
    spec.feedback_delay = as_int(doc.at("feedback_delay"), "$.feedback_delay");
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (s.is_number_unsigned()) {
      spec.seed = s.get<std::uint64_t>();
    } else {
      const auto v = as_int(s, "$.seed");
      if (v < 0) fail("$.seed", "must be nonnegative");
      spec.seed = static_cast<std::uint64_t>(v);
    }
  }
  if (doc.contains("drop_discipline")) {
    spec.drop_discipline = as_enum<DropDiscipline>(doc.at("drop_discipline"),
                                                   "$.drop_discipline", parse_drop_discipline);
  }
  if (doc.contains("nack_mode")) {
    spec.nack_mode = as_enum<NackMode>(doc.at("nack_mode"), "$.nack_mode", parse_nack_mode);
  }
  if (doc.contains("wait_includes_dropped")) {
    spec.wait_includes_dropped = as_bool(doc.at("wait_includes_dropped"),
                                         "$.wait_includes_dropped");
  }
  return spec;
}

std::string dump_scenario(const ScenarioSpec& spec) {
  return scenario_to_json(spec).dump(2) + "\n";
}

ScenarioSpec parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // what() already names the line and column.
    throw ScenarioParseError(e.what());
  }
  return scenario_from_json(doc);
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError(fmt::format("cannot open {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ScenarioParseError& e) {
    throw ScenarioParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << dump_scenario(spec);
}

}  // namespace qos
