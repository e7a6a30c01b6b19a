// qos_sim: run scenarios, reproduction presets and invariant verification.
//
// Exit codes: 0 success, 1 parse/validation/usage error, 2 bound violation
// under --strict (or a failed verify).

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "qos/engine.hpp"
#include "qos/presets.hpp"
#include "qos/report_io.hpp"
#include "qos/scenario_io.hpp"
#include "qos/verify.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitViolation = 2;

void print_issues(const qos::ValidationError& e) {
  for (const auto& issue : e.issues()) {
    std::cerr << fmt::format("error: {}: {}\n", qos::to_string(issue.kind), issue.message);
  }
}

int cmd_run(const fs::path& file, const fs::path& out_dir, bool strict, qos::Slot thin,
            std::optional<qos::Slot> z_fault) {
  const qos::ScenarioSpec spec = qos::validate_scenario(qos::load_scenario(file));
  fs::create_directories(out_dir);
  std::ofstream csv(out_dir / "run.csv", std::ios::binary);
  if (!csv) throw std::runtime_error(fmt::format("cannot write {}", (out_dir / "run.csv").string()));
  qos::TraceCsvWriter writer(csv, spec, thin);

  qos::RunOptions options;
  options.strict = strict;
  options.inject_z_fault = z_fault;
  qos::Simulator sim(spec, options);
  int status = kExitOk;
  try {
    sim.run_to_end([&](const qos::SlotTrace& tr) { writer.write(tr); });
  } catch (const qos::BoundViolationError& e) {
    std::cerr << "bound violation: " << e.what() << "\n";
    status = kExitViolation;
  }
  const qos::MetricsReport report = sim.report();
  qos::write_summary(report, spec, out_dir / "summary.json");
  if (status == kExitOk && report.violation_count > 0) {
    std::cerr << fmt::format("warning: {} bound violations recorded (see summary.json)\n",
                             report.violation_count);
  }
  std::cout << fmt::format("wrote {} and {}\n", (out_dir / "run.csv").string(),
                           (out_dir / "summary.json").string());
  return status;
}

int cmd_preset(const std::string& name, std::uint64_t seed, const fs::path& out_dir,
               qos::Slot thin, unsigned threads) {
  const auto results = qos::run_preset(name, seed, out_dir, thin, threads);
  std::cout << fmt::format("{}: {} runs written to {}\n", name, results.size(),
                           out_dir.string());
  return kExitOk;
}

int cmd_verify(const fs::path& file) {
  const qos::ScenarioSpec spec = qos::load_scenario(file);
  const qos::VerifyResult result = qos::verify_scenario(spec);
  for (const auto& line : result.lines) std::cout << line.render() << "\n";
  return result.all_pass() ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slotted QoS scheduling simulator"};
  app.require_subcommand(1);

  std::string run_file;
  std::string run_out = ".";
  bool run_strict = false;
  qos::Slot run_thin = 1;
  std::optional<qos::Slot> z_fault;
  auto* run = app.add_subcommand("run", "Run one scenario file; writes run.csv and summary.json");
  run->add_option("file", run_file, "Scenario JSON")->required();
  run->add_option("--out", run_out, "Output directory");
  run->add_flag("--strict", run_strict, "Abort with exit code 2 on the first bound violation");
  run->add_option("--thin", run_thin, "Record every k-th slot in run.csv")
      ->check(CLI::PositiveNumber);
  run->add_option("--inject-z-fault", z_fault, "Test hook: corrupt Z by +1e6 at this slot")
      ->group("");

  std::string preset_name;
  std::uint64_t preset_seed = 1;
  std::string preset_out = "out";
  qos::Slot preset_thin = 0;
  unsigned preset_threads = 0;
  auto* preset = app.add_subcommand("preset", "Run a reproduction preset");
  preset->add_option("name", preset_name, "Preset name")
      ->required()
      ->check(CLI::IsMember(qos::preset_names()));
  preset->add_option("--seed", preset_seed, "Base seed");
  preset->add_option("--out", preset_out, "Output directory");
  preset->add_option("--thin", preset_thin, "Record every k-th slot (0: preset default)");
  preset->add_option("--threads", preset_threads, "Parallel runs (0: hardware concurrency)");

  std::string verify_file;
  auto* verify = app.add_subcommand("verify", "Run with every invariant and oracle spot checks");
  verify->add_option("file", verify_file, "Scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run) return cmd_run(run_file, run_out, run_strict, run_thin, z_fault);
    if (*preset) return cmd_preset(preset_name, preset_seed, preset_out, preset_thin, preset_threads);
    if (*verify) return cmd_verify(verify_file);
  } catch (const qos::ValidationError& e) {
    print_issues(e);
    return kExitInvalid;
  } catch (const qos::ScenarioParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const qos::QosError& e) {
    std::cerr << fmt::format("error: {}: {}\n", qos::to_string(e.kind()), e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}
