#include "drv/cli.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "drv/engine.hpp"
#include "drv/error.hpp"
#include "drv/fuzz.hpp"
#include "drv/monitors.hpp"
#include "drv/report.hpp"
#include "drv/scenario.hpp"

namespace drv::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IO_ERROR", fmt::format("cannot read '{}'", path));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

void print_violation(std::ostream& out, const monitors::Violation& v) {
  out << fmt::format("{} t={:.3f} drones={} measured={:.3f} threshold={:.3f} {}: {}\n", v.monitor_id, v.t_s,
                     join(v.drone_ids, ","), v.measured, v.threshold, v.unit, v.message);
}

std::string format_value(const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : "-"; }

// Loads and validates; prints problems and returns false when unusable.
bool load_valid(const std::string& path, Scenario& s, std::ostream& err) {
  try {
    s = load_scenario(path);
  } catch (const Error& e) {
    err << e.code() << " " << e.what() << "\n";
    return false;
  }
  const auto diags = validate(s);
  for (const auto& d : diags) err << d.code << " " << d.path << " " << d.message << "\n";
  return diags.empty();
}

}  // namespace

int cmd_validate(const std::string& scenario_path, std::ostream& out, std::ostream& err) {
  Scenario s;
  try {
    s = load_scenario(scenario_path);
  } catch (const Error& e) {
    err << e.code() << " " << e.what() << "\n";
    return kUsageError;
  }
  const auto diags = validate(s);
  for (const auto& d : diags) out << d.code << " " << d.path << " " << d.message << "\n";
  return diags.empty() ? kPassed : kUsageError;
}

int cmd_run(const std::string& scenario_path, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  Scenario s;
  if (!load_valid(scenario_path, s, err)) return kUsageError;
  if (opts.variants) {
    if (s.fuzz) {
      s.fuzz->variants = *opts.variants;
    } else {
      err << "warning: --variants ignored, the scenario has no fuzz plan\n";
    }
  }
  const std::uint64_t base_seed = opts.seed.value_or(s.sim.seed);

  std::vector<fuzz::FuzzVariant> variants;
  try {
    if (s.fuzz) {
      variants = fuzz::generate_variants(s, *s.fuzz);
    } else {
      variants.push_back({0, std::nullopt, s});
    }
  } catch (const Error& e) {
    err << e.code() << " " << e.what() << "\n";
    return kUsageError;
  }

  try {
    const auto runs = fuzz::run_variants(variants, base_seed, opts.jobs);
    std::vector<report::RunReport> reports;
    std::vector<report::VariantArtifacts> artifacts;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& r = runs[i];
      reports.push_back(report::build_run_report(r.run, r.verdict, variants[i].scenario, r.index, r.param_value));
      artifacts.push_back({r.index, &variants[i].scenario, r.seed, &r.run});
    }
    const auto ar = report::build_acceptance_report(s, std::move(reports));
    report::write_report(ar, artifacts, opts.out_dir, opts.svg);

    for (const auto& r : ar.runs) {
      std::vector<std::string> failed;
      for (const auto& v : r.violations) {
        if (std::find(failed.begin(), failed.end(), v.monitor_id) == failed.end()) failed.push_back(v.monitor_id);
      }
      out << fmt::format("variant {} param={} {} violations={}", r.variant, format_value(r.param_value),
                         monitors::to_string(r.status), r.violations.size());
      if (!failed.empty()) out << " [" << join(failed, ",") << "]";
      out << "\n";
    }
    if (ar.boundary) {
      out << fmt::format("boundary {}={} first_failure={}{}\n", ar.fuzz->param_path, format_value(ar.boundary->boundary),
                         format_value(ar.boundary->first_failure), ar.boundary->non_monotone ? " NON_MONOTONE" : "");
    }
    out << "overall " << monitors::to_string(ar.overall_status) << "\n";
    return ar.overall_status == monitors::Status::PASSED ? kPassed : kFailed;
  } catch (const Error& e) {
    err << e.code() << " " << e.what() << "\n";
    return kInternalError;
  } catch (const std::exception& e) {
    err << "INTERNAL " << e.what() << "\n";
    return kInternalError;
  }
}

int cmd_check(const std::string& telemetry_path, const std::string& scenario_path, std::ostream& out,
              std::ostream& err) {
  Scenario s;
  if (!load_valid(scenario_path, s, err)) return kUsageError;
  std::vector<engine::TelemetryRecord> telemetry;
  try {
    telemetry = engine::read_telemetry_csv(read_file(telemetry_path));
  } catch (const Error& e) {
    err << e.code() << " " << e.what() << "\n";
    return kUsageError;
  }
  try {
    const auto verdict = monitors::evaluate(s.monitors, telemetry, s);
    for (const auto& v : verdict.violations) print_violation(out, v);
    out << monitors::to_string(verdict.status) << "\n";
    return verdict.status == monitors::Status::PASSED ? kPassed : kFailed;
  } catch (const std::exception& e) {
    err << "INTERNAL " << e.what() << "\n";
    return kInternalError;
  }
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scenario simulation, runtime monitoring and fuzzing for small drone missions", "drv_sim"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string telemetry_path;
  RunOptions opts;
  std::uint64_t seed = 0;
  int variants = 0;

  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file and list problems");
  validate_cmd->add_option("scenario", scenario_path, "Scenario file")->required();

  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and its fuzz variants, then write the report");
  run_cmd->add_option("scenario", scenario_path, "Scenario file")->required();
  run_cmd->add_option("--out", opts.out_dir, "Report directory")->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_flag("--svg", opts.svg, "Write path.svg for every variant");
  auto* variants_opt =
      run_cmd->add_option("--variants", variants, "Override the number of fuzz variants")->check(CLI::PositiveNumber);
  run_cmd->add_option("--jobs", opts.jobs, "Variant runs in parallel")
      ->envname("DRV_SIM_JOBS")
      ->check(CLI::PositiveNumber);

  auto* check_cmd = app.add_subcommand("check", "Evaluate a scenario's monitors over an existing telemetry CSV");
  check_cmd->add_option("telemetry", telemetry_path, "Telemetry CSV")->required();
  check_cmd->add_option("scenario", scenario_path, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPassed : kUsageError;
  }

  if (*seed_opt) opts.seed = seed;
  if (*variants_opt) opts.variants = variants;

  if (validate_cmd->parsed()) return cmd_validate(scenario_path, out, err);
  if (run_cmd->parsed()) return cmd_run(scenario_path, opts, out, err);
  return cmd_check(telemetry_path, scenario_path, out, err);
}

}  // namespace drv::cli
