#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace drv::cli {

enum ExitCode : int { kPassed = 0, kFailed = 1, kUsageError = 2, kInternalError = 3 };

struct RunOptions {
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool svg = false;
  std::optional<int> variants;
  int jobs = 1;
};

int cmd_validate(const std::string& scenario_path, std::ostream& out, std::ostream& err);
int cmd_run(const std::string& scenario_path, const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check(const std::string& telemetry_path, const std::string& scenario_path, std::ostream& out,
              std::ostream& err);

/// Full command line including argv[0].
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace drv::cli
