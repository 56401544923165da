#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "drv/engine.hpp"
#include "drv/monitors.hpp"
#include "drv/scenario.hpp"

namespace drv::fuzz {

struct FuzzVariant {
  int index = 0;                      // 0 is the scenario as given
  std::optional<double> param_value;  // absent when the scenario has no fuzz plan
  Scenario scenario;
};

/// max * 2^(i - n) for i = 1..n; the last value is max exactly.
std::vector<double> ladder(double max_value, int n);

/// Variant 0 is `s` unchanged. Copies 1..n carry the ladder value at the
/// fuzzed field and no fuzz plan of their own. Throws drv::Error with
/// PATH_NOT_FOUND, PATH_NOT_NUMERIC, FUZZ_MAX_BELOW_CURRENT, INVALID_FUZZ
/// or INVALID_VARIANT when a copy fails validation.
std::vector<FuzzVariant> generate_variants(const Scenario& s, const FuzzSpec& f);

struct BoundaryReport {
  std::optional<double> boundary;       // largest passing value
  std::optional<double> first_failure;  // smallest failing value
  bool non_monotone = false;            // a pass follows a failure
  bool operator==(const BoundaryReport&) const = default;
};

/// Input order does not matter. Throws drv::Error("EMPTY_RESULTS").
BoundaryReport find_boundary(std::vector<std::pair<double, monitors::Status>> results);

struct VariantRun {
  int index = 0;
  std::optional<double> param_value;
  std::uint64_t seed = 0;
  engine::RunResult run;
  monitors::Verdict verdict;
};

/// Simulates and evaluates every variant; variant i uses
/// variant_seed(base_seed, i). Results come back in input order.
std::vector<VariantRun> run_variants(const std::vector<FuzzVariant>& variants, std::uint64_t base_seed, int jobs);
/// Single-threaded reference for run_variants.
std::vector<VariantRun> run_variants_serial(const std::vector<FuzzVariant>& variants, std::uint64_t base_seed);

}  // namespace drv::fuzz
