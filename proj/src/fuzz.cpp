#include "drv/fuzz.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <fmt/format.h>

#include "drv/error.hpp"
#include "drv/rng.hpp"

namespace drv::fuzz {

namespace {

VariantRun run_one(const FuzzVariant& v, std::uint64_t base_seed) {
  VariantRun out;
  out.index = v.index;
  out.param_value = v.param_value;
  out.seed = variant_seed(base_seed, static_cast<std::uint64_t>(v.index));
  out.run = engine::simulate(v.scenario, out.seed);
  out.verdict = monitors::evaluate(v.scenario.monitors, out.run, v.scenario);
  return out;
}

}  // namespace

std::vector<double> ladder(double max_value, int n) {
  std::vector<double> out;
  for (int i = 1; i <= n; ++i) out.push_back(std::ldexp(max_value, i - n));
  return out;
}

std::vector<FuzzVariant> generate_variants(const Scenario& s, const FuzzSpec& f) {
  if (f.variants < 1) throw Error("INVALID_FUZZ", "variants must be >= 1");
  if (!(std::isfinite(f.max_value) && f.max_value > 0.0)) throw Error("INVALID_FUZZ", "max must be positive");
  const double current = read_param(s, f.param_path);
  if (!(f.max_value > current || current == 0.0)) {
    throw Error("FUZZ_MAX_BELOW_CURRENT",
                fmt::format("max {} does not exceed the current value {} of {}", f.max_value, current, f.param_path));
  }

  std::vector<FuzzVariant> out;
  out.push_back({0, current, s});
  int index = 0;
  for (double value : ladder(f.max_value, f.variants)) {
    FuzzVariant v{++index, value, s};
    v.scenario.fuzz.reset();
    resolve_param_path(v.scenario, f.param_path).set(value);
    if (const auto diags = validate(v.scenario); !diags.empty()) {
      throw Error("INVALID_VARIANT", fmt::format("variant {} ({} = {}) is invalid: {} {}: {}", v.index, f.param_path,
                                                 value, diags.front().code, diags.front().path, diags.front().message));
    }
    out.push_back(std::move(v));
  }
  return out;
}

BoundaryReport find_boundary(std::vector<std::pair<double, monitors::Status>> results) {
  if (results.empty()) throw Error("EMPTY_RESULTS", "no results to fold");
  std::stable_sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    return a.first < b.first || (a.first == b.first && a.second < b.second);
  });
  BoundaryReport out;
  for (const auto& [value, status] : results) {
    if (status == monitors::Status::PASSED) {
      out.boundary = value;
      if (out.first_failure) out.non_monotone = true;
    } else if (!out.first_failure) {
      out.first_failure = value;
    }
  }
  return out;
}

std::vector<VariantRun> run_variants(const std::vector<FuzzVariant>& variants, std::uint64_t base_seed, int jobs) {
  std::vector<VariantRun> out(variants.size());
  std::vector<std::exception_ptr> errors(variants.size());
  const auto count = static_cast<long long>(variants.size());
  const int threads = std::max(1, jobs);

#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = run_one(variants[k], base_seed);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<VariantRun> run_variants_serial(const std::vector<FuzzVariant>& variants, std::uint64_t base_seed) {
  std::vector<VariantRun> out;
  out.reserve(variants.size());
  for (const auto& v : variants) out.push_back(run_one(v, base_seed));
  return out;
}

}  // namespace drv::fuzz
