// Serial reference vs OpenMP kernels: fuzz variant runs and the pairwise
// separation check.

#include <string>

#include <benchmark/benchmark.h>

#include "drv/engine.hpp"
#include "drv/fuzz.hpp"
#include "drv/monitors.hpp"
#include "drv/scenario.hpp"

namespace {

const drv::Scenario& circle() {
  static const auto s = drv::load_scenario(std::string(DRV_FIXTURE_DIR) + "/circle_fuzz_cruise13.json");
  return s;
}

const std::vector<drv::fuzz::FuzzVariant>& variants() {
  static const auto v = [] {
    auto f = *circle().fuzz;
    f.variants = 8;
    return drv::fuzz::generate_variants(circle(), f);
  }();
  return v;
}

const std::vector<drv::engine::TelemetryRecord>& beach_telemetry() {
  static const auto t = [] {
    const auto s = drv::load_scenario(std::string(DRV_FIXTURE_DIR) + "/uc2_beach.json");
    return drv::engine::simulate(s, s.sim.seed).telemetry;
  }();
  return t;
}

void BM_VariantsSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(drv::fuzz::run_variants_serial(variants(), 1));
}

void BM_VariantsParallel(benchmark::State& state) {
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(drv::fuzz::run_variants(variants(), 1, jobs));
}

void BM_SeparationSerial(benchmark::State& state) {
  const auto& t = beach_telemetry();
  for (auto _ : state) benchmark::DoNotOptimize(drv::monitors::check_separation_serial(t, 150.0, std::nullopt));
}

void BM_SeparationParallel(benchmark::State& state) {
  const auto& t = beach_telemetry();
  for (auto _ : state) benchmark::DoNotOptimize(drv::monitors::check_separation(t, 150.0, std::nullopt));
}

}  // namespace

BENCHMARK(BM_VariantsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VariantsParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeparationSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeparationParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
