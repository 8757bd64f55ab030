// Parallel kernels against their serial reference versions.

#include <benchmark/benchmark.h>

#include <numbers>

#include "slrbf/interp_global.hpp"
#include "slrbf/interp_local.hpp"
#include "slrbf/interp_pu.hpp"
#include "slrbf/reference.hpp"
#include "slrbf/testcases.hpp"

namespace {

using namespace slrbf;

const NodeSet& bench_nodes() {
  static const NodeSet nodes = icosahedral_nodes(4);
  return nodes;
}

const std::vector<Vec3>& bench_targets() {
  static const std::vector<Vec3> t =
      compute_departures(solid_body_velocity(std::numbers::pi / 2), bench_nodes(), 0.3, 0.3);
  return t;
}

const std::vector<double>& bench_field() {
  static const std::vector<double> f = sample(bench_nodes(), cosine_bell_ic);
  return f;
}

void BM_departures_parallel(benchmark::State& state) {
  const auto u = deformational_velocity();
  for (auto _ : state) benchmark::DoNotOptimize(compute_departures(u, bench_nodes(), 1.0, 0.1));
}
BENCHMARK(BM_departures_parallel);

void BM_departures_serial(benchmark::State& state) {
  const auto u = deformational_velocity();
  for (auto _ : state) benchmark::DoNotOptimize(reference::compute_departures(u, bench_nodes().points(), 1.0, 0.1));
}
BENCHMARK(BM_departures_serial);

void BM_local_parallel(benchmark::State& state) {
  static const LocalInterpolant li = LocalInterpolant::build(bench_nodes(), 31);
  for (auto _ : state) benchmark::DoNotOptimize(li.evaluate(bench_field(), bench_targets()));
}
BENCHMARK(BM_local_parallel);

void BM_local_serial(benchmark::State& state) {
  static const LocalInterpolant li = LocalInterpolant::build(bench_nodes(), 31);
  for (auto _ : state) benchmark::DoNotOptimize(reference::local_evaluate(li, bench_field(), bench_targets()));
}
BENCHMARK(BM_local_serial);

void BM_pu_parallel(benchmark::State& state) {
  static PUInterpolant pu = PUInterpolant::build(bench_nodes(), PUOptions{31, 2.5});
  for (auto _ : state) benchmark::DoNotOptimize(pu.evaluate(bench_field(), bench_targets()));
}
BENCHMARK(BM_pu_parallel);

void BM_pu_serial(benchmark::State& state) {
  static const PUInterpolant pu = PUInterpolant::build(bench_nodes(), PUOptions{31, 2.5});
  for (auto _ : state) benchmark::DoNotOptimize(reference::pu_evaluate(pu, bench_field(), bench_targets()));
}
BENCHMARK(BM_pu_serial);

void BM_global_parallel(benchmark::State& state) {
  static GlobalInterpolant g = [] {
    auto gi = GlobalInterpolant::build(bench_nodes());
    gi.fit(bench_field());
    return gi;
  }();
  for (auto _ : state) benchmark::DoNotOptimize(g.evaluate(bench_targets()));
}
BENCHMARK(BM_global_parallel);

void BM_global_serial(benchmark::State& state) {
  static GlobalInterpolant g = [] {
    auto gi = GlobalInterpolant::build(bench_nodes());
    gi.fit(bench_field());
    return gi;
  }();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::global_evaluate(bench_nodes().points(), g.kernel(), g.coefficients(), bench_targets()));
  }
}
BENCHMARK(BM_global_serial);

}  // namespace

BENCHMARK_MAIN();
