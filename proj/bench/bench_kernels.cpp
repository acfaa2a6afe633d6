#include <numbers>

#include <benchmark/benchmark.h>

#include "thinscan/forward_model.hpp"
#include "thinscan/imaging.hpp"

using namespace thinscan;

namespace {

const InclusionSpec& gamma1() {
  static const InclusionSpec spec{
      SupportingCurve::polynomial_graph(Polynomial({-0.2, 1.0}), Polynomial({0.4, 0.0, -0.5}), -0.5, 0.5), 0.015,
      5.0, 5.0};
  return spec;
}

const DirectionSet& dirs() {
  static const DirectionSet d = make_directions(24, 20);
  return d;
}

const std::vector<TruncatedSvd>& svds() {
  static const std::vector<TruncatedSvd> s = [] {
    std::vector<TruncatedSvd> out;
    const auto freqs = FrequencySet::from_wavelengths(0.3, 0.7, 10, FrequencySpacing::UniformOmega);
    for (double w : freqs.omegas()) out.push_back(truncated_svd(assemble_msr(gamma1(), Background{}, dirs(), w)));
    return out;
  }();
  return s;
}

GridSpec grid(int n) { return GridSpec{-1.1, 1.1, -1.1, 1.1, n, n}; }

void BM_ImageSerial(benchmark::State& state) {
  const auto mode = phi_weighted(Eigen::Vector3d(1, 0, 1));
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_image_serial(svds(), dirs(), mode, 1, grid(static_cast<int>(state.range(0)))));
}

void BM_ImageParallel(benchmark::State& state) {
  const auto mode = phi_weighted(Eigen::Vector3d(1, 0, 1));
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_image(svds(), dirs(), mode, 1, grid(static_cast<int>(state.range(0)))));
}

void BM_MsrSerial(benchmark::State& state) {
  const std::vector<InclusionSpec> incs{gamma1()};
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_msr_serial(incs, Background{}, dirs(), 2 * std::numbers::pi / 0.3,
                                                 static_cast<int>(state.range(0))));
}

void BM_MsrParallel(benchmark::State& state) {
  const std::vector<InclusionSpec> incs{gamma1()};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        assemble_msr(incs, Background{}, dirs(), 2 * std::numbers::pi / 0.3, static_cast<int>(state.range(0))));
}

}  // namespace

BENCHMARK(BM_ImageSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ImageParallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MsrSerial)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MsrParallel)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
