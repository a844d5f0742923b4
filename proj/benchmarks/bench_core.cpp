// Hot paths of the pipeline: state metrics, photon statistics, trace
// simulation and moment estimation.

#include "cvgauss/entanglement.hpp"
#include "cvgauss/fock.hpp"
#include "cvgauss/homodyne.hpp"
#include "cvgauss/opo_model.hpp"
#include "cvgauss/tomography.hpp"

#include <benchmark/benchmark.h>

using namespace cvgauss;

namespace {

const NoiseModel kNoise = NoiseModel::from_db(kDefaultDetectionEfficiency, kDefaultElectronicNoiseDb);

void BM_SymplecticEigenvalues(benchmark::State& state) {
    const auto s = reference_state();
    for (auto _ : state) benchmark::DoNotOptimize(symplectic_eigenvalues(s));
}
BENCHMARK(BM_SymplecticEigenvalues);

void BM_SymplecticEigenvaluesGeneric(benchmark::State& state) {
    const auto s = reference_state();
    for (auto _ : state) benchmark::DoNotOptimize(symplectic_eigenvalues_generic(s));
}
BENCHMARK(BM_SymplecticEigenvaluesGeneric);

void BM_FullReport(benchmark::State& state) {
    const auto s = reference_state();
    const Matrix4 errors = Matrix4::Constant(0.004);
    for (auto _ : state) benchmark::DoNotOptimize(full_report(s, errors));
}
BENCHMARK(BM_FullReport)->Unit(benchmark::kMicrosecond);

void BM_EntanglementOfFormation(benchmark::State& state) {
    const auto s = reference_state();
    for (auto _ : state) benchmark::DoNotOptimize(entanglement_of_formation(s));
}
BENCHMARK(BM_EntanglementOfFormation)->Unit(benchmark::kMicrosecond);

void BM_JointDistribution(benchmark::State& state) {
    const auto s = reference_state();
    const int n_max = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(joint_distribution(s, n_max));
    state.SetComplexityN(n_max);
}
BENCHMARK(BM_JointDistribution)->RangeMultiplier(2)->Range(10, 80)->Unit(benchmark::kMicrosecond)->Complexity();

void BM_SimulateTrace(benchmark::State& state) {
    const auto s = reference_state();
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_trace(s, ModeLabel::e, kNoise, n, 42));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_SimulateTrace)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_ReconstructSingleMode(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto trace = simulate_trace(reference_state(), ModeLabel::c, kNoise, n, 42);
    for (auto _ : state) benchmark::DoNotOptimize(reconstruct_single_mode(trace, kNoise.eta));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_ReconstructSingleMode)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_KurtosisCheck(benchmark::State& state) {
    const auto trace = simulate_trace(reference_state(), ModeLabel::c, kNoise, 1'000'000, 42);
    for (auto _ : state) benchmark::DoNotOptimize(kurtosis_check(trace, 100));
}
BENCHMARK(BM_KurtosisCheck)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
