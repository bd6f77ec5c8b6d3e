#include "emm/bounding.hpp"
#include "emm/moment_engine.hpp"
#include "emm/oracle.hpp"
#include "emm/positivity.hpp"
#include "emm/simplex.hpp"

#include <benchmark/benchmark.h>

using namespace emm;

namespace {

void BM_GenerateMhat(benchmark::State& state) {
  const RotationParams params = make_params(Real("0.05"), Real("1.1563"));
  const int p_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_mhat(params, p_max));
}
BENCHMARK(BM_GenerateMhat)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_ChebyshevCenter(benchmark::State& state) {
  std::vector<HalfSpace> cs;
  for (std::size_t l = 0; l < 7; ++l) {
    HalfSpace h{std::vector<Real>(7, Real(0)), Real(0)};
    h.normal[l] = -1;
    cs.push_back(h);
  }
  cs.push_back({std::vector<Real>(7, Real(1)), Real(1)});
  for (int k = 0; k < state.range(0); ++k) {
    HalfSpace h{std::vector<Real>(7), Real("0.2")};
    for (std::size_t l = 0; l < 7; ++l) h.normal[l] = Real(((k * 7 + static_cast<int>(l)) * 37 % 19) - 9) / 9;
    cs.push_back(h);
  }
  for (auto _ : state) benchmark::DoNotOptimize(chebyshev_center(cs, 7));
}
BENCHMARK(BM_ChebyshevCenter)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_Feasibility(benchmark::State& state) {
  const int p_max = static_cast<int>(state.range(0));
  const RotationParams params = make_params(Real("0.01"), Real("1.1563"));
  for (auto _ : state) benchmark::DoNotOptimize(emm_feasible(params, p_max));
}
BENCHMARK(BM_Feasibility)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_OracleGroundEnergy(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(find_ground_energy(0.05));
}
BENCHMARK(BM_OracleGroundEnergy)->Unit(benchmark::kMillisecond);

void BM_OracleMoments(benchmark::State& state) {
  const WavefunctionGrid g = solve_grid(0.05, 1.1562670719881);
  for (auto _ : state) benchmark::DoNotOptimize(numeric_moments(g, -0.492, 40));
}
BENCHMARK(BM_OracleMoments)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
