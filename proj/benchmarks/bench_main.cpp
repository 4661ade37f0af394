#include <benchmark/benchmark.h>

#include <filesystem>
#include <string>

#include "l2approx/analysis.hpp"
#include "l2approx/exact_linalg.hpp"
#include "l2approx/folner.hpp"
#include "l2approx/inertia.hpp"

using namespace l2approx;

namespace {

const PeriodicComplex& torus() {
  static const PeriodicComplex x = load_complex_file(std::filesystem::path(L2APPROX_FIXTURE_DIR) / "torus.json");
  return x;
}

SparseIntMatrix torus_laplacian(std::size_t m, int j) {
  const FinitePiece piece = build_piece(torus(), FolnerBox{m, 2});
  return assemble(piece, torus(), j, BoundaryCondition::absolute).matrix;
}

void BM_RationalRank(benchmark::State& state) {
  const SparseIntMatrix a = torus_laplacian(static_cast<std::size_t>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(rational_rank(a));
  state.SetLabel("n=" + std::to_string(a.rows()));
}
BENCHMARK(BM_RationalRank)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_ModularRank(benchmark::State& state) {
  const SparseIntMatrix a = torus_laplacian(static_cast<std::size_t>(state.range(0)), 1);
  const std::uint64_t p = modular::primes(1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(rank_mod(a, p));
  state.SetLabel("n=" + std::to_string(a.rows()));
}
BENCHMARK(BM_ModularRank)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CharPoly(benchmark::State& state) {
  const SparseIntMatrix a = torus_laplacian(static_cast<std::size_t>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(characteristic_polynomial(a));
  state.SetLabel("n=" + std::to_string(a.rows()));
}
BENCHMARK(BM_CharPoly)->Arg(9)->Arg(19)->Unit(benchmark::kMillisecond);

void BM_InertiaCount(benchmark::State& state) {
  const SparseIntMatrix a = torus_laplacian(static_cast<std::size_t>(state.range(0)), 1);
  const InertiaCounter counter(a);
  for (auto _ : state) benchmark::DoNotOptimize(counter.count_below(0.5));
  state.SetLabel("n=" + std::to_string(a.rows()));
}
BENCHMARK(BM_InertiaCount)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_OracleDensity(benchmark::State& state) {
  const LaplacianFamily family = laplacians(torus());
  OracleOptions options;
  options.grid_size = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(density(family.laplacians[1], options).betti());
}
BENCHMARK(BM_OracleDensity)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
