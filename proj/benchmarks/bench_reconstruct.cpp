#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "tensorgen/factor_gen.hpp"
#include "tensorgen/rng.hpp"
#include "tensorgen/tensor.hpp"

namespace {

using namespace tensorgen;

CpModel make_cp(Index dim, Index order, Index rank) {
  const RngStream rng(42);
  CpModel model;
  for (Index n = 0; n < order; ++n)
    model.factors.push_back(gen_multi_normal(dim, rank, rng.substream({1, static_cast<std::uint64_t>(n)})));
  model.lambda = gen_weights(WeightMethod::uniform, rank, {}, rng.substream({2}));
  return model;
}

TuckerModel make_tucker(Index dim, Index order, Index rank) {
  const RngStream rng(43);
  TuckerModel model;
  std::vector<Index> ranks;
  for (Index n = 0; n < order; ++n) {
    model.factors.push_back(gen_multi_normal(dim, rank, rng.substream({1, static_cast<std::uint64_t>(n)})));
    ranks.push_back(rank);
  }
  const Shape core_shape(ranks);
  const Vector flat = gen_weights(WeightMethod::normal, core_shape.numel(), {}, rng.substream({2}));
  model.core = DenseTensor(core_shape, std::vector<double>(flat.data(), flat.data() + flat.size()));
  return model;
}

void BM_CpReconstruct(benchmark::State& state) {
  const Index dim = state.range(0);
  const Index rank = state.range(1);
  const CpModel model = make_cp(dim, 3, rank);
  for (auto _ : state) {
    DenseTensor t = cp_reconstruct(model);
    benchmark::DoNotOptimize(t.data());
  }
  state.SetItemsProcessed(state.iterations() * dim * dim * dim);
}
BENCHMARK(BM_CpReconstruct)
    ->ArgsProduct({{16, 32, 64}, {4, 16}})
    ->ArgNames({"dim", "rank"});

void BM_TuckerReconstruct(benchmark::State& state) {
  const Index dim = state.range(0);
  const Index rank = state.range(1);
  const TuckerModel model = make_tucker(dim, 3, rank);
  for (auto _ : state) {
    DenseTensor t = tucker_reconstruct(model);
    benchmark::DoNotOptimize(t.data());
  }
  state.SetItemsProcessed(state.iterations() * dim * dim * dim);
}
BENCHMARK(BM_TuckerReconstruct)
    ->ArgsProduct({{16, 32}, {2, 4, 8}})
    ->ArgNames({"dim", "rank"});

void BM_CpReconstructOrder(benchmark::State& state) {
  // Fixed element budget (~64k) spread over a growing number of modes.
  const Index order = state.range(0);
  const Index dim = order == 2 ? 256 : (order == 3 ? 40 : 16);
  const CpModel model = make_cp(dim, order, 8);
  for (auto _ : state) {
    DenseTensor t = cp_reconstruct(model);
    benchmark::DoNotOptimize(t.data());
  }
  state.SetItemsProcessed(state.iterations() * model.shape().numel());
}
BENCHMARK(BM_CpReconstructOrder)->Arg(2)->Arg(3)->Arg(4)->ArgName("order");

void BM_SparseRoundTrip(benchmark::State& state) {
  const Index dim = state.range(0);
  const CpModel model = make_cp(dim, 3, 4);
  const DenseTensor dense = cp_reconstruct(model);
  for (auto _ : state) {
    SparseTensor s = to_sparse(dense);
    DenseTensor back = s.to_dense();
    benchmark::DoNotOptimize(back.data());
  }
  state.SetItemsProcessed(state.iterations() * dim * dim * dim);
}
BENCHMARK(BM_SparseRoundTrip)->Arg(16)->Arg(32)->ArgName("dim");

}  // namespace

BENCHMARK_MAIN();
