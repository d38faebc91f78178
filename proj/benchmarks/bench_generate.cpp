#include <cstdint>

#include <benchmark/benchmark.h>
#include <json.hpp>

#include "tensorgen/config.hpp"
#include "tensorgen/factor_gen.hpp"
#include "tensorgen/pipeline.hpp"
#include "tensorgen/rng.hpp"

namespace {

using namespace tensorgen;
using nlohmann::json;

json cube_config(Index dim) {
  return {
      {"seed", 7},
      {"shape", {dim, dim, dim}},
      {"model", {{"type", "cp"}, {"rank", 8}}},
      {"factors", json::object({{"method", "multi_normal"}})},
      {"effects", json::array({json::object({{"kind", "awgn"}, {"snr_db", 20.0}})})},
  };
}

void BM_GenerateDenseCp(benchmark::State& state) {
  const Index dim = state.range(0);
  const GenConfig config = parse_config(cube_config(dim));
  for (auto _ : state) {
    Dataset d = generate(config);
    benchmark::DoNotOptimize(d.manifest.seed);
  }
  state.SetItemsProcessed(state.iterations() * dim * dim * dim);
}
BENCHMARK(BM_GenerateDenseCp)->Arg(16)->Arg(32)->Arg(64)->ArgName("dim");

void BM_GenerateSparseCounts(benchmark::State& state) {
  // Gamma-rate model sampled into integer counts, stored sparse.
  const Index dim = state.range(0);
  const json j = {
      {"seed", 8},
      {"shape", {dim, dim, dim}},
      {"model", {{"type", "cp"}, {"rank", 4}}},
      {"factors", json::object({{"method", "gamma"}, {"mu", 2.0}, {"sigma2", 0.5}, {"theta", 1.0}})},
      {"effects", json::array({json::object({{"kind", "poisson_count"}})})},
  };
  const GenConfig config = parse_config(j);
  for (auto _ : state) {
    Dataset d = generate(config);
    benchmark::DoNotOptimize(d.nnz());
  }
  state.SetItemsProcessed(state.iterations() * dim * dim * dim);
}
BENCHMARK(BM_GenerateSparseCounts)->Arg(16)->Arg(32)->ArgName("dim");

void BM_GenerateTemporal(benchmark::State& state) {
  const Index t_len = state.range(0);
  const json j = {
      {"seed", 9},
      {"shape", {12, 10, t_len}},
      {"temporal_mode", 2},
      {"model", {{"type", "cp"}, {"rank", 3}}},
      {"factors",
       json::array({json::object({{"method", "uniform"}}),
                    json::object({{"method", "multi_normal"}}),
                    json::object({{"method", "periodic"},
                                  {"waves",
                                   json::array({json::object({{"waveform", "sine"}, {"frequency", 2.0}}),
                                                json::object({{"waveform", "square"}, {"frequency", 1.0}}),
                                                json::object({{"waveform", "sawtooth"}, {"frequency", 3.0}})})}})})},
  };
  const GenConfig config = parse_config(j);
  for (auto _ : state) {
    Dataset d = generate(config);
    benchmark::DoNotOptimize(d.norm());
  }
  state.SetItemsProcessed(state.iterations() * 12 * 10 * t_len);
}
BENCHMARK(BM_GenerateTemporal)->Arg(128)->Arg(1024)->ArgName("t_len");

void BM_ParseConfig(benchmark::State& state) {
  const json j = cube_config(32);
  for (auto _ : state) {
    GenConfig c = parse_config(j);
    benchmark::DoNotOptimize(c.seed);
  }
}
BENCHMARK(BM_ParseConfig);

void BM_FactorGamma(benchmark::State& state) {
  const Index rows = state.range(0);
  const RngStream rng(11);
  const GammaParams params{2.0, 0.5, 1.0};
  for (auto _ : state) {
    Matrix m = gen_gamma(rows, 8, params, rng);
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(state.iterations() * rows * 8);
}
BENCHMARK(BM_FactorGamma)->Arg(256)->Arg(4096)->ArgName("rows");

void BM_FactorOrthogonal(benchmark::State& state) {
  const Index rows = state.range(0);
  const RngStream rng(12);
  for (auto _ : state) {
    Matrix m = gen_orthogonal(rows, 8, rng);
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(state.iterations() * rows * 8);
}
BENCHMARK(BM_FactorOrthogonal)->Arg(256)->Arg(4096)->ArgName("rows");

}  // namespace

BENCHMARK_MAIN();
