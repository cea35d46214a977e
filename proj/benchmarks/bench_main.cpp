#include <benchmark/benchmark.h>

#include <algorithm>

#include "jigsaw/attack.hpp"
#include "jigsaw/cipher.hpp"
#include "jigsaw/jpeg.hpp"
#include "jigsaw/metrics.hpp"
#include "jigsaw/random.hpp"
#include "jigsaw/restoration.hpp"
#include "jigsaw/solver.hpp"

namespace {

using namespace jigsaw;

// Smooth 224x224 test scene with some texture.
Image scene() {
  Image img(224, 224);
  RandomStream s(11);
  for (int y = 0; y < 224; ++y) {
    for (int x = 0; x < 224; ++x) {
      const int n = static_cast<int>(s.uniform(9)) - 4;
      img.at(x, y, 0) = static_cast<std::uint8_t>(std::clamp(x + n, 0, 255));
      img.at(x, y, 1) = static_cast<std::uint8_t>(std::clamp(y + n, 0, 255));
      img.at(x, y, 2) = static_cast<std::uint8_t>(std::clamp((x * y) / 200 + n, 0, 255));
    }
  }
  return img;
}

void BM_Encrypt(benchmark::State& state) {
  const Image img = scene();
  const KeySet keys = derive_keys(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(encrypt(img, keys, {}));
  }
}
BENCHMARK(BM_Encrypt)->Unit(benchmark::kMillisecond);

void BM_Decrypt(benchmark::State& state) {
  const KeySet keys = derive_keys(1);
  const Image enc = encrypt(scene(), keys, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(decrypt(enc, keys, {}));
  }
}
BENCHMARK(BM_Decrypt)->Unit(benchmark::kMillisecond);

void BM_JpegCycle(benchmark::State& state) {
  const Image img = scene();
  const JpegParams p{70, state.range(0) ? Subsampling::k420 : Subsampling::k444};
  for (auto _ : state) {
    benchmark::DoNotOptimize(jpeg_cycle(img, p));
  }
}
BENCHMARK(BM_JpegCycle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RestoreSubblocks(benchmark::State& state) {
  const Image enc = encrypt(scene(), derive_keys(2), {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(restore_subblocks(enc, {}));
  }
}
BENCHMARK(BM_RestoreSubblocks)->Unit(benchmark::kMillisecond);

void BM_Compatibility(benchmark::State& state) {
  const BlockGrid grid = split_blocks(scene(), 16);
  const Metric metric = state.range(0) ? Metric::Mgc : Metric::Ssd;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_compatibility(grid.blocks, metric));
  }
}
BENCHMARK(BM_Compatibility)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GaSolve(benchmark::State& state) {
  const BlockGrid grid = split_blocks(scene(), 16);
  const CompatibilityTable table = build_compatibility(grid.blocks);
  GaParams params;
  params.generations = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ga_solve(table, 14, 14, params));
  }
}
BENCHMARK(BM_GaSolve)->Arg(5)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_Metrics(benchmark::State& state) {
  RandomStream s(3);
  const Assembly truth = identity_assembly(14, 14);
  const Assembly a{14, 14, draw_permutation(s, 196)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(a, truth));
  }
}
BENCHMARK(BM_Metrics);

}  // namespace

BENCHMARK_MAIN();
