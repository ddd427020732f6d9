#include <benchmark/benchmark.h>

#include <random>

#include "vesselseg/backend.hpp"
#include "vesselseg/fixpoint.hpp"
#include "vesselseg/metrics.hpp"
#include "vesselseg/phantom.hpp"
#include "vesselseg/pipeline.hpp"
#include "vesselseg/unet3d.hpp"
#include "vesselseg/volume.hpp"
#include "vesselseg/weights.hpp"

using namespace vseg;

namespace {

Volume3 bench_volume(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> dist(-1024.f, 400.f);
  Volume3 vol({n, n, n}, {1, 1, 1});
  for (auto& v : vol.data()) v = dist(rng);
  return vol;
}

Mask3 bench_mask(int n, double density, unsigned seed) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution coin(density);
  Mask3 mask({n, n, n}, {1, 1, 1});
  for (auto& v : mask.data()) v = coin(rng) ? 1 : 0;
  return mask;
}

}  // namespace

static void BM_Conv3d(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937 rng(1);
  std::uniform_real_distribution<float> dist(-1.f, 1.f);
  Tensor4 in(8, n, n, n);
  for (auto& v : in.data()) v = dist(rng);
  std::vector<float> kernel(8 * 8 * 27);
  for (auto& v : kernel) v = dist(rng);
  std::vector<float> bias(8, 0.1f);
  for (auto _ : state) {
    Tensor4 out = conv3d(in, kernel, 8, 8, 3, bias);
    benchmark::DoNotOptimize(out.data().data());
  }
  state.SetItemsProcessed(state.iterations() * in.spatial_size());
}
BENCHMARK(BM_Conv3d)->Arg(16)->Arg(32);

static void BM_TrilinearResample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Volume3 vol = bench_volume(n, 2);
  for (auto _ : state) {
    Volume3 out = resample_trilinear(vol, {2 * n, 2 * n, 2 * n});
    benchmark::DoNotOptimize(out.data().data());
  }
  state.SetItemsProcessed(state.iterations() * 8 * vol.voxel_count());
}
BENCHMARK(BM_TrilinearResample)->Arg(32)->Arg(64);

static void BM_DistanceTransform(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mask3 mask = bench_mask(n, 0.02, 3);
  for (auto _ : state) {
    auto dist = squared_distance_transform(mask);
    benchmark::DoNotOptimize(dist.data());
  }
  state.SetItemsProcessed(state.iterations() * mask.voxel_count());
}
BENCHMARK(BM_DistanceTransform)->Arg(32)->Arg(64);

static void BM_Hausdorff(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mask3 a = bench_mask(n, 0.05, 4);
  const Mask3 b = bench_mask(n, 0.05, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hausdorff(a, b));
  }
}
BENCHMARK(BM_Hausdorff)->Arg(32)->Arg(64);

static void BM_ConnectedComponents(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mask3 mask = bench_mask(n, 0.2, 6);
  for (auto _ : state) {
    auto cc = connected_components(mask, 26);
    benchmark::DoNotOptimize(cc.labels.data());
  }
  state.SetItemsProcessed(state.iterations() * mask.voxel_count());
}
BENCHMARK(BM_ConnectedComponents)->Arg(32)->Arg(64);

static void BM_AnalyticSlidingWindow(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  PhantomSpec spec;
  spec.shape = {n, n, n};
  spec.seed = 9;
  spec.branch_count = 0;
  spec.trunk_radius_voxels = 5.0;
  const Phantom ph = generate_phantom(spec);
  const AnalyticBackend backend;
  const std::vector<const InferenceBackend*> backends{&backend};
  SegConfig cfg;
  cfg.coarse_shape = {32, 32, 32};
  cfg.fine_patch = {32, 32, 32};
  for (auto _ : state) {
    auto probs = sliding_window_infer(ph.volume, backends, cfg);
    benchmark::DoNotOptimize(probs.front().data().data());
  }
  state.SetItemsProcessed(state.iterations() * ph.volume.voxel_count());
}
BENCHMARK(BM_AnalyticSlidingWindow)->Arg(64)->Arg(96);

BENCHMARK_MAIN();
