// Microbenchmarks for the hot paths: routing, occupancy recount, profile
// sampling and one LIF forward/backward step.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mosaic/profile.hpp"
#include "mosaic/rng.hpp"
#include "mosaic/router.hpp"
#include "mosaic/snn.hpp"

using namespace mosaic;

namespace {

Mask random_mask(int n, double density, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution bit(density);
  Mask m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (bit(rng)) m.set(i, j);
  return m;
}

void BM_RouteSingle(benchmark::State& state) {
  const TileLattice lat(GridConfig{8, 8, 16, 256, 256});
  const int n = lat.config().nt_count();
  int src = 0, dst = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(route_single(src, dst, lat));
    dst = (dst + 7) % n;
    if (dst == src) dst = (dst + 1) % n;
  }
}
BENCHMARK(BM_RouteSingle);

void BM_RouteAxonMulticast(benchmark::State& state) {
  const TileLattice lat(GridConfig{8, 8, 16, 256, 256});
  const int n = lat.config().nt_count();
  std::vector<int> dests;
  for (int d = 1; d < n; d += 4) dests.push_back(d);
  for (auto _ : state)
    benchmark::DoNotOptimize(route_axon(NeuronId{0, 0}, dests, lat));
}
BENCHMARK(BM_RouteAxonMulticast);

void BM_ComputeOccupancy(benchmark::State& state) {
  const GridConfig cfg{4, 4, 16, 4096, 4096};
  const TileLattice lat(cfg);
  const Placement place = Placement::blocked(cfg);
  const Mask m = random_mask(cfg.total_neurons(),
                             static_cast<double>(state.range(0)) / 100.0, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_occupancy(m, place, lat));
}
BENCHMARK(BM_ComputeOccupancy)->Arg(2)->Arg(10);

void BM_SampleMaskWithProfile(benchmark::State& state) {
  const GridConfig cfg{4, 4, 16, 4096, 4096};
  const TileLattice lat(cfg);
  const Placement place = Placement::blocked(cfg);
  SparsityProfile target;
  target.p.assign(static_cast<std::size_t>(lat.max_hop_distance() + 1), 0.0);
  target.p[0] = 0.4;
  target.p[1] = 0.06;
  target.p[3] = 0.015;
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        sample_mask_with_profile(target, place, lat, ++seed));
}
BENCHMARK(BM_SampleMaskWithProfile);

void BM_LIFForwardBackward(benchmark::State& state) {
  const int n = 256, channels = 64, classes = 8, steps = 40, batch = 32;
  Rng rng(3);
  std::normal_distribution<double> dist(0.0, 0.1);
  NetworkParams p;
  p.w_in = Eigen::MatrixXd::NullaryExpr(n, channels, [&] { return dist(rng); });
  p.w_rec = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return dist(rng); });
  p.w_out = Eigen::MatrixXd::NullaryExpr(classes, n, [&] { return dist(rng); });
  std::bernoulli_distribution spike(0.1);
  std::vector<Eigen::MatrixXd> x;
  for (int t = 0; t < steps; ++t)
    x.push_back(Eigen::MatrixXd::NullaryExpr(
        channels, batch, [&] { return spike(rng) ? 1.0 : 0.0; }));
  std::vector<int> labels(batch);
  for (int b = 0; b < batch; ++b) labels[b] = b % classes;
  LIFParams lif;
  lif.tau_mem = 10.0;
  Gradients grads;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        loss_and_gradients(p, lif, x, labels, nullptr, grads));
  }
}
BENCHMARK(BM_LIFForwardBackward);

}  // namespace

BENCHMARK_MAIN();
