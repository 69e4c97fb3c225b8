#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "intent/eval.hpp"
#include "intent/model.hpp"
#include "intent/rng.hpp"
#include "intent/signal.hpp"
#include "intent/stats.hpp"

using namespace intent;

namespace {

std::vector<WindowTensor> random_batch(std::size_t n, std::size_t length, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<WindowTensor> batch(n);
  for (std::size_t i = 0; i < n; ++i) {
    batch[i].length = length;
    batch[i].label = static_cast<int>(i % 2);
    batch[i].values.resize(kAxes * length);
    for (auto& v : batch[i].values) v = rng.normal();
  }
  return batch;
}

void BM_Forward(benchmark::State& state) {
  const auto net = init_model(1);
  const auto batch = random_batch(32, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(forward(net, batch));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_Forward)->Arg(50)->Arg(200);

void BM_LossAndGradient(benchmark::State& state) {
  auto net = init_model(1);
  const auto batch = random_batch(32, static_cast<std::size_t>(state.range(0)), 3);
  std::vector<std::size_t> idx(batch.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> grad(net.param_count());
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(net, batch, idx, grad));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_LossAndGradient)->Arg(50)->Arg(200);

void BM_RocAuc(benchmark::State& state) {
  Rng rng(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform();
    labels[i] = rng.bernoulli(0.5) ? 1 : 0;
  }
  labels[0] = 0;
  labels[1] = 1;
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(scores, labels));
}
BENCHMARK(BM_RocAuc)->Arg(100)->Arg(10000);

void BM_TSfLog10(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stats::t_sf_log10(t, 198.0));
}
BENCHMARK(BM_TSfLog10)->Arg(2)->Arg(40);

}  // namespace
BENCHMARK_MAIN();
