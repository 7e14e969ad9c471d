#include <benchmark/benchmark.h>

#include "ogsdeconv/blind_solver.hpp"
#include "ogsdeconv/convolution.hpp"
#include "ogsdeconv/evalkit.hpp"
#include "ogsdeconv/nonblind.hpp"
#include "ogsdeconv/ogs_prior.hpp"
#include "ogsdeconv/synthetic.hpp"

using namespace ogsd;

namespace {

Image observation(int n) {
  return synth_blur(synthetic::builtin_image("shapes", n, n), synthetic::builtin_kernel("motion-diag-9"),
                    0.005, 1);
}

void BM_Conv2Same(benchmark::State& state) {
  const Image x = observation(static_cast<int>(state.range(0)));
  const Kernel h = synthetic::builtin_kernel("motion-diag-9");
  const auto mode = state.range(1) ? BoundaryMode::symmetric : BoundaryMode::circular;
  for (auto _ : state) benchmark::DoNotOptimize(conv2_same(x, h, mode));
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_Conv2Same)->ArgsProduct({{64, 128, 256}, {0, 1}});

void BM_LambdaWeights(benchmark::State& state) {
  const Image x = observation(static_cast<int>(state.range(0)));
  const Image g = apply_filter(x, FilterBank::first_differences(2)[0], BoundaryMode::circular);
  const GroupGeometry geo(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(lambda_weights(g, geo));
}
BENCHMARK(BM_LambdaWeights)->ArgsProduct({{64, 256}, {1, 3, 5}});

void BM_XStep(benchmark::State& state) {
  SolverConfig cfg;
  cfg.boundary = state.range(1) ? BoundaryMode::symmetric : BoundaryMode::circular;
  const Image y = observation(static_cast<int>(state.range(0)));
  const Kernel h = synthetic::builtin_kernel("motion-diag-9");
  const auto g = apply_filter_bank(y, cfg.filter_bank(), cfg.boundary);
  const GammaField gamma = gamma_update(g, cfg.prior);
  std::vector<Image> w;
  for (const Image& gm : g) w.push_back(lambda_weights(gm, cfg.geometry()));
  for (auto _ : state) benchmark::DoNotOptimize(x_step(y, h, gamma, w, cfg, &y));
}
BENCHMARK(BM_XStep)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_HStep(benchmark::State& state) {
  SolverConfig cfg;
  const int k = static_cast<int>(state.range(1));
  const Image x = synthetic::builtin_image("shapes", static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  const Image y = synth_blur(x, synthetic::builtin_kernel("motion-diag-9"), 0.005, 2);
  const Kernel prev = Kernel::uniform(k);
  for (auto _ : state) benchmark::DoNotOptimize(h_step(y, x, k, cfg, prev));
}
BENCHMARK(BM_HStep)->ArgsProduct({{64, 128}, {9, 15}})->Unit(benchmark::kMillisecond);

void BM_Irls(benchmark::State& state) {
  const Image y = observation(static_cast<int>(state.range(0)));
  const Kernel h = synthetic::builtin_kernel("motion-diag-9");
  for (auto _ : state) benchmark::DoNotOptimize(irls_deconv(y, h));
}
BENCHMARK(BM_Irls)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
