#include <benchmark/benchmark.h>

#include <vector>

#include "tadac/appearance.hpp"
#include "tadac/contrastive.hpp"
#include "tadac/distortion.hpp"
#include "tadac/pairing.hpp"
#include "tadac/regression.hpp"
#include "tadac/rng.hpp"

namespace {

using namespace tadac;

ImageBuffer noise_image(int w, int h) {
  ImageBuffer img(w, h);
  CounterRng rng(3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.set(x, y, {rng.uniform(), rng.uniform(), rng.uniform()});
  return img;
}

void BM_SaliencyCrop(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  CounterRng rng(1);
  std::vector<double> v(512 * 384);
  for (double& x : v) x = rng.uniform();
  const SaliencyMap map(512, 384, std::move(v));
  for (auto _ : state) benchmark::DoNotOptimize(saliency_crop(map, side));
}
BENCHMARK(BM_SaliencyCrop)->Arg(64)->Arg(224);

void BM_InfoNce(benchmark::State& state) {
  const auto keys = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = EmbeddingBatch::kDefaultDim;
  CounterRng rng(2);
  std::vector<double> q(dim), k(keys * dim);
  for (double& x : q) x = rng.normal();
  for (double& x : k) x = rng.normal();
  const EmbeddingBatch batch(keys, dim, k);
  for (auto _ : state) benchmark::DoNotOptimize(info_nce(q, batch, 0, 0.1));
}
BENCHMARK(BM_InfoNce)->Arg(8)->Arg(64);

void BM_ApplyDistortion(benchmark::State& state) {
  const ImageBuffer img = noise_image(256, 256);
  const auto kind = static_cast<DistortionType>(state.range(0));
  state.SetLabel(std::string(to_name(kind)));
  for (auto _ : state) benchmark::DoNotOptimize(apply_distortion(img, {kind, 3, 9}));
}
BENCHMARK(BM_ApplyDistortion)->DenseRange(1, kDistortionTypeCount);

void BM_Profile(benchmark::State& state) {
  const ImageBuffer img = noise_image(512, 384);
  for (auto _ : state) benchmark::DoNotOptimize(profile(img));
}
BENCHMARK(BM_Profile);

void BM_RidgeFit(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(n, 512);
  Eigen::VectorXd y = Eigen::VectorXd::Random(n);
  for (auto _ : state) benchmark::DoNotOptimize(ridge_fit(x, y, 1.0));
}
BENCHMARK(BM_RidgeFit)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
