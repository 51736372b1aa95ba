#include <benchmark/benchmark.h>

#include <vector>

#include "hetsurr/rng.hpp"
#include "hetsurr/smoothing.hpp"

using namespace hetsurr;

namespace {

struct Data {
  std::vector<double> s, w, y;
};

Data make(std::size_t n) {
  RandomStream r(42, 0, 0);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.s.push_back(r.gamma(2.5, 2.5));
    d.w.push_back(r.uniform(0, 10));
    d.y.push_back(3.2 + 4 * d.s.back() + r.normal(0, 16));
  }
  return d;
}

const SmoothingConfig kCfg{KernelKind::Epanechnikov, 1e-10, OobPolicy::ClampToNearest};

void BM_Direct1D(benchmark::State& st) {
  const auto d = make(st.range(0));
  double x = 0.0;
  for (auto _ : st) {
    x += 0.001;
    benchmark::DoNotOptimize(nw_smooth_1d(d.s, d.y, 0.5, KernelKind::Epanechnikov, 6.0 + x, kCfg));
  }
}
BENCHMARK(BM_Direct1D)->Arg(800)->Arg(8000);

void BM_Smoother1D(benchmark::State& st) {
  const auto d = make(st.range(0));
  const Smoother1D sm(d.s, d.y, 0.5, KernelKind::Epanechnikov, kCfg);
  double x = 0.0;
  for (auto _ : st) {
    x += 0.001;
    benchmark::DoNotOptimize(sm(6.0 + x));
  }
}
BENCHMARK(BM_Smoother1D)->Arg(800)->Arg(8000);

void BM_Smoother2D(benchmark::State& st) {
  const auto d = make(st.range(0));
  const auto kind = st.range(1) ? KernelKind::Gaussian : KernelKind::Epanechnikov;
  const Smoother2D sm(d.s, d.w, d.y, 0.5, 0.42, kind, kCfg);
  RandomStream r(1, 0, 1);
  for (auto _ : st) benchmark::DoNotOptimize(sm(r.gamma(2.78, 2.78), r.uniform(0, 4)));
  st.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Smoother2D)->Args({800, 0})->Args({800, 1})->Args({8000, 0});

void BM_Construct2D(benchmark::State& st) {
  const auto d = make(st.range(0));
  for (auto _ : st) {
    Smoother2D sm(d.s, d.w, d.y, 0.5, 0.42, KernelKind::Epanechnikov, kCfg);
    benchmark::DoNotOptimize(sm.size());
  }
}
BENCHMARK(BM_Construct2D)->Arg(800)->Arg(8000);

}  // namespace
