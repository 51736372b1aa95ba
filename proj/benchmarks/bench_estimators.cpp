#include <benchmark/benchmark.h>

#include "hetsurr/estimators.hpp"
#include "hetsurr/simgen.hpp"

using namespace hetsurr;

namespace {

const SmoothingConfig kCfg{KernelKind::Epanechnikov, 1e-10, OobPolicy::ClampToNearest};

// One replication's worth of estimator work against a fitted prior.
void BM_Components(benchmark::State& st) {
  const std::size_t n = st.range(0);
  const auto prior = generate_setting(SettingId(1), StudySide::Prior, {1000, 800}, 1, kFixedPriorReplication);
  const auto cur = generate_setting(SettingId(1), StudySide::Current, {n, n}, 1, 0);
  const auto paired = validate_paired(prior, cur);
  const auto bw = default_bandwidths(paired, kCfg.kernel);
  const auto surf = fit_mu0_surface(paired, bw, kCfg);
  for (auto _ : st) {
    const auto c = compute_components(paired.current, surf, bw, kCfg);
    benchmark::DoNotOptimize(delta_h_pooled(c).estimate);
    benchmark::DoNotOptimize(delta_h_aug(c).estimate);
  }
  st.SetItemsProcessed(st.iterations() * 2 * n);
}
BENCHMARK(BM_Components)->Arg(300)->Arg(3000)->Unit(benchmark::kMicrosecond);

void BM_Replication(benchmark::State& st) {
  SimConfig c;
  c.setting = 1;
  c.reps = 1;
  c.truth_mc_draws = 0;
  c.keep_replications = false;
  for (auto _ : st) benchmark::DoNotOptimize(run_simulation(c).methods.size());
}
BENCHMARK(BM_Replication)->Unit(benchmark::kMillisecond);

void BM_TildeDeltaH(benchmark::State& st) {
  const auto prior = generate_setting(SettingId(1), StudySide::Prior, {1000, 800}, 1, kFixedPriorReplication);
  const auto cur = generate_setting(SettingId(1), StudySide::Current, {300, 300}, 1, 0);
  const auto paired = validate_paired(prior, cur);
  const auto bw = default_bandwidths(paired, kCfg.kernel);
  const auto surf = fit_mu0_surface(paired, bw, kCfg);
  for (auto _ : st) benchmark::DoNotOptimize(tilde_delta_h(surf, SettingId(1), st.range(0), 3).value);
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_TildeDeltaH)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
