#include <benchmark/benchmark.h>

#include "srltrace/features.hpp"
#include "srltrace/gbdt.hpp"
#include "srltrace/ingest.hpp"
#include "srltrace/metrics.hpp"
#include "srltrace/sessionize.hpp"
#include "srltrace/synthgen.hpp"

using namespace srltrace;

namespace {

const Cohort& default_cohort() {
  static const Cohort cohort = generate_cohort(GenConfig{});
  return cohort;
}

const TraceStore& default_store() {
  static const TraceStore store = build_store(default_cohort().events, default_cohort().attempts);
  return store;
}

const Dataset& srl_dataset() {
  static const Dataset ds = assemble_dataset(default_store(), FeatureSet::kSrl, {});
  return ds;
}

void BM_GenerateCohort(benchmark::State& state) {
  GenConfig cfg;
  cfg.n_students = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_cohort(cfg));
}
BENCHMARK(BM_GenerateCohort)->Arg(142)->Unit(benchmark::kMillisecond);

void BM_SegmentSessions(benchmark::State& state) {
  const TraceStore& store = default_store();
  const auto students = store.students();
  std::size_t events = 0;
  for (auto _ : state) {
    for (const auto& s : students) {
      const auto sessions = segment_sessions(store.events_for(s), SessionizerConfig{});
      benchmark::DoNotOptimize(sessions.data());
    }
    events += store.events().size();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
}
BENCHMARK(BM_SegmentSessions)->Unit(benchmark::kMillisecond);

void BM_AssembleDataset(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(assemble_dataset(default_store(), FeatureSet::kSrl, {}));
}
BENCHMARK(BM_AssembleDataset)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  GbdtParams p;
  p.n_rounds = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit(srl_dataset(), p));
}
BENCHMARK(BM_Fit)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PermutationImportance(benchmark::State& state) {
  static const GbdtModel model = fit(srl_dataset(), GbdtParams{});
  const PermutationOptions opts{20, 7, 0.5, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(permutation_importance(model, srl_dataset(), opts));
}
BENCHMARK(BM_PermutationImportance)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
BENCHMARK_MAIN();
