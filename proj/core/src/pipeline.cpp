#include "srltrace/pipeline.hpp"

#include <thread>

#include "srltrace/features.hpp"

namespace srltrace {

TrainedRun train_and_evaluate(const Dataset& train, const Dataset& test, const PipelineConfig& cfg,
                              int jobs) {
  GbdtParams params = cfg.learner;
  params.seed = cfg.seed;

  TrainedRun run;
  run.model = fit(train, params);
  run.report = evaluate(run.model, test, cfg.decision_threshold);
  run.report.gain_importance = gain_importance(run.model);
  run.report.permutation_importance = permutation_importance(
      run.model, test,
      PermutationOptions{cfg.permutation_repeats, cfg.seed, cfg.decision_threshold, jobs});
  run.report.config = to_json(cfg);
  return run;
}

ComparisonReport run_comparison(const TraceStore& store, const PipelineConfig& cfg, int jobs) {
  cfg.validate();
  const FeatureOptions options = cfg.feature_options();
  const Dataset baseline = assemble_dataset(store, FeatureSet::kBaseline, options);
  const Dataset srl = assemble_dataset(store, FeatureSet::kSrl, options);

  // Both datasets have identical rows and students, so one split serves both.
  const GroupedSplit baseline_split = grouped_split(baseline, cfg.test_fraction, cfg.seed);
  const GroupedSplit srl_split = apply_split(srl, baseline_split.test_students);

  PipelineConfig baseline_cfg = cfg;
  baseline_cfg.feature_set = FeatureSet::kBaseline;
  baseline_cfg.srl_only = false;
  PipelineConfig srl_cfg = cfg;
  srl_cfg.feature_set = FeatureSet::kSrl;

  ComparisonReport report;
  if (jobs > 1) {
    std::thread worker([&] {
      report.baseline = train_and_evaluate(baseline_split.train, baseline_split.test, baseline_cfg, 1);
    });
    report.srl = train_and_evaluate(srl_split.train, srl_split.test, srl_cfg, jobs - 1);
    worker.join();
  } else {
    report.baseline = train_and_evaluate(baseline_split.train, baseline_split.test, baseline_cfg, 1);
    report.srl = train_and_evaluate(srl_split.train, srl_split.test, srl_cfg, 1);
  }

  report.accuracy_delta = report.srl.report.accuracy - report.baseline.report.accuracy;
  report.split_seed = cfg.seed;
  report.test_fraction = cfg.test_fraction;
  report.train_students = baseline_split.train_students;
  report.test_students = baseline_split.test_students;
  report.train_rows = baseline_split.train.size();
  report.test_rows = baseline_split.test.size();
  report.config = to_json(cfg);
  return report;
}

nlohmann::ordered_json to_json(const ComparisonReport& r) {
  nlohmann::ordered_json split;
  split["seed"] = r.split_seed;
  split["test_fraction"] = r.test_fraction;
  split["train_rows"] = r.train_rows;
  split["test_rows"] = r.test_rows;
  split["train_students"] = r.train_students;
  split["test_students"] = r.test_students;

  nlohmann::ordered_json baseline = to_json(r.baseline.report);
  baseline["split"] = split;
  nlohmann::ordered_json srl = to_json(r.srl.report);
  srl["split"] = split;

  nlohmann::ordered_json j;
  j["accuracy_delta"] = r.accuracy_delta;
  j["baseline"] = std::move(baseline);
  j["srl"] = std::move(srl);
  j["config"] = r.config;
  return j;
}

}  // namespace srltrace
