#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srltrace/config.hpp"
#include "srltrace/gbdt.hpp"
#include "srltrace/ingest.hpp"
#include "srltrace/metrics.hpp"

namespace srltrace {

struct TrainedRun {
  GbdtModel model;
  EvalReport report;  // on the held-out students
};

struct ComparisonReport {
  TrainedRun baseline;
  TrainedRun srl;
  double accuracy_delta = 0.0;  // srl - baseline
  std::uint64_t split_seed = 0;
  double test_fraction = 0.0;
  std::vector<std::string> train_students;
  std::vector<std::string> test_students;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  nlohmann::ordered_json config;
};

// Trains on `train`, evaluates on `test`, and fills both importance tables
// (permutation importance on `test`).
TrainedRun train_and_evaluate(const Dataset& train, const Dataset& test,
                              const PipelineConfig& cfg, int jobs = 1);

// Baseline and SRL datasets from the same store, one grouped split shared by
// both, accuracy_delta = srl - baseline.
ComparisonReport run_comparison(const TraceStore& store, const PipelineConfig& cfg, int jobs = 1);

nlohmann::ordered_json to_json(const ComparisonReport& report);

}  // namespace srltrace
