#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "srltrace/features.hpp"
#include "srltrace/gbdt.hpp"

namespace srltrace {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

using ImportanceTable = std::vector<std::pair<std::string, double>>;

// Metrics are for the pass class. Precision and recall are 0 when their
// denominator is 0; so is f1 when precision + recall is 0.
struct EvalReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionMatrix confusion;
  std::size_t n_rows = 0;
  double decision_threshold = 0.5;
  ImportanceTable gain_importance;
  ImportanceTable permutation_importance;
  nlohmann::ordered_json config;  // resolved configuration echo
};

EvalReport metrics_from_confusion(const ConfusionMatrix& confusion);

// Predicted pass iff predict_proba >= decision_threshold.
EvalReport evaluate(const GbdtModel& model, const Dataset& dataset, double decision_threshold);

double accuracy(const GbdtModel& model, const Dataset& dataset, double decision_threshold);

struct PermutationOptions {
  int repeats = 20;
  std::uint64_t seed = 0;
  double decision_threshold = 0.5;
  int jobs = 1;  // worker threads; results do not depend on it
};

// Mean accuracy drop when one column is shuffled. Feature j uses RNG
// substream j of `seed` for all its repeats, so the table is identical for
// any `jobs`.
ImportanceTable permutation_importance(const GbdtModel& model, const Dataset& dataset,
                                       const PermutationOptions& options);

struct GroupedSplit {
  Dataset train;
  Dataset test;
  std::vector<std::string> train_students;  // ascending
  std::vector<std::string> test_students;   // ascending
};

// Distinct student ids (ascending) are Fisher-Yates shuffled with Rng(seed);
// the first ceil(test_fraction * n) go to test, clamped to [1, n - 1].
// Throws InsufficientGroups with fewer than 2 students.
GroupedSplit grouped_split(const Dataset& dataset, double test_fraction, std::uint64_t seed);

// Partition the rows of `dataset` by a given test-student set.
GroupedSplit apply_split(const Dataset& dataset, const std::vector<std::string>& test_students);

nlohmann::ordered_json to_json(const EvalReport& report);
nlohmann::ordered_json to_json(const ImportanceTable& table);

// Feature names ordered by decreasing importance (stable for ties).
std::vector<std::string> rank_features(const ImportanceTable& table);

}  // namespace srltrace
