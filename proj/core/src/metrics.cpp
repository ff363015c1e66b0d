#include "srltrace/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "srltrace/errors.hpp"
#include "srltrace/rng.hpp"

namespace srltrace {

EvalReport metrics_from_confusion(const ConfusionMatrix& c) {
  EvalReport r;
  r.confusion = c;
  r.n_rows = c.total();
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  r.accuracy = ratio(c.tp + c.tn, r.n_rows);
  r.precision = ratio(c.tp, c.tp + c.fp);
  r.recall = ratio(c.tp, c.tp + c.fn);
  r.f1 = (r.precision + r.recall) > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

EvalReport evaluate(const GbdtModel& model, const Dataset& dataset, double decision_threshold) {
  ConfusionMatrix c;
  for (const auto& row : dataset.rows) {
    const bool predicted_pass = predict_proba(model, row.values) >= decision_threshold;
    const bool actual_pass = row.label == 1;
    if (predicted_pass && actual_pass) ++c.tp;
    else if (predicted_pass) ++c.fp;
    else if (actual_pass) ++c.fn;
    else ++c.tn;
  }
  EvalReport r = metrics_from_confusion(c);
  r.decision_threshold = decision_threshold;
  return r;
}

double accuracy(const GbdtModel& model, const Dataset& dataset, double decision_threshold) {
  return evaluate(model, dataset, decision_threshold).accuracy;
}

ImportanceTable permutation_importance(const GbdtModel& model, const Dataset& dataset,
                                       const PermutationOptions& options) {
  const std::size_t n_features = model.feature_names.size();
  ImportanceTable table(n_features);
  for (std::size_t j = 0; j < n_features; ++j) table[j] = {model.feature_names[j], 0.0};
  if (dataset.empty() || options.repeats <= 0) return table;

  const double base = accuracy(model, dataset, options.decision_threshold);
  const std::size_t n = dataset.size();

  auto drop_for = [&](std::size_t feature) {
    Rng rng = Rng::substream(options.seed, feature);
    std::vector<double> column(n);
    std::vector<double> row;
    double total_drop = 0.0;
    for (int rep = 0; rep < options.repeats; ++rep) {
      for (std::size_t i = 0; i < n; ++i) column[i] = dataset.rows[i].values.at(feature);
      rng.shuffle(std::span<double>(column));
      std::size_t correct = 0;
      for (std::size_t i = 0; i < n; ++i) {
        row = dataset.rows[i].values;
        row[feature] = column[i];
        const bool pass = predict_proba(model, row) >= options.decision_threshold;
        if (pass == (dataset.rows[i].label == 1)) ++correct;
      }
      total_drop += base - static_cast<double>(correct) / static_cast<double>(n);
    }
    return total_drop / options.repeats;
  };

  const auto workers = static_cast<std::size_t>(std::clamp(options.jobs, 1, 64));
  if (workers == 1 || n_features < 2) {
    for (std::size_t j = 0; j < n_features; ++j) table[j].second = drop_for(j);
    return table;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n_features); ++w) {
    pool.emplace_back([&] {
      for (std::size_t j = next++; j < n_features; j = next++) table[j].second = drop_for(j);
    });
  }
  for (auto& t : pool) t.join();
  return table;
}

GroupedSplit apply_split(const Dataset& dataset, const std::vector<std::string>& test_students) {
  const std::set<std::string> test_set(test_students.begin(), test_students.end());
  std::set<std::string> train_set;
  GroupedSplit split;
  split.train.feature_names = dataset.feature_names;
  split.test.feature_names = dataset.feature_names;
  for (const auto& row : dataset.rows) {
    if (test_set.contains(row.student_id)) {
      split.test.rows.push_back(row);
    } else {
      split.train.rows.push_back(row);
      train_set.insert(row.student_id);
    }
  }
  split.train_students.assign(train_set.begin(), train_set.end());
  split.test_students.assign(test_set.begin(), test_set.end());
  return split;
}

GroupedSplit grouped_split(const Dataset& dataset, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidConfig("test_fraction must be in (0, 1)");
  }
  std::set<std::string> ids;
  for (const auto& row : dataset.rows) ids.insert(row.student_id);
  std::vector<std::string> students(ids.begin(), ids.end());
  if (students.size() < 2) throw InsufficientGroups(students.size());

  Rng rng(seed);
  rng.shuffle(std::span<std::string>(students));

  // The small slack keeps e.g. 0.3 * 10 from rounding up to 4.
  const double n = static_cast<double>(students.size());
  auto n_test = static_cast<std::size_t>(std::ceil(test_fraction * n - 1e-9));
  n_test = std::clamp<std::size_t>(n_test, 1, students.size() - 1);

  std::vector<std::string> test(students.begin(), students.begin() + static_cast<long>(n_test));
  std::sort(test.begin(), test.end());
  return apply_split(dataset, test);
}

nlohmann::ordered_json to_json(const ImportanceTable& table) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [name, value] : table) j[name] = value;
  return j;
}

nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["n_rows"] = r.n_rows;
  j["decision_threshold"] = r.decision_threshold;
  j["accuracy"] = r.accuracy;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["confusion"] = {{"tp", r.confusion.tp},
                    {"fp", r.confusion.fp},
                    {"tn", r.confusion.tn},
                    {"fn", r.confusion.fn}};
  j["gain_importance"] = to_json(r.gain_importance);
  j["permutation_importance"] = to_json(r.permutation_importance);
  if (!r.config.is_null()) j["config"] = r.config;
  return j;
}

std::vector<std::string> rank_features(const ImportanceTable& table) {
  ImportanceTable sorted = table;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> names;
  names.reserve(sorted.size());
  for (const auto& [name, value] : sorted) names.push_back(name);
  return names;
}

}  // namespace srltrace
