// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "srltrace/errors.hpp"
#include "srltrace/features.hpp"
#include "srltrace/gbdt.hpp"
#include "srltrace/ingest.hpp"
#include "srltrace/metrics.hpp"

using namespace srltrace;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s.precision(precision);
  s << std::fixed << v;
  return s.str();
}

void cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const auto status = cli::run(args, out, err);
  if (status != cli::ExitStatus::kSuccess) {
    throw std::runtime_error("srltrace " + args.front() + " exited " +
                             std::to_string(static_cast<int>(status)) + ": " + err.str());
  }
}

// synth + compare through the command-line entry point; returns the report.
nlohmann::json synth_and_compare(const fixtures::TempDir& dir, const std::string& tag,
                                 std::uint64_t seed, const std::string& signal = "1") {
  const auto data = (dir / (tag + "_data")).string();
  const auto report = (dir / (tag + "_report.json")).string();
  cli({"synth", "--out", data, "--students", "142", "--seed", std::to_string(seed), "--signal",
       signal});
  cli({"compare", "--store", data, "--report", report, "--seed", std::to_string(seed)});
  return nlohmann::json::parse(fixtures::read_file(report));
}

int rank_of(const nlohmann::json& table, const std::string& name) {
  ImportanceTable t;
  for (const auto& [k, v] : table.items()) t.emplace_back(k, v.get<double>());
  const auto ranked = rank_features(t);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i] == name) return static_cast<int>(i) + 1;
  }
  return -1;
}

struct Headline {
  nlohmann::json report;
  double seconds = 0;
};

Outcome headline_gap(const Headline& h) {
  const double base = h.report.at("baseline").at("accuracy").get<double>();
  const double srl = h.report.at("srl").at("accuracy").get<double>();
  const double delta = h.report.at("accuracy_delta").get<double>();
  const bool pass = base >= 0.55 && base <= 0.75 && srl >= 0.85 && delta >= 0.10 && h.seconds < 60;
  return {pass, "baseline " + fmt(base) + " in [0.55, 0.75], srl " + fmt(srl) + " >= 0.85, delta " +
                    fmt(delta) + " >= 0.10, " + fmt(h.seconds, 2) + " s < 60 s"};
}

Outcome no_signal_control(const fixtures::TempDir& dir) {
  std::vector<double> deltas;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    deltas.push_back(
        synth_and_compare(dir, "nosig" + std::to_string(seed), seed, "0").at("accuracy_delta"));
  }
  const double mean = std::accumulate(deltas.begin(), deltas.end(), 0.0) / 5.0;
  double mean_abs = 0;
  for (double d : deltas) mean_abs += std::fabs(d) / 5.0;
  std::string per_seed;
  for (double d : deltas) per_seed += (per_seed.empty() ? "" : " ") + fmt(d);
  return {std::fabs(mean) <= 0.05 && mean_abs <= 0.05,
          "mean delta " + fmt(mean) + ", mean |delta| " + fmt(mean_abs) + " (both <= 0.05)" +
              ", seeds 1-5: " + per_seed};
}

Outcome top_features(const Headline& h) {
  const auto& table = h.report.at("srl").at("permutation_importance");
  const int sd = rank_of(table, "score_diff");
  const int pf = rank_of(table, "prev_fail");
  const int repeats = h.report.at("config").at("permutation_repeats").get<int>();
  return {sd >= 1 && sd <= 4 && pf >= 1 && pf <= 4 && repeats == 20,
          "score_diff rank " + std::to_string(sd) + ", prev_fail rank " + std::to_string(pf) +
              " (top 4, repeats " + std::to_string(repeats) + ")"};
}

Outcome false_negatives(const Headline& h) {
  const auto& srl = h.report.at("srl");
  const double fn = srl.at("confusion").at("fn").get<double>();
  const double tp = srl.at("confusion").at("tp").get<double>();
  const double threshold = srl.at("decision_threshold").get<double>();
  const double ratio = fn + tp > 0 ? fn / (fn + tp) : 1.0;
  return {ratio <= 0.10 && threshold == 0.5,
          "fn/(fn+tp) = " + fmt(ratio) + " <= 0.10 at threshold " + fmt(threshold, 2)};
}

Outcome sessionizer_oracle() {
  const auto t0 = Clock::now();
  Rng rng(2024);
  int mismatches = 0;
  std::string first;
  for (int t = 0; t < 1000; ++t) {
    const auto events = fixtures::random_trace(rng, 200);
    const auto cfg = t % 2 == 0 ? SessionizerConfig{} : oracle::random_sessionizer_config(rng);
    const auto err = oracle::sessionizer_mismatch(events, cfg);
    if (!err.empty()) {
      if (mismatches++ == 0) first = "trace " + std::to_string(t) + ": " + err;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 5,
          std::to_string(mismatches) + " mismatches in 1000 traces, " + fmt(secs, 2) + " s < 5 s" +
              (first.empty() ? "" : "; " + first)};
}

Outcome learner_numerics() {
  Rng rng(6);
  int loss_failures = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto ds = fixtures::random_dataset(rng, 20 + rng.below(80), 1 + rng.below(5));
    GbdtParams p;
    p.n_rounds = 30;
    p.max_depth = 1 + static_cast<int>(rng.below(4));
    p.learning_rate = rng.uniform(0.05, 0.5);
    p.lambda_l2 = rng.uniform(0.5, 2.0);
    FitDiagnostics diag;
    fit(ds, p, &diag);
    for (std::size_t k = 1; k < diag.round_losses.size(); ++k) {
      if (diag.round_losses[k] > diag.round_losses[k - 1] + 1e-12) {
        ++loss_failures;
        break;
      }
    }
  }

  int grad_failures = 0;
  for (int i = 0; i < 100; ++i) {
    const double m = rng.uniform(-8.0, 8.0);
    const int y = rng.bernoulli(0.5) ? 1 : 0;
    const auto gh = logistic_grad_hess(m, y);
    const auto num = oracle::numeric_grad_hess(m, y);
    const bool g_ok = std::fabs(gh.grad - static_cast<double>(num.grad)) <=
                      1e-6 * std::max(1.0, std::fabs(gh.grad));
    const bool h_ok = std::fabs(gh.hess - static_cast<double>(num.hess)) <=
                      1e-6 * std::max(1e-3, gh.hess);
    if (!g_ok || !h_ok) ++grad_failures;
  }

  int split_failures = 0;
  std::string first;
  for (int trial = 0; trial < 200; ++trial) {
    const auto ds = fixtures::random_dataset(rng, 2 + rng.below(29), 1 + rng.below(3));
    GbdtParams p;
    p.n_rounds = 1 + static_cast<int>(rng.below(6));
    p.max_depth = 1 + static_cast<int>(rng.below(4));
    p.learning_rate = rng.uniform(0.05, 1.0);
    p.lambda_l2 = rng.uniform(0.0, 3.0);
    p.min_child_weight = rng.uniform(0.0, 1.5);
    const auto err = oracle::tree_mismatch(ds, fit(ds, p));
    if (!err.empty() && split_failures++ == 0) first = "dataset " + std::to_string(trial) + ": " + err;
  }
  return {loss_failures == 0 && grad_failures == 0 && split_failures == 0,
          "loss increases on " + std::to_string(loss_failures) + "/20 datasets, derivative errors " +
              std::to_string(grad_failures) + "/100 points, split-oracle mismatches " +
              std::to_string(split_failures) + "/200 datasets (<= 30 rows x 3 features)" +
              (first.empty() ? "" : "; " + first)};
}

Outcome leakage_invariants() {
  Rng rng(41);
  int split_failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto ds = fixtures::random_dataset(rng, 20 + rng.below(100), 2, 2 + rng.below(20));
    const double fraction = rng.uniform(0.05, 0.95);
    try {
      const auto split = grouped_split(ds, fraction, rng.next_u64());
      if (!oracle::split_partition_mismatch(ds, split, fraction).empty()) ++split_failures;
    } catch (const InsufficientGroups&) {
      // A draw that put every row on one student; nothing to split.
    }
  }
  int leak_failures = 0;
  std::string first;
  for (int trial = 0; trial < 50; ++trial) {
    const auto store = fixtures::random_store(rng);
    const auto err = oracle::leakage_mismatch(store, rng);
    if (!err.empty() && leak_failures++ == 0) first = err;
  }
  return {split_failures == 0 && leak_failures == 0,
          "grouped_split violations " + std::to_string(split_failures) +
              "/100 datasets, score-mutation leaks " + std::to_string(leak_failures) +
              "/50 stores" + (first.empty() ? "" : "; " + first)};
}

Outcome determinism(const fixtures::TempDir& dir) {
  synth_and_compare(dir, "det_a", 7);
  synth_and_compare(dir, "det_b", 7);
  const bool same_report =
      fixtures::read_file(dir / "det_a_report.json") == fixtures::read_file(dir / "det_b_report.json");
  bool same_data = true;
  for (const char* f : {"events.jsonl", "attempts.csv", "truth.json"}) {
    same_data = same_data && fixtures::read_file(dir / "det_a_data" / f) ==
                                 fixtures::read_file(dir / "det_b_data" / f);
  }
  return {same_report && same_data, std::string("reports ") + (same_report ? "identical" : "differ") +
                                        ", generated files " + (same_data ? "identical" : "differ")};
}

Outcome round_trips(const fixtures::TempDir& dir) {
  Rng rng(88);
  int model_failures = 0;
  int store_failures = 0;
  int csv_failures = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto ds = fixtures::random_dataset(rng, 40, 1 + rng.below(5));
    GbdtParams p;
    p.n_rounds = 1 + static_cast<int>(rng.below(20));
    p.learning_rate = rng.uniform(0.01, 1.0);
    p.lambda_l2 = rng.uniform(0.0, 3.0);
    const auto model = fit(ds, p);
    const auto mpath = dir / ("rt_model" + std::to_string(trial) + ".json");
    save_model(model, mpath);
    if (!(load_model(mpath) == model)) ++model_failures;

    const auto store = fixtures::random_store(rng);
    const auto sdir = dir / ("rt_store" + std::to_string(trial));
    save_store(store, sdir);
    if (!(load_store(sdir) == store)) ++store_failures;

    const auto features = assemble_dataset(store, FeatureSet::kSrl, {});
    std::stringstream csv;
    write_features_csv(csv, features);
    if (!(read_features_csv(csv) == features)) ++csv_failures;
  }
  return {model_failures + store_failures + csv_failures == 0,
          "model " + std::to_string(model_failures) + "/20, store " +
              std::to_string(store_failures) + "/20, feature CSV " + std::to_string(csv_failures) +
              "/20 round-trip failures"};
}

}  // namespace

int main() {
  fixtures::TempDir dir;

  Headline headline;
  std::string headline_error;
  try {
    const auto t0 = Clock::now();
    headline.report = synth_and_compare(dir, "default", 7);
    headline.seconds = seconds_since(t0);
  } catch (const std::exception& e) {
    headline_error = e.what();
  }
  const auto needs_headline = [&](Outcome (*check)(const Headline&)) {
    return [&, check]() -> Outcome {
      if (!headline_error.empty()) return {false, headline_error};
      return check(headline);
    };
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"headline accuracy gap", needs_headline(headline_gap)},
      {"no-signal control", [&] { return no_signal_control(dir); }},
      {"top features", needs_headline(top_features)},
      {"false negatives", needs_headline(false_negatives)},
      {"sessionizer oracle", sessionizer_oracle},
      {"learner numerics", learner_numerics},
      {"leakage invariants", leakage_invariants},
      {"determinism", [&] { return determinism(dir); }},
      {"format round-trips", [&] { return round_trips(dir); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
