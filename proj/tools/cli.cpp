#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>

#include <CLI11.hpp>

#include "srltrace/config.hpp"
#include "srltrace/errors.hpp"
#include "srltrace/features.hpp"
#include "srltrace/gbdt.hpp"
#include "srltrace/ingest.hpp"
#include "srltrace/metrics.hpp"
#include "srltrace/pipeline.hpp"
#include "srltrace/sessionize.hpp"
#include "srltrace/synthgen.hpp"

namespace srltrace::cli {
namespace {

constexpr const char* kConfigEnvVar = "SRL_TRACE_CONFIG";

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

struct Options {
  std::string config_path;
  int jobs = 1;

  // synth
  std::string out;
  int students = 142;
  int quizzes = 6;
  int max_attempts = 3;
  double signal = 1.0;
  double noise = 0.15;
  std::uint64_t seed = 7;

  // ingest / stores
  std::string events;
  std::string attempts;
  std::string store;

  // features / models / reports
  std::string set = "srl";
  bool srl_only = false;
  std::string features;
  std::string model;
  std::string report;
  int rounds = 0;
  int depth = 0;
  double lr = 0.0;
  double threshold = 0.0;
};

// Defaults, then the config file (--config, else $SRL_TRACE_CONFIG), then
// explicit flags.
PipelineConfig resolve_config(const Options& opt) {
  PipelineConfig cfg;
  std::string path = opt.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar); env != nullptr) path = env;
  }
  if (!path.empty()) cfg = load_config_file(path);
  cfg.learner.seed = cfg.seed;
  return cfg;
}

void write_json(const std::string& path, const nlohmann::ordered_json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

}  // namespace

ExitStatus run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"srltrace: trace-data features and pass/fail modelling for self-regulated learning",
               "srltrace"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path,
                 "Flat JSON key/value config file (falls back to $SRL_TRACE_CONFIG)");
  app.add_option("--jobs", opt.jobs, "Worker threads; results do not depend on it")
      ->check(CLI::Range(1, 64));

  auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort (events, attempts, truth)");
  synth->add_option("--out", opt.out, "Output directory")->required();
  auto* synth_students = synth->add_option("--students", opt.students, "Number of students");
  synth->add_option("--quizzes", opt.quizzes, "Number of quizzes");
  synth->add_option("--max-attempts", opt.max_attempts, "Attempts allowed per quiz");
  synth->add_option("--signal", opt.signal, "Planted signal strength in [0, 1]");
  synth->add_option("--noise", opt.noise, "Behavioural timing jitter (log scale)");
  auto* synth_seed = synth->add_option("--seed", opt.seed, "Generator seed");
  (void)synth_students;
  (void)synth_seed;

  auto* ingest = app.add_subcommand("ingest", "Validate raw files and write a store directory");
  ingest->add_option("--events", opt.events, "Events JSONL file")->required();
  ingest->add_option("--attempts", opt.attempts, "Attempts CSV file")->required();
  ingest->add_option("--out", opt.out, "Store directory")->required();

  auto* sessionize = app.add_subcommand("sessionize", "Write per-student reading sessions as CSV");
  sessionize->add_option("--store", opt.store, "Store directory")->required();
  sessionize->add_option("--out", opt.out, "Session summary CSV")->required();

  auto* features = app.add_subcommand("features", "Write the labeled feature matrix as CSV");
  features->add_option("--store", opt.store, "Store directory")->required();
  auto* features_set = features->add_option("--set", opt.set, "Feature set")
                           ->check(CLI::IsMember({"baseline", "srl"}));
  features->add_flag("--srl-only", opt.srl_only, "SRL set without the baseline columns");
  features->add_option("--out", opt.out, "Feature CSV")->required();

  auto* train = app.add_subcommand("train", "Fit a gradient-boosted tree model");
  train->add_option("--features", opt.features, "Feature CSV")->required();
  train->add_option("--model", opt.model, "Model JSON to write")->required();
  auto* train_rounds = train->add_option("--rounds", opt.rounds, "Boosting rounds");
  auto* train_depth = train->add_option("--depth", opt.depth, "Maximum tree depth");
  auto* train_lr = train->add_option("--lr", opt.lr, "Learning rate");
  auto* train_seed = train->add_option("--seed", opt.seed, "Seed (echoed)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a model on a feature CSV");
  evaluate_cmd->add_option("--model", opt.model, "Model JSON")->required();
  evaluate_cmd->add_option("--features", opt.features, "Feature CSV")->required();
  evaluate_cmd->add_option("--report", opt.report, "Report JSON to write")->required();
  auto* eval_threshold =
      evaluate_cmd->add_option("--threshold", opt.threshold, "Decision threshold");
  auto* eval_seed = evaluate_cmd->add_option("--seed", opt.seed, "Permutation seed");

  auto* compare = app.add_subcommand("compare", "Baseline vs SRL models on one grouped split");
  compare->add_option("--store", opt.store, "Store directory")->required();
  compare->add_option("--report", opt.report, "Report JSON to write")->required();
  auto* compare_seed = compare->add_option("--seed", opt.seed, "Split/permutation seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ExitStatus::kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return ExitStatus::kUsage;
  }

  try {
    PipelineConfig cfg = resolve_config(opt);

    if (synth->parsed()) {
      GenConfig gen;
      gen.n_students = opt.students;
      gen.n_quizzes = opt.quizzes;
      gen.max_attempts = opt.max_attempts;
      gen.signal_strength = opt.signal;
      gen.noise = opt.noise;
      gen.seed = opt.seed;
      const Cohort cohort = generate_cohort(gen);
      write_cohort(cohort, opt.out);
      out << "wrote " << cohort.events.size() << " events and " << cohort.attempts.size()
          << " attempts for " << gen.n_students << " students to " << opt.out << '\n';
    } else if (ingest->parsed()) {
      const TraceStore store =
          build_store(read_events_file(opt.events), read_attempts_file(opt.attempts));
      save_store(store, opt.out);
      out << "stored " << store.events().size() << " events and " << store.attempts().size()
          << " attempts in " << opt.out << '\n';
    } else if (sessionize->parsed()) {
      cfg.validate();
      const TraceStore store = load_store(opt.store);
      auto file = open_output(opt.out);
      write_session_summary_csv(file, store, cfg.sessionizer);
    } else if (features->parsed()) {
      if (features_set->count() > 0) cfg.feature_set = feature_set_from_string(opt.set);
      if (opt.srl_only) cfg.srl_only = true;
      cfg.validate();
      const TraceStore store = load_store(opt.store);
      const Dataset ds = assemble_dataset(store, cfg.feature_set, cfg.feature_options());
      auto file = open_output(opt.out);
      write_features_csv(file, ds);
    } else if (train->parsed()) {
      if (train_rounds->count() > 0) cfg.learner.n_rounds = opt.rounds;
      if (train_depth->count() > 0) cfg.learner.max_depth = opt.depth;
      if (train_lr->count() > 0) cfg.learner.learning_rate = opt.lr;
      if (train_seed->count() > 0) cfg.seed = opt.seed;
      cfg.learner.seed = cfg.seed;
      cfg.validate();
      const Dataset ds = read_features_file(opt.features);
      save_model(fit(ds, cfg.learner), opt.model);
    } else if (evaluate_cmd->parsed()) {
      if (eval_threshold->count() > 0) cfg.decision_threshold = opt.threshold;
      if (eval_seed->count() > 0) cfg.seed = opt.seed;
      cfg.validate();
      const GbdtModel model = load_model(opt.model);
      const Dataset ds = read_features_file(opt.features);
      if (ds.feature_names != model.feature_names) {
        if (ds.feature_names.size() != model.feature_names.size()) {
          throw ArityMismatch(model.feature_names.size(), ds.feature_names.size());
        }
        throw DataError("feature columns of '" + opt.features + "' do not match the model");
      }
      EvalReport report = evaluate(model, ds, cfg.decision_threshold);
      report.gain_importance = gain_importance(model);
      report.permutation_importance = permutation_importance(
          model, ds,
          PermutationOptions{cfg.permutation_repeats, cfg.seed, cfg.decision_threshold, opt.jobs});
      cfg.learner = model.params;
      report.config = to_json(cfg);
      write_json(opt.report, to_json(report));
    } else if (compare->parsed()) {
      if (compare_seed->count() > 0) cfg.seed = opt.seed;
      cfg.learner.seed = cfg.seed;
      const TraceStore store = load_store(opt.store);
      const ComparisonReport report = run_comparison(store, cfg, opt.jobs);
      write_json(opt.report, to_json(report));
      out << "baseline accuracy " << report.baseline.report.accuracy << ", srl accuracy "
          << report.srl.report.accuracy << ", delta " << report.accuracy_delta << '\n';
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return ExitStatus::kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return ExitStatus::kData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return ExitStatus::kInternal;
  }
  return ExitStatus::kSuccess;
}

}  // namespace srltrace::cli
