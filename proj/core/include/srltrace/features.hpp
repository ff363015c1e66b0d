#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "srltrace/ingest.hpp"
#include "srltrace/trace_model.hpp"

namespace srltrace {

enum class FeatureSet { kBaseline, kSrl };

const char* to_string(FeatureSet set) noexcept;
FeatureSet feature_set_from_string(std::string_view name);  // throws InvalidConfig

// Phase of the self-regulation cycle a feature is meant to capture.
// Documentation metadata only; nothing downstream reads it.
enum class SrlPhase { kNone, kForethought, kPerformance, kSelfReflection, kReflectionOrPerformance };

struct FeatureInfo {
  std::string_view name;
  SrlPhase phase;
};

inline constexpr std::array<FeatureInfo, 5> kBaselineFeatures{{
    {"reading_sessions", SrlPhase::kNone},
    {"num_reading_breaks", SrlPhase::kNone},
    {"quiz_time_mins", SrlPhase::kNone},
    {"quiz_fails", SrlPhase::kNone},
    {"quiz_attempts", SrlPhase::kNone},
}};

inline constexpr std::array<FeatureInfo, 9> kSrlFeatures{{
    {"num_backscrolls", SrlPhase::kPerformance},
    {"backscrolls_delta", SrlPhase::kPerformance},
    {"backscrolls_more", SrlPhase::kPerformance},
    {"reading_speed", SrlPhase::kReflectionOrPerformance},
    {"prev_fail", SrlPhase::kSelfReflection},
    {"score_diff", SrlPhase::kSelfReflection},
    {"improved_score", SrlPhase::kSelfReflection},
    {"quiz_time_diff", SrlPhase::kPerformance},
    {"quiz_time_longer", SrlPhase::kPerformance},
}};

// Canonical column order for a feature set. The SRL set is baseline columns
// followed by the nine SRL columns unless `srl_only`.
std::vector<std::string> feature_names(FeatureSet set, bool srl_only = false);

struct BaselineFeatures {
  double reading_sessions = 0;
  double num_reading_breaks = 0;
  double quiz_time_mins = 0;
  double quiz_fails = 0;
  double quiz_attempts = 0;

  std::array<double, 5> values() const {
    return {reading_sessions, num_reading_breaks, quiz_time_mins, quiz_fails, quiz_attempts};
  }
};

struct SrlFeatures {
  double num_backscrolls = 0;
  double backscrolls_delta = 0;
  double backscrolls_more = 0;
  double reading_speed = 0;
  double prev_fail = 0;
  double score_diff = 0;
  double improved_score = 0;
  double quiz_time_diff = 0;
  double quiz_time_longer = 0;

  std::array<double, 9> values() const {
    return {num_backscrolls, backscrolls_delta, backscrolls_more,
            reading_speed,   prev_fail,         score_diff,
            improved_score,  quiz_time_diff,    quiz_time_longer};
  }
};

// Pass iff score / max_score >= pass_fraction.
bool label_attempt(const QuizAttempt& attempt, double pass_fraction);

// Features use only the attempt's reading window, its duration, and earlier
// attempts of the same quiz; the attempt's own score is never read.
BaselineFeatures baseline_features(const TraceStore& store, const QuizAttempt& attempt,
                                   const SessionizerConfig& sessionizer, double pass_fraction);
SrlFeatures srl_features(const TraceStore& store, const QuizAttempt& attempt,
                         const SessionizerConfig& sessionizer, double pass_fraction);

// One labeled row per quiz attempt.
struct AttemptRow {
  std::string student_id;
  std::string quiz_id;
  int attempt_index = 0;
  std::vector<double> values;  // aligned with Dataset::feature_names
  int label = 0;               // 1 = pass

  bool operator==(const AttemptRow&) const = default;
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<AttemptRow> rows;

  std::size_t num_features() const noexcept { return feature_names.size(); }
  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }

  bool operator==(const Dataset&) const = default;
};

struct FeatureOptions {
  SessionizerConfig sessionizer;
  double pass_fraction = 0.5;
  bool srl_only = false;
};

// Rows sorted by (student_id, quiz_id, attempt_index). Throws EmptyStore
// when the store has no attempts.
Dataset assemble_dataset(const TraceStore& store, FeatureSet set, const FeatureOptions& options);

// Header: student_id,quiz_id,attempt_index,<features...>,label. Floats are
// written in shortest round-trip form.
void write_features_csv(std::ostream& out, const Dataset& dataset);
Dataset read_features_csv(std::istream& in);
Dataset read_features_file(const std::filesystem::path& path);

}  // namespace srltrace
