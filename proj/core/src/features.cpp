#include "srltrace/features.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "srltrace/errors.hpp"
#include "srltrace/sessionize.hpp"
#include "srltrace/text_format.hpp"

namespace srltrace {
namespace {

struct WindowSummary {
  int sessions = 0;
  int breaks = 0;
  int backscrolls = 0;
  double speed = 0.0;
};

WindowSummary summarize(const ReadingWindow& window, const SessionizerConfig& cfg) {
  const auto sessions = segment_sessions(window.events, cfg);
  WindowSummary s;
  s.sessions = static_cast<int>(sessions.size());
  for (const auto& rs : sessions) {
    s.breaks += rs.num_breaks;
    s.backscrolls += rs.num_backscrolls;
  }
  s.speed = reading_speed(sessions);
  return s;
}

// Earlier attempts of the same (student, quiz), oldest first.
std::span<const QuizAttempt> prior_attempts(const TraceStore& store, const QuizAttempt& attempt) {
  const auto history = store.attempts_for(attempt.student_id, attempt.quiz_id);
  const auto n = std::min(history.size(), static_cast<std::size_t>(attempt.attempt_index - 1));
  return history.first(n);
}

double indicator(bool b) { return b ? 1.0 : 0.0; }

}  // namespace

const char* to_string(FeatureSet set) noexcept {
  return set == FeatureSet::kBaseline ? "baseline" : "srl";
}

FeatureSet feature_set_from_string(std::string_view name) {
  if (name == "baseline") return FeatureSet::kBaseline;
  if (name == "srl") return FeatureSet::kSrl;
  throw InvalidConfig("unknown feature set '" + std::string(name) + "' (expected baseline|srl)");
}

std::vector<std::string> feature_names(FeatureSet set, bool srl_only) {
  std::vector<std::string> names;
  if (set == FeatureSet::kBaseline || !srl_only) {
    for (const auto& f : kBaselineFeatures) names.emplace_back(f.name);
  }
  if (set == FeatureSet::kSrl) {
    for (const auto& f : kSrlFeatures) names.emplace_back(f.name);
  }
  return names;
}

bool label_attempt(const QuizAttempt& attempt, double pass_fraction) {
  return attempt.score / attempt.max_score >= pass_fraction;
}

BaselineFeatures baseline_features(const TraceStore& store, const QuizAttempt& attempt,
                                   const SessionizerConfig& sessionizer, double pass_fraction) {
  const auto window = summarize(reading_window(store, attempt), sessionizer);
  BaselineFeatures f;
  f.reading_sessions = window.sessions;
  f.num_reading_breaks = window.breaks;
  f.quiz_time_mins = attempt.duration_minutes();
  for (const auto& prior : prior_attempts(store, attempt)) {
    if (!label_attempt(prior, pass_fraction)) f.quiz_fails += 1.0;
  }
  f.quiz_attempts = attempt.attempt_index;
  return f;
}

SrlFeatures srl_features(const TraceStore& store, const QuizAttempt& attempt,
                         const SessionizerConfig& sessionizer, double pass_fraction) {
  const auto current = summarize(reading_window(store, attempt), sessionizer);
  const auto priors = prior_attempts(store, attempt);

  SrlFeatures f;
  f.num_backscrolls = current.backscrolls;
  f.reading_speed = current.speed;

  int previous_backscrolls = 0;
  if (!priors.empty()) {
    const QuizAttempt& prev = priors.back();
    previous_backscrolls = summarize(reading_window(store, prev), sessionizer).backscrolls;
    f.prev_fail = indicator(!label_attempt(prev, pass_fraction));
    f.quiz_time_diff = attempt.duration_minutes() - prev.duration_minutes();
  }
  if (priors.size() >= 2) {
    const QuizAttempt& prev = priors[priors.size() - 1];
    const QuizAttempt& before = priors[priors.size() - 2];
    f.score_diff = prev.score_fraction() - before.score_fraction();
  }
  f.backscrolls_delta = current.backscrolls - previous_backscrolls;
  f.backscrolls_more = indicator(f.backscrolls_delta > 0);
  f.improved_score = indicator(f.score_diff > 0);
  f.quiz_time_longer = indicator(f.quiz_time_diff > 0);
  return f;
}

Dataset assemble_dataset(const TraceStore& store, FeatureSet set, const FeatureOptions& options) {
  if (store.attempts().empty()) throw EmptyStore();
  options.sessionizer.validate();

  Dataset ds;
  ds.feature_names = feature_names(set, options.srl_only);
  ds.rows.reserve(store.attempts().size());
  const bool with_baseline = set == FeatureSet::kBaseline || !options.srl_only;
  const bool with_srl = set == FeatureSet::kSrl;

  for (const auto& attempt : store.attempts()) {
    AttemptRow row;
    row.student_id = attempt.student_id;
    row.quiz_id = attempt.quiz_id;
    row.attempt_index = attempt.attempt_index;
    row.values.reserve(ds.feature_names.size());
    if (with_baseline) {
      const auto v =
          baseline_features(store, attempt, options.sessionizer, options.pass_fraction).values();
      row.values.insert(row.values.end(), v.begin(), v.end());
    }
    if (with_srl) {
      const auto v =
          srl_features(store, attempt, options.sessionizer, options.pass_fraction).values();
      row.values.insert(row.values.end(), v.begin(), v.end());
    }
    row.label = label_attempt(attempt, options.pass_fraction) ? 1 : 0;
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

void write_features_csv(std::ostream& out, const Dataset& dataset) {
  out << "student_id,quiz_id,attempt_index";
  for (const auto& name : dataset.feature_names) out << ',' << name;
  out << ",label\n";
  for (const auto& row : dataset.rows) {
    out << row.student_id << ',' << row.quiz_id << ',' << row.attempt_index;
    for (double v : row.values) out << ',' << text::format_double(v);
    out << ',' << row.label << '\n';
  }
}

Dataset read_features_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MalformedFeatureRow(1, "missing header");
  const auto header = text::split_csv_line(text::strip_cr(line));
  if (header.size() < 4 || header[0] != "student_id" || header[1] != "quiz_id" ||
      header[2] != "attempt_index" || header.back() != "label") {
    throw MalformedFeatureRow(1, "header must be student_id,quiz_id,attempt_index,<features>,label");
  }
  Dataset ds;
  for (std::size_t i = 3; i + 1 < header.size(); ++i) {
    if (header[i].empty()) throw MalformedFeatureRow(1, "empty feature name");
    ds.feature_names.emplace_back(header[i]);
  }

  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (text::is_blank(line)) continue;
    const auto fields = text::split_csv_line(text::strip_cr(line));
    if (fields.size() != header.size()) {
      throw MalformedFeatureRow(line_number, "expected " + std::to_string(header.size()) +
                                                 " fields, got " + std::to_string(fields.size()));
    }
    AttemptRow row;
    row.student_id = std::string(fields[0]);
    row.quiz_id = std::string(fields[1]);
    const auto index = text::parse_int64(fields[2]);
    if (!index || *index < 1) throw MalformedFeatureRow(line_number, "bad attempt_index");
    row.attempt_index = static_cast<int>(*index);
    for (std::size_t i = 3; i + 1 < fields.size(); ++i) {
      const auto v = text::parse_double(fields[i]);
      if (!v) {
        throw MalformedFeatureRow(line_number, "non-numeric value for '" + ds.feature_names[i - 3] + "'");
      }
      row.values.push_back(*v);
    }
    if (fields.back() == "1") {
      row.label = 1;
    } else if (fields.back() == "0") {
      row.label = 0;
    } else {
      throw MalformedFeatureRow(line_number, "label must be 0 or 1");
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

Dataset read_features_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature file '" + path.string() + "'");
  try {
    return read_features_csv(in);
  } catch (const MalformedFeatureRow& e) {
    throw MalformedFeatureRow(e.line_number(), e.reason(), path.string());
  }
}

}  // namespace srltrace
