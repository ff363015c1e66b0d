#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "srltrace/trace_model.hpp"

namespace srltrace {

enum class EventFormat { kJsonl };
enum class AttemptFormat { kCsv };

inline constexpr const char* kAttemptsCsvHeader =
    "student_id,quiz_id,attempt_index,start_ts_ms,end_ts_ms,score,max_score";

// One ScrollEvent per non-blank line, in input order. Unknown keys are
// ignored. Throws MalformedEvent on the first bad line.
std::vector<ScrollEvent> parse_events(std::istream& in, EventFormat format = EventFormat::kJsonl);

// Throws MalformedAttempt on the first bad line (including a bad header).
std::vector<QuizAttempt> parse_attempts(std::istream& in,
                                        AttemptFormat format = AttemptFormat::kCsv);

void write_events_jsonl(std::ostream& out, std::span<const ScrollEvent> events);
void write_attempts_csv(std::ostream& out, std::span<const QuizAttempt> attempts);

// Immutable, indexed view of one course's trace data.
//
// Events are normalized and grouped by student (each group sorted by
// ts_ms); attempts are grouped by (student, quiz) and sorted by
// attempt_index, which is checked to be dense 1..k with strictly increasing
// start times.
class TraceStore {
 public:
  using AttemptKey = std::pair<std::string, std::string>;  // (student, quiz)

  TraceStore() = default;

  std::span<const ScrollEvent> events_for(const std::string& student_id) const;
  std::span<const QuizAttempt> attempts_for(const std::string& student_id,
                                            const std::string& quiz_id) const;

  // Every event (normalized order) and every attempt, sorted by
  // (student_id, quiz_id, attempt_index).
  const std::vector<ScrollEvent>& events() const noexcept { return events_; }
  const std::vector<QuizAttempt>& attempts() const noexcept { return attempts_; }

  // Students appearing in either events or attempts, ascending.
  std::vector<std::string> students() const;

  TimestampMs course_start_ts_ms() const noexcept { return course_start_ts_ms_; }

  bool operator==(const TraceStore& other) const {
    return events_ == other.events_ && attempts_ == other.attempts_ &&
           course_start_ts_ms_ == other.course_start_ts_ms_;
  }

 private:
  friend TraceStore build_store(std::vector<ScrollEvent> events,
                                std::vector<QuizAttempt> attempts);

  std::vector<ScrollEvent> events_;
  std::vector<QuizAttempt> attempts_;
  // [begin, end) offsets into events_/attempts_.
  std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> event_ranges_;
  std::map<AttemptKey, std::pair<std::size_t, std::size_t>> attempt_ranges_;
  TimestampMs course_start_ts_ms_ = 0;
};

// Throws InconsistentAttempts on gaps/duplicates in attempt_index or start
// times that do not increase strictly with the index.
TraceStore build_store(std::vector<ScrollEvent> events, std::vector<QuizAttempt> attempts);

// Store directory layout.
inline constexpr const char* kEventsFileName = "events.jsonl";
inline constexpr const char* kAttemptsFileName = "attempts.csv";
inline constexpr const char* kManifestFileName = "manifest.json";

// Writes events.jsonl, attempts.csv and manifest.json
// ({course_start_ts_ms, counts: {events, attempts, students}}).
void save_store(const TraceStore& store, const std::filesystem::path& dir);

// Reads events.jsonl and attempts.csv from `dir` and rebuilds the store. A
// manifest, when present, must agree with the rebuilt store.
TraceStore load_store(const std::filesystem::path& dir);

// File-level wrappers that prefix errors with the file path.
std::vector<ScrollEvent> read_events_file(const std::filesystem::path& path);
std::vector<QuizAttempt> read_attempts_file(const std::filesystem::path& path);

}  // namespace srltrace
