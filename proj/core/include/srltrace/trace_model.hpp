#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace srltrace {

// Milliseconds since the Unix epoch (UTC). Durations are plain int64 ms.
using TimestampMs = std::int64_t;

inline constexpr double kMsPerMinute = 60'000.0;

// Ordering matters: within equal (student, ts, object, scroll_y) a pageload
// sorts before a scroll.
enum class EventKind : std::uint8_t { kPageload = 0, kScroll = 1 };

const char* to_string(EventKind kind) noexcept;

// One timestamped scroll observation for a student on a page object.
struct ScrollEvent {
  std::string student_id;
  std::string object_id;
  TimestampMs ts_ms = 0;
  double scroll_y = 0.0;  // pixels from page top
  std::optional<double> page_height;
  EventKind kind = EventKind::kScroll;

  bool operator==(const ScrollEvent&) const = default;
};

// Total order used by normalize_events: (student_id, ts_ms, object_id,
// scroll_y), then the remaining fields so that sorting is deterministic.
bool event_order_less(const ScrollEvent& a, const ScrollEvent& b);

// Returns a sorted copy with exact duplicates collapsed. Near-duplicates
// (same instant, different scroll_y) are kept and ordered by scroll_y.
std::vector<ScrollEvent> normalize_events(std::span<const ScrollEvent> events);

struct QuizAttempt {
  std::string student_id;
  std::string quiz_id;
  int attempt_index = 1;  // 1-based, dense per (student, quiz)
  TimestampMs start_ts_ms = 0;
  TimestampMs end_ts_ms = 0;
  double score = 0.0;
  double max_score = 1.0;

  double score_fraction() const { return score / max_score; }
  TimestampMs duration_ms() const { return end_ts_ms - start_ts_ms; }
  double duration_minutes() const { return static_cast<double>(duration_ms()) / kMsPerMinute; }

  bool operator==(const QuizAttempt&) const = default;
};

// A contiguous reading episode produced by the sessionizer.
struct ReadingSession {
  std::string student_id;
  TimestampMs start_ts_ms = 0;
  TimestampMs end_ts_ms = 0;
  int event_count = 0;
  int num_breaks = 0;
  int num_backscrolls = 0;
  int objects_visited = 0;
  TimestampMs active_ms = 0;  // elapsed time minus break gaps
  std::vector<std::string> objects;  // distinct object ids, sorted

  bool operator==(const ReadingSession&) const = default;
};

struct SessionizerConfig {
  TimestampMs break_gap_ms = 300'000;
  double top_band_px = 50.0;
  double min_depth_px = 200.0;
  double backscroll_epsilon_px = 50.0;

  // Throws InvalidConfig unless every field is strictly positive.
  void validate() const;

  bool operator==(const SessionizerConfig&) const = default;
};

}  // namespace srltrace
