#include "srltrace/sessionize.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "srltrace/errors.hpp"

namespace srltrace {
namespace {

// Backscroll actions inside one session's events.
int backscrolls_in_session(std::span<const ScrollEvent> events, double epsilon) {
  int actions = 0;
  bool in_run = false;
  for (std::size_t i = 1; i < events.size(); ++i) {
    const auto& prev = events[i - 1];
    const auto& cur = events[i];
    const bool qualifies =
        prev.object_id == cur.object_id && (prev.scroll_y - cur.scroll_y) > epsilon;
    if (qualifies && !in_run) ++actions;
    in_run = qualifies;
  }
  return actions;
}

ReadingSession close_session(std::span<const ScrollEvent> events, int breaks,
                             TimestampMs break_ms, const SessionizerConfig& cfg) {
  ReadingSession s;
  s.student_id = events.front().student_id;
  s.start_ts_ms = events.front().ts_ms;
  s.end_ts_ms = events.back().ts_ms;
  s.event_count = static_cast<int>(events.size());
  s.num_breaks = breaks;
  s.active_ms = (s.end_ts_ms - s.start_ts_ms) - break_ms;
  s.num_backscrolls = backscrolls_in_session(events, cfg.backscroll_epsilon_px);

  std::set<std::string> objects;
  for (const auto& ev : events) objects.insert(ev.object_id);
  s.objects.assign(objects.begin(), objects.end());
  s.objects_visited = static_cast<int>(s.objects.size());
  return s;
}

}  // namespace

std::vector<ReadingSession> segment_sessions(std::span<const ScrollEvent> events,
                                             const SessionizerConfig& cfg) {
  std::vector<ReadingSession> sessions;
  if (events.empty()) return sessions;

  std::size_t begin = 0;
  int breaks = 0;
  TimestampMs break_ms = 0;
  double max_depth = events.front().scroll_y;

  for (std::size_t i = 1; i < events.size(); ++i) {
    const auto& prev = events[i - 1];
    const auto& ev = events[i];
    if (ev.ts_ms < prev.ts_ms) {
      throw UnsortedInput("event timestamps decrease at position " + std::to_string(i));
    }
    if (ev.student_id != prev.student_id) {
      throw DataError("segment_sessions expects events of a single student");
    }

    const bool restart = ev.kind == EventKind::kPageload ||
                         (ev.scroll_y <= cfg.top_band_px && max_depth >= cfg.min_depth_px);
    if (restart) {
      sessions.push_back(close_session(events.subspan(begin, i - begin), breaks, break_ms, cfg));
      begin = i;
      breaks = 0;
      break_ms = 0;
      max_depth = ev.scroll_y;
      continue;
    }

    const TimestampMs gap = ev.ts_ms - prev.ts_ms;
    if (gap > cfg.break_gap_ms) {
      ++breaks;
      break_ms += gap;
    }
    max_depth = std::max(max_depth, ev.scroll_y);
  }
  sessions.push_back(close_session(events.subspan(begin), breaks, break_ms, cfg));
  return sessions;
}

int count_backscrolls(std::span<const ScrollEvent> events, const SessionizerConfig& cfg) {
  int total = 0;
  for (const auto& s : segment_sessions(events, cfg)) total += s.num_backscrolls;
  return total;
}

double reading_speed(std::span<const ReadingSession> sessions) {
  std::set<std::string_view> objects;
  TimestampMs active = 0;
  for (const auto& s : sessions) {
    active += s.active_ms;
    objects.insert(s.objects.begin(), s.objects.end());
  }
  if (active <= 0) return 0.0;
  return static_cast<double>(objects.size()) / (static_cast<double>(active) / kMsPerMinute);
}

ReadingWindow reading_window(const TraceStore& store, const QuizAttempt& attempt) {
  ReadingWindow w;
  w.student_id = attempt.student_id;
  w.window_end_ts_ms = attempt.start_ts_ms;
  w.window_start_ts_ms = store.course_start_ts_ms();
  if (attempt.attempt_index > 1) {
    const auto history = store.attempts_for(attempt.student_id, attempt.quiz_id);
    const auto prev_pos = static_cast<std::size_t>(attempt.attempt_index - 2);
    if (prev_pos < history.size()) w.window_start_ts_ms = history[prev_pos].end_ts_ms;
  }
  if (w.window_end_ts_ms <= w.window_start_ts_ms) return w;

  const auto all = store.events_for(attempt.student_id);
  const auto by_ts = [](const ScrollEvent& ev, TimestampMs t) { return ev.ts_ms < t; };
  const auto first = std::lower_bound(all.begin(), all.end(), w.window_start_ts_ms, by_ts);
  const auto last = std::lower_bound(first, all.end(), w.window_end_ts_ms, by_ts);
  w.events = std::span<const ScrollEvent>(first, last);
  return w;
}

void write_session_summary_csv(std::ostream& out, const TraceStore& store,
                               const SessionizerConfig& cfg) {
  out << "student_id,session_index,start_ts_ms,end_ts_ms,num_breaks,num_backscrolls,"
         "objects_visited,active_ms\n";
  for (const auto& student : store.students()) {
    const auto sessions = segment_sessions(store.events_for(student), cfg);
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      const auto& s = sessions[i];
      out << student << ',' << (i + 1) << ',' << s.start_ts_ms << ',' << s.end_ts_ms << ','
          << s.num_breaks << ',' << s.num_backscrolls << ',' << s.objects_visited << ','
          << s.active_ms << '\n';
    }
  }
}

}  // namespace srltrace
