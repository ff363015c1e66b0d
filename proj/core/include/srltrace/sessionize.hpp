#pragma once

#include <span>
#include <string>
#include <vector>

#include "srltrace/ingest.hpp"
#include "srltrace/trace_model.hpp"

namespace srltrace {

// Splits one student's time-ordered stream into reading sessions.
//
// A session starts at the first event, at every pageload, and at every
// scroll that returns to within top_band_px of the top after the current
// session already reached min_depth_px (restart from the top). Inside a
// session each gap longer than break_gap_ms counts as a break and is not
// active time; when the same event also restarts the session, the restart
// wins and no break is counted.
//
// Throws UnsortedInput if timestamps decrease.
std::vector<ReadingSession> segment_sessions(std::span<const ScrollEvent> events,
                                             const SessionizerConfig& cfg);

// Backward-scroll actions: consecutive same-session, same-object pairs whose
// scroll_y drops by more than backscroll_epsilon_px. A run of consecutive
// qualifying pairs counts once.
int count_backscrolls(std::span<const ScrollEvent> events, const SessionizerConfig& cfg);

// Distinct objects across all sessions per active minute; 0 when there is no
// active time.
double reading_speed(std::span<const ReadingSession> sessions);

// Events attributed to an attempt: [end of the previous attempt on the same
// quiz (or course start), start of this attempt). The span points into the
// store.
struct ReadingWindow {
  std::string student_id;
  TimestampMs window_start_ts_ms = 0;
  TimestampMs window_end_ts_ms = 0;
  std::span<const ScrollEvent> events;
};

ReadingWindow reading_window(const TraceStore& store, const QuizAttempt& attempt);

// One CSV row per session, all students:
// student_id,session_index,start_ts_ms,end_ts_ms,num_breaks,num_backscrolls,objects_visited,active_ms
void write_session_summary_csv(std::ostream& out, const TraceStore& store,
                               const SessionizerConfig& cfg);

}  // namespace srltrace
