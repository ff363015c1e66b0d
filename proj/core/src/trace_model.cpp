#include "srltrace/trace_model.hpp"

#include <algorithm>
#include <tuple>

#include "srltrace/errors.hpp"

namespace srltrace {

const char* to_string(EventKind kind) noexcept {
  return kind == EventKind::kPageload ? "pageload" : "scroll";
}

bool event_order_less(const ScrollEvent& a, const ScrollEvent& b) {
  // std::optional orders nullopt first.
  return std::tie(a.student_id, a.ts_ms, a.object_id, a.scroll_y, a.kind, a.page_height) <
         std::tie(b.student_id, b.ts_ms, b.object_id, b.scroll_y, b.kind, b.page_height);
}

std::vector<ScrollEvent> normalize_events(std::span<const ScrollEvent> events) {
  std::vector<ScrollEvent> out(events.begin(), events.end());
  std::sort(out.begin(), out.end(), event_order_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void SessionizerConfig::validate() const {
  if (break_gap_ms <= 0) throw InvalidConfig("break_gap_ms must be > 0");
  if (!(top_band_px > 0)) throw InvalidConfig("top_band_px must be > 0");
  if (!(min_depth_px > 0)) throw InvalidConfig("min_depth_px must be > 0");
  if (!(backscroll_epsilon_px > 0)) throw InvalidConfig("backscroll_epsilon_px must be > 0");
}

}  // namespace srltrace
