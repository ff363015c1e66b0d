#include "srltrace/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "srltrace/errors.hpp"
#include "srltrace/text_format.hpp"

namespace srltrace {
namespace {

using nlohmann::json;

const json& require_key(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw MalformedEvent(line, std::string("missing required key '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
  const json& v = require_key(obj, key, line);
  if (!v.is_string()) throw MalformedEvent(line, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

ScrollEvent event_from_line(std::string_view line, std::size_t line_number) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw MalformedEvent(line_number, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw MalformedEvent(line_number, "line is not a JSON object");

  ScrollEvent ev;
  ev.student_id = require_string(obj, "student_id", line_number);
  ev.object_id = require_string(obj, "object_id", line_number);

  const json& ts = require_key(obj, "ts_ms", line_number);
  if (ts.is_number_unsigned()) {
    const auto u = ts.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw MalformedEvent(line_number, "'ts_ms' out of range");
    }
    ev.ts_ms = static_cast<std::int64_t>(u);
  } else if (ts.is_number_integer()) {
    ev.ts_ms = ts.get<std::int64_t>();
  } else {
    throw MalformedEvent(line_number, "'ts_ms' must be an integer");
  }
  if (ev.ts_ms < 0) throw MalformedEvent(line_number, "'ts_ms' must be >= 0");

  const json& y = require_key(obj, "scroll_y", line_number);
  if (!y.is_number()) throw MalformedEvent(line_number, "'scroll_y' must be a number");
  ev.scroll_y = y.get<double>();
  if (!(ev.scroll_y >= 0.0)) throw MalformedEvent(line_number, "'scroll_y' must be >= 0");

  if (auto it = obj.find("page_height"); it != obj.end() && !it->is_null()) {
    if (!it->is_number()) throw MalformedEvent(line_number, "'page_height' must be a number");
    const double h = it->get<double>();
    if (!(h > 0.0)) throw MalformedEvent(line_number, "'page_height' must be > 0");
    if (ev.scroll_y > h) throw MalformedEvent(line_number, "'scroll_y' exceeds 'page_height'");
    ev.page_height = h;
  }

  if (auto it = obj.find("event"); it != obj.end()) {
    if (!it->is_string()) throw MalformedEvent(line_number, "'event' must be a string");
    const auto& kind = it->get_ref<const std::string&>();
    if (kind == "scroll") {
      ev.kind = EventKind::kScroll;
    } else if (kind == "pageload") {
      ev.kind = EventKind::kPageload;
    } else {
      throw MalformedEvent(line_number, "unknown event kind '" + kind + "'");
    }
  }
  return ev;
}

QuizAttempt attempt_from_line(std::string_view line, std::size_t line_number) {
  const auto fields = text::split_csv_line(line);
  if (fields.size() != 7) {
    throw MalformedAttempt(line_number,
                           "expected 7 fields, got " + std::to_string(fields.size()));
  }
  QuizAttempt a;
  a.student_id = std::string(fields[0]);
  a.quiz_id = std::string(fields[1]);
  if (a.student_id.empty()) throw MalformedAttempt(line_number, "empty student_id");
  if (a.quiz_id.empty()) throw MalformedAttempt(line_number, "empty quiz_id");

  const auto index = text::parse_int64(fields[2]);
  if (!index || *index < 1 || *index > std::numeric_limits<int>::max()) {
    throw MalformedAttempt(line_number, "attempt_index must be an integer >= 1");
  }
  a.attempt_index = static_cast<int>(*index);

  const auto start = text::parse_int64(fields[3]);
  const auto end = text::parse_int64(fields[4]);
  if (!start) throw MalformedAttempt(line_number, "start_ts_ms must be an integer");
  if (!end) throw MalformedAttempt(line_number, "end_ts_ms must be an integer");
  a.start_ts_ms = *start;
  a.end_ts_ms = *end;
  if (a.end_ts_ms < a.start_ts_ms) throw MalformedAttempt(line_number, "end_ts_ms < start_ts_ms");

  const auto score = text::parse_double(fields[5]);
  const auto max_score = text::parse_double(fields[6]);
  if (!score) throw MalformedAttempt(line_number, "score must be a number");
  if (!max_score) throw MalformedAttempt(line_number, "max_score must be a number");
  a.score = *score;
  a.max_score = *max_score;
  if (a.max_score <= 0.0) throw MalformedAttempt(line_number, "max_score must be > 0");
  if (a.score < 0.0) throw MalformedAttempt(line_number, "score must be >= 0");
  if (a.score > a.max_score) throw MalformedAttempt(line_number, "score > max_score");
  return a;
}

bool attempt_order_less(const QuizAttempt& a, const QuizAttempt& b) {
  return std::tie(a.student_id, a.quiz_id, a.attempt_index, a.start_ts_ms) <
         std::tie(b.student_id, b.quiz_id, b.attempt_index, b.start_ts_ms);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::vector<ScrollEvent> parse_events(std::istream& in, EventFormat /*format*/) {
  std::vector<ScrollEvent> events;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (text::is_blank(line)) continue;
    events.push_back(event_from_line(text::strip_cr(line), line_number));
  }
  return events;
}

std::vector<QuizAttempt> parse_attempts(std::istream& in, AttemptFormat /*format*/) {
  std::vector<QuizAttempt> attempts;
  std::string line;
  if (!std::getline(in, line)) throw MalformedAttempt(1, "missing header");
  if (text::strip_cr(line) != kAttemptsCsvHeader) {
    throw MalformedAttempt(1, std::string("header must be exactly '") + kAttemptsCsvHeader + "'");
  }
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (text::is_blank(line)) continue;
    attempts.push_back(attempt_from_line(text::strip_cr(line), line_number));
  }
  return attempts;
}

void write_events_jsonl(std::ostream& out, std::span<const ScrollEvent> events) {
  for (const auto& ev : events) {
    out << "{\"student_id\":" << json(ev.student_id).dump()
        << ",\"object_id\":" << json(ev.object_id).dump() << ",\"ts_ms\":" << ev.ts_ms
        << ",\"scroll_y\":" << text::format_double(ev.scroll_y);
    if (ev.page_height) out << ",\"page_height\":" << text::format_double(*ev.page_height);
    out << ",\"event\":\"" << to_string(ev.kind) << "\"}\n";
  }
}

void write_attempts_csv(std::ostream& out, std::span<const QuizAttempt> attempts) {
  out << kAttemptsCsvHeader << '\n';
  for (const auto& a : attempts) {
    out << a.student_id << ',' << a.quiz_id << ',' << a.attempt_index << ',' << a.start_ts_ms
        << ',' << a.end_ts_ms << ',' << text::format_double(a.score) << ','
        << text::format_double(a.max_score) << '\n';
  }
}

std::span<const ScrollEvent> TraceStore::events_for(const std::string& student_id) const {
  auto it = event_ranges_.find(student_id);
  if (it == event_ranges_.end()) return {};
  return std::span<const ScrollEvent>(events_).subspan(it->second.first,
                                                       it->second.second - it->second.first);
}

std::span<const QuizAttempt> TraceStore::attempts_for(const std::string& student_id,
                                                      const std::string& quiz_id) const {
  auto it = attempt_ranges_.find(AttemptKey{student_id, quiz_id});
  if (it == attempt_ranges_.end()) return {};
  return std::span<const QuizAttempt>(attempts_).subspan(it->second.first,
                                                         it->second.second - it->second.first);
}

std::vector<std::string> TraceStore::students() const {
  std::set<std::string> ids;
  for (const auto& [id, range] : event_ranges_) ids.insert(id);
  for (const auto& [key, range] : attempt_ranges_) ids.insert(key.first);
  return {ids.begin(), ids.end()};
}

TraceStore build_store(std::vector<ScrollEvent> events, std::vector<QuizAttempt> attempts) {
  TraceStore store;
  store.events_ = normalize_events(events);
  events.clear();

  std::sort(attempts.begin(), attempts.end(), attempt_order_less);
  store.attempts_ = std::move(attempts);

  for (std::size_t i = 0; i < store.events_.size();) {
    std::size_t j = i;
    while (j < store.events_.size() && store.events_[j].student_id == store.events_[i].student_id) {
      ++j;
    }
    store.event_ranges_.emplace(store.events_[i].student_id, std::make_pair(i, j));
    i = j;
  }

  const auto& all = store.attempts_;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].student_id == all[i].student_id &&
           all[j].quiz_id == all[i].quiz_id) {
      ++j;
    }
    for (std::size_t k = i; k < j; ++k) {
      const int expected = static_cast<int>(k - i) + 1;
      if (all[k].attempt_index != expected) {
        throw InconsistentAttempts(all[k].student_id, all[k].quiz_id,
                                   "attempt_index " + std::to_string(all[k].attempt_index) +
                                       " where " + std::to_string(expected) +
                                       " was expected (indices must be dense 1..k)");
      }
      if (k > i && all[k].start_ts_ms <= all[k - 1].start_ts_ms) {
        throw InconsistentAttempts(all[k].student_id, all[k].quiz_id,
                                   "start_ts_ms of attempt " + std::to_string(expected) +
                                       " does not exceed that of attempt " +
                                       std::to_string(expected - 1));
      }
    }
    store.attempt_ranges_.emplace(TraceStore::AttemptKey{all[i].student_id, all[i].quiz_id},
                                  std::make_pair(i, j));
    i = j;
  }

  std::optional<TimestampMs> start;
  for (const auto& ev : store.events_) start = start ? std::min(*start, ev.ts_ms) : ev.ts_ms;
  for (const auto& a : store.attempts_) {
    start = start ? std::min(*start, a.start_ts_ms) : a.start_ts_ms;
  }
  store.course_start_ts_ms_ = start.value_or(0);
  return store;
}

void save_store(const TraceStore& store, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_for_write(dir / kEventsFileName);
    write_events_jsonl(out, store.events());
  }
  {
    auto out = open_for_write(dir / kAttemptsFileName);
    write_attempts_csv(out, store.attempts());
  }
  nlohmann::ordered_json manifest;
  manifest["course_start_ts_ms"] = store.course_start_ts_ms();
  manifest["counts"] = {{"events", store.events().size()},
                        {"attempts", store.attempts().size()},
                        {"students", store.students().size()}};
  auto out = open_for_write(dir / kManifestFileName);
  out << manifest.dump(2) << '\n';
}

std::vector<ScrollEvent> read_events_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open events file '" + path.string() + "'");
  try {
    return parse_events(in);
  } catch (const MalformedEvent& e) {
    throw MalformedEvent(e.line_number(), e.reason(), path.string());
  }
}

std::vector<QuizAttempt> read_attempts_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open attempts file '" + path.string() + "'");
  try {
    return parse_attempts(in);
  } catch (const MalformedAttempt& e) {
    throw MalformedAttempt(e.line_number(), e.reason(), path.string());
  }
}

TraceStore load_store(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("store directory '" + dir.string() + "' does not exist");
  }
  TraceStore store =
      build_store(read_events_file(dir / kEventsFileName), read_attempts_file(dir / kAttemptsFileName));

  const auto manifest_path = dir / kManifestFileName;
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream in(manifest_path, std::ios::binary);
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(in);
      const bool ok =
          manifest.at("course_start_ts_ms").get<TimestampMs>() == store.course_start_ts_ms() &&
          manifest.at("counts").at("events").get<std::size_t>() == store.events().size() &&
          manifest.at("counts").at("attempts").get<std::size_t>() == store.attempts().size();
      if (!ok) throw DataError("manifest does not match store contents");
    } catch (const nlohmann::json::exception& e) {
      throw DataError("invalid manifest '" + manifest_path.string() + "': " + e.what());
    } catch (const DataError& e) {
      throw DataError(manifest_path.string() + ": " + e.what());
    }
  }
  return store;
}

}  // namespace srltrace
