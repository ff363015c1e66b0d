#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace fixtures {

using srltrace::EventKind;
using srltrace::QuizAttempt;
using srltrace::ScrollEvent;

ScrollEvent scroll(const std::string& student, const std::string& object, long long ts_ms,
                   double y) {
  ScrollEvent ev;
  ev.student_id = student;
  ev.object_id = object;
  ev.ts_ms = ts_ms;
  ev.scroll_y = y;
  ev.kind = EventKind::kScroll;
  return ev;
}

ScrollEvent pageload(const std::string& student, const std::string& object, long long ts_ms,
                     double y) {
  ScrollEvent ev = scroll(student, object, ts_ms, y);
  ev.kind = EventKind::kPageload;
  return ev;
}

QuizAttempt attempt(const std::string& student, const std::string& quiz, int index,
                    long long start_ms, long long end_ms, double score, double max_score) {
  QuizAttempt a;
  a.student_id = student;
  a.quiz_id = quiz;
  a.attempt_index = index;
  a.start_ts_ms = start_ms;
  a.end_ts_ms = end_ms;
  a.score = score;
  a.max_score = max_score;
  return a;
}

std::vector<ScrollEvent> trace(const std::vector<std::pair<double, double>>& y_seconds,
                               const std::string& object) {
  std::vector<ScrollEvent> out;
  for (const auto& [y, s] : y_seconds) {
    out.push_back(scroll("s1", object, static_cast<long long>(s * 1000.0), y));
  }
  return out;
}

std::vector<ScrollEvent> random_trace(srltrace::Rng& rng, std::size_t max_len) {
  const auto len = static_cast<std::size_t>(rng.below(max_len + 1));
  std::vector<ScrollEvent> out;
  long long ts = static_cast<long long>(rng.below(1'000'000));
  for (std::size_t i = 0; i < len; ++i) {
    const auto gap_kind = rng.below(10);
    if (gap_kind == 0) {
      ts += 0;  // same instant
    } else if (gap_kind == 1) {
      ts += 250'000 + static_cast<long long>(rng.below(100'000));  // around the break threshold
    } else if (gap_kind == 2) {
      ts += 300'000;  // exactly the threshold
    } else {
      ts += static_cast<long long>(rng.below(60'000));
    }
    const std::string object = "obj" + std::to_string(rng.below(3));
    double y;
    const auto y_kind = rng.below(8);
    if (y_kind == 0) {
      y = static_cast<double>(rng.below(60));  // near the top band
    } else if (y_kind == 1) {
      y = 50.0;
    } else {
      y = static_cast<double>(rng.below(1500));
    }
    ScrollEvent ev = scroll("s1", object, ts, y);
    if (rng.below(15) == 0) ev.kind = EventKind::kPageload;
    out.push_back(std::move(ev));
  }
  return out;
}

srltrace::TraceStore random_store(srltrace::Rng& rng) {
  std::vector<ScrollEvent> events;
  std::vector<QuizAttempt> attempts;
  const auto n_students = 2 + rng.below(4);
  const auto n_quizzes = 1 + rng.below(3);
  for (std::uint64_t s = 0; s < n_students; ++s) {
    const std::string student = "s" + std::to_string(s);
    long long now = static_cast<long long>(rng.below(100'000));
    for (std::uint64_t q = 0; q < n_quizzes; ++q) {
      const std::string quiz = "q" + std::to_string(q);
      const auto n_attempts = 1 + rng.below(3);
      for (std::uint64_t k = 1; k <= n_attempts; ++k) {
        const auto n_events = rng.below(25);
        double y = 0.0;
        for (std::uint64_t e = 0; e < n_events; ++e) {
          now += 1'000 + static_cast<long long>(rng.below(rng.below(6) == 0 ? 900'000 : 40'000));
          y = rng.below(5) == 0 ? std::max(0.0, y - static_cast<double>(rng.below(400)))
                                : y + static_cast<double>(rng.below(300));
          if (rng.below(12) == 0) y = static_cast<double>(rng.below(40));
          ScrollEvent ev = scroll(student, "o" + std::to_string(q) + "_" + std::to_string(rng.below(3)), now, y);
          if (rng.below(20) == 0) ev.kind = EventKind::kPageload;
          events.push_back(std::move(ev));
        }
        now += 1'000;
        const long long start = now;
        now += 60'000 + static_cast<long long>(rng.below(1'800'000));
        const double max_score = rng.below(2) == 0 ? 100.0 : 10.0;
        const double score = static_cast<double>(rng.below(static_cast<std::uint64_t>(max_score) + 1));
        attempts.push_back(attempt(student, quiz, static_cast<int>(k), start, now, score, max_score));
      }
    }
  }
  return srltrace::build_store(std::move(events), std::move(attempts));
}

srltrace::Dataset random_dataset(srltrace::Rng& rng, std::size_t rows, std::size_t features,
                                 std::size_t students) {
  srltrace::Dataset ds;
  for (std::size_t j = 0; j < features; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < rows; ++i) {
    srltrace::AttemptRow row;
    row.student_id = "s" + std::to_string(rng.below(students));
    row.quiz_id = "q1";
    row.attempt_index = static_cast<int>(i + 1);
    for (std::size_t j = 0; j < features; ++j) {
      row.values.push_back(static_cast<double>(rng.below(6)) + (rng.below(3) == 0 ? 0.5 : 0.0));
    }
    row.label = rng.bernoulli(0.5) ? 1 : 0;
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

namespace {
std::atomic<int> temp_counter{0};
}

TempDir::TempDir() {
  path_ = std::filesystem::temp_directory_path() /
          ("srltrace_test_" + std::to_string(::getpid()) + "_" + std::to_string(temp_counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

}  // namespace fixtures
