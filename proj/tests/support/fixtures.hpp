#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "srltrace/features.hpp"
#include "srltrace/ingest.hpp"
#include "srltrace/rng.hpp"
#include "srltrace/trace_model.hpp"

namespace fixtures {

srltrace::ScrollEvent scroll(const std::string& student, const std::string& object, long long ts_ms,
                             double y);
srltrace::ScrollEvent pageload(const std::string& student, const std::string& object,
                               long long ts_ms, double y = 0.0);
srltrace::QuizAttempt attempt(const std::string& student, const std::string& quiz, int index,
                              long long start_ms, long long end_ms, double score,
                              double max_score = 100.0);

// Events of one student with y/time given in pixels and seconds.
std::vector<srltrace::ScrollEvent> trace(const std::vector<std::pair<double, double>>& y_seconds,
                                         const std::string& object = "p1");

// Random single-student stream for oracle checks: 0..max_len events, a few
// objects, occasional pageloads, gaps that sometimes exceed five minutes.
std::vector<srltrace::ScrollEvent> random_trace(srltrace::Rng& rng, std::size_t max_len);

// Random but valid store: a handful of students and quizzes, 1..3 attempts
// each, events scattered around the attempts.
srltrace::TraceStore random_store(srltrace::Rng& rng);

// Random labeled dataset with integer-ish feature values (many ties).
srltrace::Dataset random_dataset(srltrace::Rng& rng, std::size_t rows, std::size_t features,
                                 std::size_t students = 6);

// Directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace fixtures
