#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "srltrace/trace_model.hpp"

namespace srltrace {

struct GenConfig {
  int n_students = 142;
  int n_quizzes = 6;
  int max_attempts = 3;
  double signal_strength = 1.0;  // [0, 1]; 0 makes every label a coin flip
  double noise = 0.15;           // log-scale jitter on behavioural durations
  std::uint64_t seed = 7;

  void validate() const;  // throws InvalidConfig
};

// Hidden per-attempt state of the simulated student. Written to truth.json,
// never read by the pipeline.
struct LatentAttempt {
  std::string student_id;
  std::string quiz_id;
  int attempt_index = 0;
  double reflectiveness = 0.0;     // persistent trait in [0, 1]
  double reflection_draw = 0.0;    // uniform draw; < reflectiveness means the student adjusts after a fail
  bool adjusted = false;           // reflective response happened before this attempt
  double reread_intensity = 0.0;   // expected backward scrolls per page
  double time_multiplier = 1.0;    // planned quiz-time multiplier
  double pass_probability = 0.5;
  bool passed = false;
};

struct Cohort {
  std::vector<ScrollEvent> events;     // normalized order
  std::vector<QuizAttempt> attempts;   // sorted by (student, quiz, attempt)
  std::vector<LatentAttempt> truth;    // aligned with attempts
  GenConfig config;
};

// Simulated students cycling through planning, reading and reflection.
// Deterministic per config: each student draws from its own RNG substream
// of the seed.
Cohort generate_cohort(const GenConfig& cfg);

nlohmann::ordered_json truth_to_json(const Cohort& cohort);

inline constexpr const char* kTruthFileName = "truth.json";

// Writes events.jsonl, attempts.csv and truth.json into `dir`.
void write_cohort(const Cohort& cohort, const std::filesystem::path& dir);

}  // namespace srltrace
