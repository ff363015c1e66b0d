#include "srltrace/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "srltrace/errors.hpp"
#include "srltrace/gbdt.hpp"
#include "srltrace/ingest.hpp"
#include "srltrace/rng.hpp"

namespace srltrace {
namespace {

// Every tunable constant of the generator. These are constructions of this
// simulator, not measurements of a real cohort; they were tuned once so the
// default seed lands the baseline model near 70% accuracy and the SRL model
// near 90%, with score_diff and prev_fail among the leading SRL features.
struct Calibration {
  // Pass model, on the logit scale. At signal_strength s the logit is
  // (1 - s) * logit(coin_pass_probability) + s * (structured logit).
  double coin_pass_probability = 0.5;
  double first_base_logit = 1.8;
  double first_volume_logit = 0.35;   // per preparation bout beyond two (visible to baseline)
  double first_reflect_logit = 12.0;  // times (reflectiveness - 0.5)
  double adjusted_logit = 3.0;        // previous fail, student adjusted
  double unadjusted_logit = -3.0;     // previous fail, no adjustment
  double after_pass_logit = 2.5;      // previous pass
  double momentum_logit = 14.0;       // times the change between the last two score fractions
  double late_outcome_weight = 0.5;   // share of the previous-outcome term from the third attempt on
  double late_base_logit = 0.8;       // third attempt on
  double fail_side_gain = 2.0;        // applied to negative structured logits
  double score_sigma = 0.3;           // spread of the score around the pass probability

  // Attempt dynamics.
  double retake_after_fail = 0.85;
  double retake_after_pass = 0.6;

  // Reading behaviour.
  double course_start_ms = 1'700'000'000'000.0;  // 2023-11-14T22:13:20Z
  int min_objects_per_page = 6;
  int max_objects_per_page = 10;
  double min_object_px = 400.0;
  double max_object_px = 900.0;
  double min_step_px = 150.0;
  double max_step_px = 350.0;
  double base_step_seconds = 3.0;
  double reflect_step_seconds = 24.0;  // added per unit of reflectiveness
  double break_probability = 0.02;     // per scroll step
  double min_break_minutes = 6.0;
  double max_break_minutes = 25.0;
  double restart_probability = 0.25;   // return to top for another pass after finishing
  double base_reread = 0.15;           // backscroll actions per object
  double reflect_reread = 0.9;         // added per unit of reflectiveness
  double adjusted_reread = 2.0;
  double skim_reread = 0.1;
  double review_reread = 0.3;
  double adjusted_dwell = 1.3;         // dwell-time scale of the window before a retake
  double skim_dwell = 1.0;
  double review_dwell = 1.0;
  double second_pass_dwell = 0.5;

  // Quiz timing.
  double base_quiz_minutes = 12.0;
  double pace_sigma = 0.5;             // per-student log-scale pace spread
  double adjusted_time_multiplier = 1.6;
  double unadjusted_time_multiplier = 0.8;
  double review_time_multiplier = 0.9;
};

constexpr Calibration kCalibration{};

struct Page {
  std::vector<std::string> object_ids;
  std::vector<double> object_tops;  // ascending, first is 0
  double height = 0.0;

  std::size_t object_at(double y) const {
    const auto it = std::upper_bound(object_tops.begin(), object_tops.end(), y);
    return static_cast<std::size_t>(std::distance(object_tops.begin(), it)) - 1;
  }
};

std::string padded(const char* prefix, int value, int width) {
  std::string digits_part = std::to_string(value);
  if (static_cast<int>(digits_part.size()) < width) {
    digits_part.insert(0, static_cast<std::size_t>(width) - digits_part.size(), '0');
  }
  return prefix + digits_part;
}

int digits(int n) { return n < 10 ? 1 : 1 + digits(n / 10); }

std::vector<Page> build_course(const GenConfig& cfg) {
  const auto& c = kCalibration;
  Rng rng = Rng::substream(cfg.seed, 0);
  std::vector<Page> pages;
  for (int q = 0; q < cfg.n_quizzes; ++q) {
    Page page;
    const int n_objects =
        c.min_objects_per_page +
        static_cast<int>(rng.below(static_cast<std::uint64_t>(c.max_objects_per_page - c.min_objects_per_page + 1)));
    double top = 0.0;
    for (int o = 0; o < n_objects; ++o) {
      page.object_ids.push_back(padded("sec", q + 1, 2) + padded("-obj", o + 1, 2));
      page.object_tops.push_back(top);
      top += std::round(rng.uniform(c.min_object_px, c.max_object_px));
    }
    page.height = top;
    pages.push_back(std::move(page));
  }
  return pages;
}

// Simulates one student; events and attempts are appended in time order.
class StudentSim {
 public:
  StudentSim(std::string id, const GenConfig& cfg, const std::vector<Page>& pages, Rng rng)
      : id_(std::move(id)), cfg_(cfg), pages_(pages), rng_(std::move(rng)) {}

  void run(Cohort& out, int quiz_digits) {
    const auto& c = kCalibration;
    out_ = &out;
    // Arcsine-distributed trait: most students lean clearly one way.
    const double u = rng_.uniform();
    reflectiveness_ = std::pow(std::sin(std::numbers::pi * u / 2.0), 2.0);
    pace_ = std::exp(rng_.normal(0.0, c.pace_sigma));
    step_seconds_ = c.base_step_seconds + c.reflect_step_seconds * reflectiveness_;
    now_ = static_cast<TimestampMs>(c.course_start_ms) + minutes(rng_.uniform(0.0, 480.0));

    for (int q = 0; q < cfg_.n_quizzes; ++q) {
      run_quiz(q, padded("quiz", q + 1, quiz_digits));
      now_ += minutes(rng_.uniform(24.0 * 60.0, 72.0 * 60.0));
    }
  }

 private:
  static TimestampMs minutes(double m) { return static_cast<TimestampMs>(std::llround(m * 60'000.0)); }
  static TimestampMs seconds(double s) { return static_cast<TimestampMs>(std::llround(s * 1'000.0)); }

  double jitter() { return std::exp(rng_.normal(0.0, cfg_.noise)); }

  double signal_logit(double structured) const {
    const double s = cfg_.signal_strength;
    const double shaped = structured < 0.0 ? kCalibration.fail_side_gain * structured : structured;
    return (1.0 - s) * logit(kCalibration.coin_pass_probability) + s * shaped;
  }

  void emit(const Page& page, double y, EventKind kind) {
    ScrollEvent ev;
    ev.student_id = id_;
    ev.object_id = page.object_ids[page.object_at(y)];
    ev.ts_ms = now_;
    ev.scroll_y = y;
    ev.page_height = page.height;
    ev.kind = kind;
    out_->events.push_back(std::move(ev));
  }

  void advance(double step_seconds) { now_ += std::max<TimestampMs>(1'000, seconds(step_seconds)); }

  // Pulls back within the current object: one or two upward moves, each
  // larger than the backscroll epsilon.
  void backscroll(const Page& page, double& y) {
    const double top = page.object_tops[page.object_at(y)];
    const double room = y - top;
    if (room < 120.0) return;
    const double drop = std::min(room, rng_.uniform(120.0, 320.0));
    const int moves = rng_.bernoulli(0.5) ? 2 : 1;
    for (int m = 0; m < moves; ++m) {
      advance(rng_.uniform(1.0, 3.0));
      y = std::round(y - drop / moves);
      emit(page, y, EventKind::kScroll);
    }
  }

  // One sitting on a page: pageload, reading down with occasional re-reads
  // and breaks, optionally a second pass from the top.
  void read_bout(const Page& page, double reread_per_object, double dwell_scale) {
    const auto& c = kCalibration;
    double y = 0.0;
    emit(page, y, EventKind::kPageload);
    const double mean_step = (c.min_step_px + c.max_step_px) / 2.0;
    const double steps_per_object = (page.height / page.object_ids.size()) / mean_step;
    const double p_reread = std::min(0.9, reread_per_object / steps_per_object);

    bool second_pass = false;
    while (true) {
      if (rng_.bernoulli(c.break_probability)) {
        now_ += minutes(rng_.uniform(c.min_break_minutes, c.max_break_minutes));
      }
      advance(step_seconds_ * dwell_scale * jitter());
      y = std::min(page.height, std::round(y + rng_.uniform(c.min_step_px, c.max_step_px)));
      emit(page, y, EventKind::kScroll);
      if (!second_pass && y < page.height && rng_.bernoulli(p_reread)) backscroll(page, y);
      if (y >= page.height) {
        if (second_pass || !rng_.bernoulli(c.restart_probability)) break;
        second_pass = true;
        advance(rng_.uniform(2.0, 6.0));
        y = std::round(rng_.uniform(0.0, 40.0));
        emit(page, y, EventKind::kScroll);
        dwell_scale *= kCalibration.second_pass_dwell;
      }
    }
  }

  // Whole-number score out of 100 that agrees with the label at a 0.5 pass
  // mark; higher pass probability shifts it up within its half.
  int score_points(bool passed, double p) {
    const double position = std::clamp(p + rng_.normal(0.0, kCalibration.score_sigma), 0.0, 1.0);
    if (passed) return 50 + std::min(50, static_cast<int>(position * 51.0));
    return std::min(49, static_cast<int>(position * 50.0));
  }

  void run_quiz(int q, const std::string& quiz_id) {
    const auto& c = kCalibration;
    const Page& page = pages_[static_cast<std::size_t>(q)];

    const double r = rng_.uniform();
    const int prep_bouts = r < 0.3 ? 1 : (r < 0.75 ? 2 : 3);
    const double first_reread = c.base_reread + c.reflect_reread * reflectiveness_;
    for (int b = 0; b < prep_bouts; ++b) {
      if (b > 0) now_ += minutes(rng_.uniform(120.0, 1200.0));
      read_bout(page, first_reread, jitter());
    }

    std::vector<double> fractions;
    bool prev_passed = false;
    for (int k = 1; k <= cfg_.max_attempts; ++k) {
      LatentAttempt latent;
      latent.student_id = id_;
      latent.quiz_id = quiz_id;
      latent.attempt_index = k;
      latent.reflectiveness = reflectiveness_;

      double structured = 0.0;
      if (k == 1) {
        latent.reread_intensity = first_reread;
        structured = c.first_base_logit + c.first_volume_logit * (prep_bouts - 2) +
                     c.first_reflect_logit * (reflectiveness_ - 0.5);
      } else {
        // Self-reflection on the previous outcome shapes the next reading
        // window and the time planned for the next try.
        now_ += minutes(rng_.uniform(15.0, 240.0));
        if (prev_passed) {
          latent.reread_intensity = c.review_reread;
          latent.time_multiplier = c.review_time_multiplier;
          read_bout(page, latent.reread_intensity, c.review_dwell * jitter());
          structured = c.after_pass_logit;
        } else {
          latent.reflection_draw = rng_.uniform();
          latent.adjusted = latent.reflection_draw < reflectiveness_;
          if (latent.adjusted) {
            latent.reread_intensity = c.adjusted_reread;
            latent.time_multiplier = c.adjusted_time_multiplier;
            read_bout(page, latent.reread_intensity, c.adjusted_dwell * jitter());
            structured = c.adjusted_logit;
          } else {
            latent.reread_intensity = c.skim_reread;
            latent.time_multiplier = c.unadjusted_time_multiplier;
            read_bout(page, latent.reread_intensity, c.skim_dwell * jitter());
            structured = c.unadjusted_logit;
          }
        }
        if (k >= 3) {
          structured = c.late_base_logit + c.late_outcome_weight * structured +
                       c.momentum_logit * (fractions[fractions.size() - 1] - fractions[fractions.size() - 2]);
        }
      }

      latent.pass_probability = sigmoid(signal_logit(structured));
      latent.passed = rng_.bernoulli(latent.pass_probability);

      now_ += minutes(rng_.uniform(10.0, 120.0));
      QuizAttempt attempt;
      attempt.student_id = id_;
      attempt.quiz_id = quiz_id;
      attempt.attempt_index = k;
      attempt.start_ts_ms = now_;
      const double duration =
          std::max(1.0, c.base_quiz_minutes * pace_ * latent.time_multiplier * jitter());
      now_ += minutes(duration);
      attempt.end_ts_ms = now_;
      const int points = score_points(latent.passed, latent.pass_probability);
      attempt.max_score = 100.0;
      attempt.score = points;
      fractions.push_back(attempt.score_fraction());

      out_->attempts.push_back(attempt);
      out_->truth.push_back(latent);

      prev_passed = latent.passed;
      const double retake = prev_passed ? c.retake_after_pass : c.retake_after_fail;
      if (!rng_.bernoulli(retake)) break;
    }
  }

  std::string id_;
  const GenConfig& cfg_;
  const std::vector<Page>& pages_;
  Rng rng_;
  Cohort* out_ = nullptr;
  double reflectiveness_ = 0.0;
  double pace_ = 1.0;
  double step_seconds_ = 6.0;
  TimestampMs now_ = 0;
};

}  // namespace

void GenConfig::validate() const {
  if (n_students < 1) throw InvalidConfig("n_students must be >= 1");
  if (n_quizzes < 1) throw InvalidConfig("n_quizzes must be >= 1");
  if (max_attempts < 1) throw InvalidConfig("max_attempts must be >= 1");
  if (!(signal_strength >= 0.0 && signal_strength <= 1.0)) {
    throw InvalidConfig("signal_strength must be in [0, 1]");
  }
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw InvalidConfig("noise must be >= 0");
}

Cohort generate_cohort(const GenConfig& cfg) {
  cfg.validate();
  const auto pages = build_course(cfg);
  Cohort cohort;
  cohort.config = cfg;
  const int width = std::max(3, digits(cfg.n_students));
  const int quiz_width = std::max(2, digits(cfg.n_quizzes));
  for (int s = 0; s < cfg.n_students; ++s) {
    StudentSim sim(padded("s", s + 1, width), cfg, pages,
                   Rng::substream(cfg.seed, static_cast<std::uint64_t>(s) + 1));
    sim.run(cohort, quiz_width);
  }
  // Students are generated in id order and each stream is time ordered with
  // strictly increasing timestamps, so this only confirms canonical order.
  cohort.events = normalize_events(cohort.events);
  return cohort;
}

nlohmann::ordered_json truth_to_json(const Cohort& cohort) {
  nlohmann::ordered_json j;
  const auto& cfg = cohort.config;
  j["generator"] = {{"n_students", cfg.n_students},     {"n_quizzes", cfg.n_quizzes},
                    {"max_attempts", cfg.max_attempts}, {"signal_strength", cfg.signal_strength},
                    {"noise", cfg.noise},               {"seed", cfg.seed}};
  nlohmann::ordered_json attempts = nlohmann::ordered_json::array();
  for (const auto& t : cohort.truth) {
    nlohmann::ordered_json a;
    a["student_id"] = t.student_id;
    a["quiz_id"] = t.quiz_id;
    a["attempt_index"] = t.attempt_index;
    a["reflectiveness"] = t.reflectiveness;
    a["reflection_draw"] = t.reflection_draw;
    a["adjusted"] = t.adjusted;
    a["reread_intensity"] = t.reread_intensity;
    a["time_multiplier"] = t.time_multiplier;
    a["pass_probability"] = t.pass_probability;
    a["passed"] = t.passed;
    attempts.push_back(std::move(a));
  }
  j["attempts"] = std::move(attempts);
  return j;
}

void write_cohort(const Cohort& cohort, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + p.string() + "' for writing");
    return out;
  };
  {
    auto out = open(dir / kEventsFileName);
    write_events_jsonl(out, cohort.events);
  }
  {
    auto out = open(dir / kAttemptsFileName);
    write_attempts_csv(out, cohort.attempts);
  }
  auto out = open(dir / kTruthFileName);
  out << truth_to_json(cohort).dump(1) << '\n';
}

}  // namespace srltrace
