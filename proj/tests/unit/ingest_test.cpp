#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "srltrace/errors.hpp"
#include "srltrace/ingest.hpp"

using namespace srltrace;
using fixtures::attempt;
using fixtures::scroll;

namespace {

std::vector<ScrollEvent> events_from(const std::string& text) {
  std::istringstream in(text);
  return parse_events(in);
}

std::vector<QuizAttempt> attempts_from(const std::string& text) {
  std::istringstream in(text);
  return parse_attempts(in);
}

const std::string kHeader = std::string(kAttemptsCsvHeader) + "\n";

}  // namespace

TEST(ParseEvents, MapsFieldsDirectly) {
  const auto evs = events_from(
      R"({"student_id":"s1","object_id":"p1","ts_ms":1000,"scroll_y":0,"event":"scroll"})" "\n");
  ASSERT_EQ(evs.size(), 1u);
  EXPECT_EQ(evs[0].student_id, "s1");
  EXPECT_EQ(evs[0].object_id, "p1");
  EXPECT_EQ(evs[0].ts_ms, 1000);
  EXPECT_EQ(evs[0].scroll_y, 0.0);
  EXPECT_FALSE(evs[0].page_height.has_value());
  EXPECT_EQ(evs[0].kind, EventKind::kScroll);
}

TEST(ParseEvents, EmptyStream) { EXPECT_TRUE(events_from("").empty()); }

TEST(ParseEvents, OptionalFieldsAndDefaults) {
  const auto evs = events_from(
      R"({"student_id":"s1","object_id":"p1","ts_ms":5,"scroll_y":10.5,"page_height":2000,"event":"pageload","extra":1})"
      "\n\n"
      R"({"student_id":"s1","object_id":"p1","ts_ms":6,"scroll_y":11})" "\n");
  ASSERT_EQ(evs.size(), 2u);
  EXPECT_EQ(evs[0].kind, EventKind::kPageload);
  EXPECT_EQ(evs[0].page_height, 2000.0);
  EXPECT_EQ(evs[1].kind, EventKind::kScroll);
}

TEST(ParseEvents, NegativeTimestampReportsLine) {
  try {
    events_from(R"({"student_id":"s1","object_id":"p1","ts_ms":1,"scroll_y":0})" "\n"
                R"({"student_id":"s1","object_id":"p1","ts_ms":-5,"scroll_y":0})" "\n");
    FAIL() << "expected MalformedEvent";
  } catch (const MalformedEvent& e) {
    EXPECT_EQ(e.line_number(), 2u);
  }
}

TEST(ParseEvents, RejectsBadLines) {
  const char* bad[] = {
      "not json",
      R"([1,2])",
      R"({"object_id":"p1","ts_ms":1,"scroll_y":0})",
      R"({"student_id":"s1","object_id":"p1","ts_ms":1.5,"scroll_y":0})",
      R"({"student_id":"s1","object_id":"p1","ts_ms":"1","scroll_y":0})",
      R"({"student_id":"s1","object_id":"p1","ts_ms":1,"scroll_y":-1})",
      R"({"student_id":"s1","object_id":"p1","ts_ms":1,"scroll_y":10,"page_height":5})",
      R"({"student_id":"s1","object_id":"p1","ts_ms":1,"scroll_y":0,"event":"click"})",
      R"({"student_id":1,"object_id":"p1","ts_ms":1,"scroll_y":0})",
  };
  for (const char* line : bad) {
    EXPECT_THROW(events_from(std::string(line) + "\n"), MalformedEvent) << line;
  }
}

TEST(ParseAttempts, MapsRow) {
  const auto as = attempts_from(kHeader + "s1,q1,1,0,600000,70,100\n");
  ASSERT_EQ(as.size(), 1u);
  EXPECT_EQ(as[0].score, 70.0);
  EXPECT_EQ(as[0].max_score, 100.0);
  EXPECT_DOUBLE_EQ(as[0].duration_minutes(), 10.0);
}

TEST(ParseAttempts, HeaderOnly) { EXPECT_TRUE(attempts_from(kHeader).empty()); }

TEST(ParseAttempts, EndBeforeStart) {
  try {
    attempts_from(kHeader + "s1,q1,1,600000,0,70,100\n");
    FAIL();
  } catch (const MalformedAttempt& e) {
    EXPECT_EQ(e.line_number(), 2u);
  }
}

TEST(ParseAttempts, RejectsBadRows) {
  const char* bad[] = {"s1,q1,1,0,10,70", "s1,q1,0,0,10,70,100", "s1,q1,1,0,10,170,100",
                       "s1,q1,1,0,10,70,0",  ",q1,1,0,10,70,100",  "s1,q1,1,x,10,70,100",
                       "s1,q1,1,0,10,-1,100"};
  for (const char* row : bad) {
    EXPECT_THROW(attempts_from(kHeader + row + "\n"), MalformedAttempt) << row;
  }
  EXPECT_THROW(attempts_from("student,quiz\n"), MalformedAttempt);
  EXPECT_THROW(attempts_from(""), MalformedAttempt);
}

TEST(ParseAttempts, AcceptsCrlf) {
  const auto as = attempts_from(std::string(kAttemptsCsvHeader) + "\r\ns1,q1,1,0,60000,1,2\r\n");
  ASSERT_EQ(as.size(), 1u);
  EXPECT_EQ(as[0].max_score, 2.0);
}

TEST(BuildStore, SortsEventsPerStudent) {
  const auto store = build_store({scroll("s1", "p", 30, 0), scroll("s2", "p", 5, 0),
                                  scroll("s1", "p", 10, 0)},
                                 {});
  const auto s1 = store.events_for("s1");
  ASSERT_EQ(s1.size(), 2u);
  EXPECT_EQ(s1[0].ts_ms, 10);
  EXPECT_EQ(s1[1].ts_ms, 30);
  EXPECT_EQ(store.events_for("s2").size(), 1u);
  EXPECT_TRUE(store.events_for("nobody").empty());
  EXPECT_EQ(store.course_start_ts_ms(), 5);
}

TEST(BuildStore, GapInAttemptIndices) {
  EXPECT_THROW(build_store({}, {attempt("s1", "q1", 1, 0, 10, 1), attempt("s1", "q1", 3, 20, 30, 1)}),
               InconsistentAttempts);
}

TEST(BuildStore, DuplicateAttemptIndex) {
  EXPECT_THROW(build_store({}, {attempt("s1", "q1", 1, 0, 10, 1), attempt("s1", "q1", 1, 20, 30, 1)}),
               InconsistentAttempts);
}

TEST(BuildStore, StartTimesMustIncreaseWithIndex) {
  EXPECT_THROW(build_store({}, {attempt("s1", "q1", 1, 50, 60, 1), attempt("s1", "q1", 2, 20, 30, 1)}),
               InconsistentAttempts);
}

TEST(BuildStore, StudentWithoutEvents) {
  const auto store = build_store({scroll("s2", "p", 100, 0)}, {attempt("s1", "q1", 1, 50, 60, 1)});
  EXPECT_TRUE(store.events_for("s1").empty());
  ASSERT_EQ(store.attempts_for("s1", "q1").size(), 1u);
  EXPECT_EQ(store.students(), (std::vector<std::string>{"s1", "s2"}));
  EXPECT_EQ(store.course_start_ts_ms(), 50);
}

TEST(BuildStore, EmptyStoreStartsAtZero) { EXPECT_EQ(build_store({}, {}).course_start_ts_ms(), 0); }

TEST(BuildStore, AttemptsSortedByKeyAndIndex) {
  const auto store = build_store({}, {attempt("s2", "q1", 1, 0, 1, 1), attempt("s1", "q2", 2, 30, 40, 1),
                                      attempt("s1", "q2", 1, 10, 20, 1), attempt("s1", "q1", 1, 5, 6, 1)});
  const auto& all = store.attempts();
  ASSERT_EQ(all.size(), 4u);
  EXPECT_EQ(all[0].quiz_id, "q1");
  EXPECT_EQ(all[1].attempt_index, 1);
  EXPECT_EQ(all[2].attempt_index, 2);
  EXPECT_EQ(all[3].student_id, "s2");
}

class StoreRoundTrip : public ::testing::TestWithParam<int> {};

TEST_P(StoreRoundTrip, SerializeAndReparse) {
  Rng rng(static_cast<std::uint64_t>(GetParam()));
  const TraceStore store = fixtures::random_store(rng);

  std::ostringstream ev_out, at_out;
  write_events_jsonl(ev_out, store.events());
  write_attempts_csv(at_out, store.attempts());
  std::istringstream ev_in(ev_out.str()), at_in(at_out.str());
  const TraceStore again = build_store(parse_events(ev_in), parse_attempts(at_in));
  EXPECT_EQ(again, store);

  fixtures::TempDir dir;
  save_store(store, dir.path());
  EXPECT_EQ(load_store(dir.path()), store);
}

TEST_P(StoreRoundTrip, DeterministicUnderInputPermutation) {
  Rng rng(static_cast<std::uint64_t>(GetParam()) + 1000);
  const TraceStore store = fixtures::random_store(rng);
  auto events = store.events();
  auto attempts = store.attempts();
  rng.shuffle(std::span<ScrollEvent>(events));
  rng.shuffle(std::span<QuizAttempt>(attempts));
  const TraceStore shuffled = build_store(events, attempts);

  fixtures::TempDir a, b;
  save_store(store, a.path());
  save_store(shuffled, b.path());
  for (const char* name : {kEventsFileName, kAttemptsFileName, kManifestFileName}) {
    EXPECT_EQ(fixtures::read_file(a / name), fixtures::read_file(b / name)) << name;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, StoreRoundTrip, ::testing::Range(0, 25));

TEST(StoreFiles, RoundTripsNonIntegralValues) {
  ScrollEvent ev = scroll("s1", "p1", 10, 123.456789012345);
  ev.page_height = 1e4 / 3.0;
  const auto store = build_store({ev}, {attempt("s1", "q1", 1, 20, 80, 2.0 / 3.0, 1.0)});
  fixtures::TempDir dir;
  save_store(store, dir.path());
  EXPECT_EQ(load_store(dir.path()), store);
}

TEST(StoreFiles, ManifestMismatchIsRejected) {
  const auto store = build_store({scroll("s1", "p1", 10, 0)}, {attempt("s1", "q1", 1, 20, 80, 1)});
  fixtures::TempDir dir;
  save_store(store, dir.path());
  fixtures::write_file(dir / kManifestFileName,
                       R"({"course_start_ts_ms":0,"counts":{"events":1,"attempts":1,"students":1}})");
  EXPECT_THROW(load_store(dir.path()), DataError);
}

TEST(StoreFiles, ManifestIsOptional) {
  const auto store = build_store({scroll("s1", "p1", 10, 0)}, {attempt("s1", "q1", 1, 20, 80, 1)});
  fixtures::TempDir dir;
  save_store(store, dir.path());
  std::filesystem::remove(dir / kManifestFileName);
  EXPECT_EQ(load_store(dir.path()), store);
}

TEST(StoreFiles, ErrorsNameTheFile) {
  fixtures::TempDir dir;
  fixtures::write_file(dir / kEventsFileName,
                       "{\"student_id\":\"s1\",\"object_id\":\"p\",\"ts_ms\":1,\"scroll_y\":0}\n{oops\n");
  fixtures::write_file(dir / kAttemptsFileName, kHeader);
  try {
    load_store(dir.path());
    FAIL();
  } catch (const MalformedEvent& e) {
    EXPECT_EQ(e.line_number(), 2u);
    EXPECT_NE(std::string(e.what()).find(kEventsFileName), std::string::npos);
  }
}

TEST(StoreFiles, MissingDirectory) {
  EXPECT_THROW(load_store("/nonexistent/srltrace/store"), DataError);
}
