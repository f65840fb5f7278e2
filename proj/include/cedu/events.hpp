#pragma once
// Real-world answer-log ingestion, metadata tables and construct-series
// building.
//
// Source rows follow the platform's answer table: one event per question
// attempt or lesson within a quiz session, with "None" (or an empty
// field) marking missing values.  Ingestion normalizes the log into
// per-student event sequences under a canonical total order, so any
// permutation of the input rows produces identical output.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cedu/types.hpp"

namespace cedu {

enum class EventType { checkin, checkin_retry, checkout, checkout_retry, lesson };

EventType parse_event_type(const std::string& name);  // throws ValidationError
const char* event_type_name(EventType type);

inline bool is_retry(EventType t) {
  return t == EventType::checkin_retry || t == EventType::checkout_retry;
}

struct AnswerEvent {
  long quiz_session_id = 0;
  std::optional<long> answer_id;
  long user_id = 0;
  long quiz_id = 0;
  long question_id = 0;
  std::optional<int> is_correct;      // 0/1; absent on Lesson rows
  std::optional<int> answer_value;    // 1..4
  std::optional<int> correct_answer;  // 1..4
  int question_sequence = 0;
  long construct_id = 0;
  EventType type = EventType::lesson;
  std::string timestamp;  // ISO-8601; lexicographic order == time order
};

struct EventLog {
  std::vector<AnswerEvent> events;  // canonically sorted
  // Contiguous [begin, end) span of each student's events.
  std::map<long, std::pair<std::size_t, std::size_t>> student_spans;
  std::map<long, int> student_year;  // filled by attach_student_years
  std::vector<std::string> warnings;

  // Summary statistics for sanity checks against the source-data scale.
  std::size_t num_students() const { return student_spans.size(); }
  std::size_t num_sessions = 0;
  std::size_t num_answers = 0;  // question attempts (non-lesson rows)
  std::size_t num_lessons = 0;
};

// Parses the answer table (columns QuizSessionId, AnswerId, UserId,
// QuizId, QuestionId, IsCorrect, AnswerValue, CorrectAnswer,
// QuestionSequence, ConstructId, Type, Timestamp).  Unknown Type values
// are fatal; non-monotone timestamps within a quiz session only add a
// warning.
EventLog ingest_answer_log(std::istream& in);

// Writes the normalized log back out in canonical order.
void write_answer_log(std::ostream& out, const EventLog& log);

// Supporting metadata tables shipped alongside the answer logs.
struct SubjectRecord {
  long subject_id = 0;
  std::string name;
  std::optional<long> parent_id;
  int level = 0;
};

struct TopicPathwayRecord {
  long quiz_id = 0;
  int quiz_sequence = 0;
  int level = 0;
  int year_group = 0;
  long checkin_question_id = 0;
  long checkout_question_id = 0;
  int question_sequence = 0;
  long construct_id = 0;
  long subject_id = 0;
  std::vector<long> question_subject_ids;
};

struct StudentRecord {
  long user_id = 0;
  std::optional<std::string> gender;
  std::optional<std::string> month_of_birth;
  std::optional<int> year_group;
  std::optional<int> is_pupil_premium;
};

struct MetadataBundle {
  std::vector<SubjectRecord> subjects;
  std::vector<TopicPathwayRecord> topic_pathway;
  std::vector<StudentRecord> students;
  std::vector<std::string> warnings;  // e.g. dangling ParentId references
};

std::vector<SubjectRecord> read_subject_metadata(std::istream& in,
                                                 std::vector<std::string>* warnings = nullptr);
std::vector<TopicPathwayRecord> read_topic_pathway_metadata(std::istream& in);
std::vector<StudentRecord> read_student_metadata(std::istream& in);

// Walks ParentId links up to the root subject ("Maths" in the source
// data).  Throws ValidationError on unknown ids or reference cycles.
long resolve_root_subject(const std::vector<SubjectRecord>& subjects, long subject_id);

// Copies YearGroup per student into the log (students missing from the
// metadata are left unset).
void attach_student_years(EventLog& log, const std::vector<StudentRecord>& students);

// Construct-series building: one trajectory-like row per first-attempt
// event (lesson, checkin or checkout), bot_action = index of the event's
// construct in the tracked list, probabilities = per-construct rolling
// mean of first-attempt correctness over the last `window` answers
// (carried forward between answers; 0.5 before the first answer).
struct SeriesOptions {
  int window = 5;
  // Constructs to track, in this order.  Empty = every construct observed
  // in the log, ascending.  Events on untracked constructs are skipped.
  std::vector<long> constructs;
  // Only include these students (empty = all).
  std::vector<long> students;
};

struct ConstructSeries {
  std::vector<long> constructs;  // column order of the series
  SyntheticDataset dataset;      // student_id = user id
};

ConstructSeries build_construct_series(const EventLog& log,
                                       const SeriesOptions& options = {});

// All construct ids observed in the log, ascending.
std::vector<long> observed_constructs(const EventLog& log);

}  // namespace cedu
