#include "cedu/events.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "cedu/csv.hpp"

namespace cedu {

EventType parse_event_type(const std::string& name) {
  if (name == "Checkin") return EventType::checkin;
  if (name == "CheckinRetry") return EventType::checkin_retry;
  if (name == "Checkout") return EventType::checkout;
  if (name == "CheckoutRetry") return EventType::checkout_retry;
  if (name == "Lesson") return EventType::lesson;
  throw ValidationError("ingest_answer_log: unknown Type value '" + name + "'");
}

const char* event_type_name(EventType type) {
  switch (type) {
    case EventType::checkin: return "Checkin";
    case EventType::checkin_retry: return "CheckinRetry";
    case EventType::checkout: return "Checkout";
    case EventType::checkout_retry: return "CheckoutRetry";
    case EventType::lesson: return "Lesson";
  }
  return "";
}

namespace {

// Canonical total order over events: every field participates so that any
// permutation of equal multisets of rows sorts identically.
auto event_key(const AnswerEvent& e) {
  return std::tuple(e.user_id, e.timestamp, e.quiz_session_id, e.question_sequence,
                    static_cast<int>(e.type), e.question_id, e.construct_id,
                    e.quiz_id, e.answer_id.value_or(-1), e.is_correct.value_or(-1),
                    e.answer_value.value_or(-1), e.correct_answer.value_or(-1));
}

std::optional<int> optional_int(const CsvReader& reader, const std::string& column) {
  if (reader.missing(column)) return std::nullopt;
  const std::string& v = reader.field(column);
  if (v == "True") return 1;
  if (v == "False") return 0;
  return static_cast<int>(parse_long(v, "ingest_answer_log column " + column));
}

std::optional<long> optional_long(const CsvReader& reader, const std::string& column) {
  if (reader.missing(column)) return std::nullopt;
  return parse_long(reader.field(column),
                    "ingest_answer_log column " + column);
}

}  // namespace

EventLog ingest_answer_log(std::istream& in) {
  CsvReader reader(in, "answer log");
  for (const char* column :
       {"QuizSessionId", "UserId", "QuizId", "QuestionId", "QuestionSequence",
        "ConstructId", "Type", "Timestamp"})
    if (!reader.has_column(column))
      throw ValidationError(std::string("ingest_answer_log: missing column ") + column);

  EventLog log;
  while (reader.next()) {
    AnswerEvent e;
    e.quiz_session_id = reader.field_long("QuizSessionId");
    e.answer_id = optional_long(reader, "AnswerId");
    e.user_id = reader.field_long("UserId");
    e.quiz_id = reader.field_long("QuizId");
    e.question_id = reader.field_long("QuestionId");
    e.is_correct = optional_int(reader, "IsCorrect");
    e.answer_value = optional_int(reader, "AnswerValue");
    e.correct_answer = optional_int(reader, "CorrectAnswer");
    e.question_sequence = static_cast<int>(reader.field_long("QuestionSequence"));
    e.construct_id = reader.field_long("ConstructId");
    e.type = parse_event_type(reader.field("Type"));
    e.timestamp = reader.field("Timestamp");
    if (e.is_correct && *e.is_correct != 0 && *e.is_correct != 1)
      throw ValidationError("ingest_answer_log row " +
                            std::to_string(reader.row_number()) +
                            ": IsCorrect must be 0 or 1");
    if (e.type != EventType::lesson && !e.is_correct)
      throw ValidationError("ingest_answer_log row " +
                            std::to_string(reader.row_number()) +
                            ": question attempt without IsCorrect");
    log.events.push_back(std::move(e));
  }

  std::sort(log.events.begin(), log.events.end(),
            [](const AnswerEvent& a, const AnswerEvent& b) {
              return event_key(a) < event_key(b);
            });

  // Per-student spans, summary counts, and session monotonicity warnings.
  std::set<long> sessions;
  std::map<long, std::string> last_session_time;
  std::set<long> flagged_sessions;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const AnswerEvent& e = log.events[i];
    auto [it, inserted] = log.student_spans.emplace(e.user_id, std::make_pair(i, i + 1));
    if (!inserted) it->second.second = i + 1;
    sessions.insert(e.quiz_session_id);
    if (e.type == EventType::lesson) ++log.num_lessons;
    else ++log.num_answers;
    auto [st, fresh] = last_session_time.emplace(e.quiz_session_id, e.timestamp);
    if (!fresh) {
      if (e.timestamp < st->second && flagged_sessions.insert(e.quiz_session_id).second)
        log.warnings.push_back("non-monotone timestamps in quiz session " +
                               std::to_string(e.quiz_session_id));
      if (st->second < e.timestamp) st->second = e.timestamp;
    }
  }
  log.num_sessions = sessions.size();
  return log;
}

void write_answer_log(std::ostream& out, const EventLog& log) {
  out << "QuizSessionId,AnswerId,UserId,QuizId,QuestionId,IsCorrect,AnswerValue,"
         "CorrectAnswer,QuestionSequence,ConstructId,Type,Timestamp\n";
  auto opt = [](const auto& v) {
    return v ? std::to_string(*v) : std::string("None");
  };
  for (const AnswerEvent& e : log.events) {
    out << e.quiz_session_id << ',' << opt(e.answer_id) << ',' << e.user_id << ','
        << e.quiz_id << ',' << e.question_id << ',' << opt(e.is_correct) << ','
        << opt(e.answer_value) << ',' << opt(e.correct_answer) << ','
        << e.question_sequence << ',' << e.construct_id << ','
        << event_type_name(e.type) << ',' << csv_escape(e.timestamp) << '\n';
  }
  if (!out) throw IoError("write_answer_log: stream failure");
}

std::vector<SubjectRecord> read_subject_metadata(std::istream& in,
                                                 std::vector<std::string>* warnings) {
  CsvReader reader(in, "subject_metadata.csv");
  std::vector<SubjectRecord> subjects;
  while (reader.next()) {
    SubjectRecord s;
    s.subject_id = reader.field_long("SubjectId");
    s.name = reader.field("Name");
    if (!reader.missing("ParentId")) s.parent_id = reader.field_long("ParentId");
    s.level = static_cast<int>(reader.field_long("Level"));
    subjects.push_back(std::move(s));
  }
  if (warnings) {
    std::set<long> ids;
    for (const SubjectRecord& s : subjects) ids.insert(s.subject_id);
    for (const SubjectRecord& s : subjects)
      if (s.parent_id && !ids.count(*s.parent_id))
        warnings->push_back("subject " + std::to_string(s.subject_id) +
                            " has dangling ParentId " + std::to_string(*s.parent_id));
  }
  return subjects;
}

std::vector<TopicPathwayRecord> read_topic_pathway_metadata(std::istream& in) {
  CsvReader reader(in, "topic_pathway_metadata.csv");
  std::vector<TopicPathwayRecord> records;
  while (reader.next()) {
    TopicPathwayRecord r;
    r.quiz_id = reader.field_long("QuizId");
    r.quiz_sequence = static_cast<int>(reader.field_long("QuizSequence"));
    r.level = static_cast<int>(reader.field_long("Level"));
    r.year_group = static_cast<int>(reader.field_long("YearGroup"));
    r.checkin_question_id = reader.field_long("CheckinQuestionId");
    r.checkout_question_id = reader.field_long("CheckoutQuestionId");
    r.question_sequence = static_cast<int>(reader.field_long("QuestionSequence"));
    r.construct_id = reader.field_long("ConstructId");
    r.subject_id = reader.field_long("SubjectId");
    if (!reader.missing("QuestionSubjectIds")) {
      const std::string& list = reader.field("QuestionSubjectIds");
      std::size_t pos = 0;
      while (pos < list.size()) {
        std::size_t comma = list.find(',', pos);
        if (comma == std::string::npos) comma = list.size();
        std::string token = list.substr(pos, comma - pos);
        while (!token.empty() && token.front() == ' ') token.erase(token.begin());
        while (!token.empty() && token.back() == ' ') token.pop_back();
        if (!token.empty())
          r.question_subject_ids.push_back(
              parse_long(token, "topic_pathway_metadata.csv QuestionSubjectIds"));
        pos = comma + 1;
      }
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<StudentRecord> read_student_metadata(std::istream& in) {
  CsvReader reader(in, "student_metadata.csv");
  std::vector<StudentRecord> students;
  while (reader.next()) {
    StudentRecord s;
    s.user_id = reader.field_long("UserId");
    if (!reader.missing("Gender")) s.gender = reader.field("Gender");
    if (!reader.missing("MonthOfBirth")) s.month_of_birth = reader.field("MonthOfBirth");
    if (!reader.missing("YearGroup"))
      s.year_group = static_cast<int>(reader.field_long("YearGroup"));
    if (reader.has_column("IsPupilPremium") && !reader.missing("IsPupilPremium"))
      s.is_pupil_premium = optional_int(reader, "IsPupilPremium");
    students.push_back(std::move(s));
  }
  return students;
}

long resolve_root_subject(const std::vector<SubjectRecord>& subjects, long subject_id) {
  std::map<long, const SubjectRecord*> by_id;
  for (const SubjectRecord& s : subjects) by_id.emplace(s.subject_id, &s);
  std::set<long> seen;
  long current = subject_id;
  for (;;) {
    auto it = by_id.find(current);
    if (it == by_id.end())
      throw ValidationError("resolve_root_subject: unknown subject " +
                            std::to_string(current));
    if (!seen.insert(current).second)
      throw ValidationError("resolve_root_subject: cycle at subject " +
                            std::to_string(current));
    if (!it->second->parent_id) return current;
    current = *it->second->parent_id;
  }
}

void attach_student_years(EventLog& log, const std::vector<StudentRecord>& students) {
  for (const StudentRecord& s : students)
    if (s.year_group && log.student_spans.count(s.user_id))
      log.student_year[s.user_id] = *s.year_group;
}

std::vector<long> observed_constructs(const EventLog& log) {
  std::set<long> ids;
  for (const AnswerEvent& e : log.events) ids.insert(e.construct_id);
  return std::vector<long>(ids.begin(), ids.end());
}

ConstructSeries build_construct_series(const EventLog& log,
                                       const SeriesOptions& options) {
  if (options.window < 1)
    throw ValidationError("build_construct_series: window must be >= 1");
  ConstructSeries series;
  series.constructs =
      options.constructs.empty() ? observed_constructs(log) : options.constructs;
  {
    std::set<long> unique(series.constructs.begin(), series.constructs.end());
    if (unique.size() != series.constructs.size())
      throw ValidationError("build_construct_series: duplicate construct id");
  }
  const int n = static_cast<int>(series.constructs.size());
  if (n < 1) throw ValidationError("build_construct_series: no constructs");
  std::map<long, int> column_of;
  for (int j = 0; j < n; ++j) column_of.emplace(series.constructs[static_cast<std::size_t>(j)], j);

  const std::set<long> wanted_students(options.students.begin(), options.students.end());

  series.dataset.num_constructs = n;
  for (const auto& [user, span] : log.student_spans) {
    if (!wanted_students.empty() && !wanted_students.count(user)) continue;

    std::vector<int> actions;
    std::vector<double> rows;
    // Rolling window of recent first-attempt correctness per construct.
    std::vector<std::deque<int>> window(static_cast<std::size_t>(n));
    std::vector<double> estimate(static_cast<std::size_t>(n), 0.5);

    for (std::size_t i = span.first; i < span.second; ++i) {
      const AnswerEvent& e = log.events[i];
      if (is_retry(e.type)) continue;  // first attempts only
      auto it = column_of.find(e.construct_id);
      if (it == column_of.end()) continue;
      const int col = it->second;
      if (e.type != EventType::lesson && e.is_correct) {
        auto& w = window[static_cast<std::size_t>(col)];
        w.push_back(*e.is_correct);
        if (static_cast<int>(w.size()) > options.window) w.pop_front();
        double sum = 0.0;
        for (int v : w) sum += v;
        estimate[static_cast<std::size_t>(col)] = sum / static_cast<double>(w.size());
      }
      actions.push_back(col);
      rows.insert(rows.end(), estimate.begin(), estimate.end());
    }
    if (actions.empty()) continue;

    Trajectory traj;
    traj.student_id = user;
    traj.actions = std::move(actions);
    const int steps = static_cast<int>(traj.actions.size());
    traj.probs.resize(steps, n);
    for (int t = 0; t < steps; ++t)
      for (int j = 0; j < n; ++j)
        traj.probs(t, j) = rows[static_cast<std::size_t>(t) * n + j];
    series.dataset.trajectories.push_back(std::move(traj));
  }
  series.dataset.validate();
  return series;
}

}  // namespace cedu
