#include "cedu/inference.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <set>

#include "cedu/csv.hpp"
#include "cedu/graph.hpp"
#include "cedu/rng.hpp"

namespace cedu {

void FoldTimeScm::validate() const {
  if (num_constructs < 1) throw ValidationError("scm: num_constructs must be >= 1");
  if (lag < 1) throw ValidationError("scm: lag must be >= 1");
  if (static_cast<int>(weights.size()) != lag + 1)
    throw ValidationError("scm: expected lag + 1 weight slices");
  const int m = num_vars();
  for (const Matrix& w : weights) {
    if (w.rows() != m || w.cols() != m)
      throw ValidationError("scm: weight slice has wrong shape");
    if (!w.allFinite()) throw ValidationError("scm: non-finite weight");
  }
  // The instantaneous block must be acyclic; reuse the temporal-graph
  // structural checks.
  TemporalGraph shaped{lag, num_constructs, weights};
  shaped.validate();
  if (!intercept.allFinite() || intercept.size() != m)
    throw ValidationError("scm: bad intercept");
  if (action_response.rows() != num_constructs || action_response.cols() != m ||
      !action_response.allFinite())
    throw ValidationError("scm: bad action_response");
  if (noise_halfwidth.size() != num_constructs ||
      (noise_halfwidth.array() < 0.0).any())
    throw ValidationError("scm: bad noise_halfwidth");
}

LinearDynamics FoldTimeScm::dynamics() const {
  validate();
  LinearDynamics dyn;
  dyn.num_constructs = num_constructs;
  dyn.lagged.assign(weights.begin() + 1, weights.end());
  dyn.intercept = intercept;
  dyn.action_response = action_response;
  dyn.noise_halfwidth = noise_halfwidth;
  return dyn;
}

FoldTimeScm fit_scm(const SyntheticDataset& dataset, int lag) {
  if (lag < 1) throw ValidationError("fit_scm: lag must be >= 1");
  const VarModel vm = fit_var(dataset, lag);
  const int n = vm.num_constructs;
  const int m = n + 1;

  FoldTimeScm scm;
  scm.lag = lag;
  scm.num_constructs = n;
  scm.weights.assign(static_cast<std::size_t>(lag) + 1, Matrix::Zero(m, m));
  for (int k = 0; k < lag; ++k)
    scm.weights[static_cast<std::size_t>(k + 1)] = vm.lagged[static_cast<std::size_t>(k)];
  scm.intercept = vm.intercept;

  // Within-step action response: mean VAR residual of each construct
  // grouped by the step's action.  Actions never observed keep a zero
  // response.
  scm.action_response = Matrix::Zero(n, m);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(n);
  for (Eigen::Index r = 0; r < vm.residuals.rows(); ++r) {
    const int a = vm.row_actions[static_cast<std::size_t>(r)];
    counts(a) += 1;
    scm.action_response.row(a).tail(n) += vm.residuals.row(r).tail(n);
  }
  for (int a = 0; a < n; ++a)
    if (counts(a) > 0) scm.action_response.row(a) /= static_cast<double>(counts(a));

  // Noise: remove the action response, then match a uniform distribution
  // to the leftover spread (half-width = sqrt(3) * standard deviation).
  Vector sq_sum = Vector::Zero(n);
  for (Eigen::Index r = 0; r < vm.residuals.rows(); ++r) {
    const int a = vm.row_actions[static_cast<std::size_t>(r)];
    const auto centered =
        vm.residuals.row(r).tail(n) - scm.action_response.row(a).tail(n);
    sq_sum += centered.array().square().matrix().transpose();
  }
  const double rows = static_cast<double>(vm.residuals.rows());
  scm.noise_halfwidth = (sq_sum / rows).array().sqrt().matrix() * std::sqrt(3.0);

  scm.validate();
  return scm;
}

McEstimate estimate_cate_stats(const FoldTimeScm& scm, const CateQuery& query,
                               int num_rollouts, std::uint64_t seed,
                               const ActionPolicy& policy) {
  if (query.conditioning.rows() <= scm.lag)
    throw ValidationError("estimate_cate: conditioning length must exceed the lag");
  return rollout_cate(scm.dynamics(), query, num_rollouts, seed, policy);
}

double estimate_cate(const FoldTimeScm& scm, const CateQuery& query,
                     int num_rollouts, std::uint64_t seed,
                     const ActionPolicy& policy) {
  return estimate_cate_stats(scm, query, num_rollouts, seed, policy).mean;
}

void Task4Query::validate() const {
  if (year < 1 || year > 13)
    throw ValidationError("task4 query: year must be a UK year group (1..13)");
}

std::vector<Task4Query> read_task4_queries(std::istream& in) {
  CsvReader reader(in, "construct_experiments_input_test.csv");
  auto pick = [&](const char* a, const char* b) -> std::string {
    if (reader.has_column(a)) return a;
    if (reader.has_column(b)) return b;
    throw ValidationError(std::string("read_task4_queries: missing column ") + a);
  };
  const std::string experiment = pick("Experiment", "ExperimentId");
  const std::string question = pick("QuestionConstructId", "QuestionConstructID");
  const std::string treatment =
      pick("TreatmentConstructId", "TreatmentLessonConstructId");
  const std::string control = pick("ControlConstructId", "ControlLessonConstructId");
  const std::string year = pick("Year", "YearGroup");

  std::vector<Task4Query> queries;
  while (reader.next()) {
    Task4Query q;
    q.experiment_id = reader.field(experiment);
    q.question_construct = reader.field_long(question);
    q.treatment_construct = reader.field_long(treatment);
    q.control_construct = reader.field_long(control);
    q.year = static_cast<int>(reader.field_long(year));
    q.validate();
    if (q.treatment_construct == q.control_construct)
      throw ValidationError(
          "read_task4_queries: treatment and control constructs must differ");
    queries.push_back(std::move(q));
  }
  return queries;
}

namespace {

std::vector<long> year_students(const EventLog& log, int year) {
  std::vector<long> users;
  for (const auto& [user, y] : log.student_year)
    if (y == year && log.student_spans.count(user)) users.push_back(user);
  return users;
}

// Empirical route: difference of mean first-attempt checkout correctness
// on the question construct, between students whose latest preceding
// lesson was the treatment vs the control construct.  Outcomes are
// averaged per student first, then across students.
struct EmpiricalResult {
  bool supported = false;
  double value = 0.0;
};

EmpiricalResult empirical_task4(const EventLog& log, const Task4Query& query,
                                const std::vector<long>& users, int min_students) {
  std::vector<double> treated, control;
  for (long user : users) {
    const auto span = log.student_spans.at(user);
    long last_lesson = -1;
    double sum_t = 0.0, sum_c = 0.0;
    int cnt_t = 0, cnt_c = 0;
    for (std::size_t i = span.first; i < span.second; ++i) {
      const AnswerEvent& e = log.events[i];
      if (e.type == EventType::lesson) {
        last_lesson = e.construct_id;
        continue;
      }
      if (e.type != EventType::checkout) continue;  // first attempts only
      if (e.construct_id != query.question_construct || !e.is_correct) continue;
      if (last_lesson == query.treatment_construct) {
        sum_t += *e.is_correct;
        ++cnt_t;
      } else if (last_lesson == query.control_construct) {
        sum_c += *e.is_correct;
        ++cnt_c;
      }
    }
    if (cnt_t > 0) treated.push_back(sum_t / cnt_t);
    if (cnt_c > 0) control.push_back(sum_c / cnt_c);
  }
  EmpiricalResult result;
  if (static_cast<int>(treated.size()) < min_students ||
      static_cast<int>(control.size()) < min_students)
    return result;
  double mean_t = 0.0, mean_c = 0.0;
  for (double v : treated) mean_t += v;
  for (double v : control) mean_c += v;
  result.supported = true;
  result.value = mean_t / static_cast<double>(treated.size()) -
                 mean_c / static_cast<double>(control.size());
  return result;
}

// SCM route: fit the fold-time model on year-T construct series and
// answer the query per student at effect time 1 (lesson now, checkout at
// the next step), averaging across students.
double scm_task4(const EventLog& log, const Task4Query& query,
                 const std::vector<long>& users, const Task4Options& options) {
  SeriesOptions series_options;
  series_options.window = options.window;
  series_options.students = users;
  const ConstructSeries series = build_construct_series(log, series_options);

  auto column = [&](long construct) {
    auto it = std::find(series.constructs.begin(), series.constructs.end(), construct);
    if (it == series.constructs.end())
      throw ValidationError(
          "NO_SUPPORT: construct " + std::to_string(construct) +
          " does not appear in the year group's training events");
    return static_cast<int>(it - series.constructs.begin());
  };
  const int target = column(query.question_construct);
  const int treat = column(query.treatment_construct);
  const int control = column(query.control_construct);

  FoldTimeScm scm;
  try {
    scm = fit_scm(series.dataset, options.lag);
  } catch (const Error& e) {
    throw ValidationError(std::string("NO_SUPPORT: cannot fit the year group's "
                                      "series: ") + e.what());
  }

  const int n = series.dataset.num_constructs;
  double sum = 0.0;
  int used = 0;
  for (std::size_t s = 0; s < series.dataset.trajectories.size(); ++s) {
    const Trajectory& traj = series.dataset.trajectories[s];
    if (traj.steps() <= options.lag) continue;
    CateQuery q;
    q.conditioning.resize(traj.steps(), n + 1);
    for (int t = 0; t < traj.steps(); ++t) {
      q.conditioning(t, 0) = static_cast<double>(traj.actions[static_cast<std::size_t>(t)]);
      q.conditioning.row(t).tail(n) = traj.probs.row(t);
    }
    q.intervention = treat;
    q.reference = control;
    q.target_construct = target;
    q.effect_time = 1;
    sum += estimate_cate(scm, q, options.num_rollouts,
                         Rng::derive_seed(options.seed, {stream_tag::kStudent,
                                                         static_cast<std::uint64_t>(s)}));
    ++used;
  }
  if (used == 0)
    throw ValidationError("NO_SUPPORT: no year-group trajectory is longer than the lag");
  return sum / used;
}

}  // namespace

double estimate_cate_task4(const EventLog& log, const Task4Query& query,
                           const Task4Options& options) {
  query.validate();
  if (query.treatment_construct == query.control_construct) return 0.0;

  const std::vector<long> users = year_students(log, query.year);
  if (users.empty())
    throw ValidationError("NO_YEAR_DATA: no students with events in year " +
                          std::to_string(query.year));

  if (options.method == Task4Method::kEmpirical || options.method == Task4Method::kAuto) {
    const EmpiricalResult empirical =
        empirical_task4(log, query, users, options.min_students);
    if (empirical.supported) return empirical.value;
    if (options.method == Task4Method::kEmpirical)
      throw ValidationError(
          "NO_SUPPORT: too few students answer checkouts on the question construct "
          "after treatment/control lessons");
  }
  return scm_task4(log, query, users, options);
}

std::vector<AbEvent> read_ab_events(std::istream& in) {
  CsvReader reader(in, "ab_events.csv");
  std::vector<AbEvent> events;
  while (reader.next()) {
    AbEvent e;
    e.experiment_id = reader.field_or("ExperimentId", reader.field_or("Experiment", ""));
    e.user_id = reader.field_long("UserId");
    const std::string& arm = reader.field("Arm");
    if (arm == "1" || arm == "treatment") e.arm = 1;
    else if (arm == "0" || arm == "control") e.arm = 0;
    else throw ValidationError("read_ab_events: unknown Arm value '" + arm + "'");
    e.year = static_cast<int>(reader.field_long("YearGroup"));
    e.construct_id = reader.field_long("ConstructId");
    e.type = parse_event_type(reader.field("Type"));
    e.attempt = static_cast<int>(reader.field_long("Attempt"));
    e.is_correct = static_cast<int>(reader.field_long("IsCorrect"));
    if (e.is_correct != 0 && e.is_correct != 1)
      throw ValidationError("read_ab_events: IsCorrect must be 0 or 1");
    events.push_back(std::move(e));
  }
  return events;
}

double ab_ground_truth(const std::vector<AbEvent>& events, const Task4Query& query,
                       AbOutcome outcome) {
  query.validate();

  struct PerStudent {
    double checkout_sum = 0.0;
    int checkout_count = 0;
    double checkin_sum = 0.0;
    int checkin_count = 0;
    int arm = 0;
  };
  std::map<long, PerStudent> students;
  for (const AbEvent& e : events) {
    if (!query.experiment_id.empty() && e.experiment_id != query.experiment_id) continue;
    if (e.year != query.year) continue;
    if (e.construct_id != query.question_construct) continue;
    if (e.attempt != 1) continue;  // first attempts only
    if (e.type != EventType::checkout && e.type != EventType::checkin) continue;
    PerStudent& s = students[e.user_id];
    s.arm = e.arm;
    if (e.type == EventType::checkout) {
      s.checkout_sum += e.is_correct;
      ++s.checkout_count;
    } else {
      s.checkin_sum += e.is_correct;
      ++s.checkin_count;
    }
  }

  double sum_treat = 0.0, sum_control = 0.0;
  int n_treat = 0, n_control = 0;
  for (const auto& [user, s] : students) {
    double value = 0.0;
    if (outcome == AbOutcome::checkout_accuracy) {
      if (s.checkout_count == 0) continue;
      value = s.checkout_sum / s.checkout_count;
    } else {
      if (s.checkout_count == 0 || s.checkin_count == 0) continue;
      value = s.checkout_sum / s.checkout_count - s.checkin_sum / s.checkin_count;
    }
    if (s.arm == 1) {
      sum_treat += value;
      ++n_treat;
    } else {
      sum_control += value;
      ++n_control;
    }
  }
  if (n_treat == 0 || n_control == 0)
    throw ValidationError("ab_ground_truth: empty arm for experiment '" +
                          query.experiment_id + "'");
  return sum_treat / n_treat - sum_control / n_control;
}

}  // namespace cedu
