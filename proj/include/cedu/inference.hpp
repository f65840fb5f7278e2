#pragma once
// CATE estimation: a linear fold-time SCM fitted by the discovery VAR,
// answering queries with the shared rollout engine; plus the task-4
// estimators over real event logs (year-group CATE) and their A/B-test
// ground truth.

#include <cstdint>
#include <string>
#include <vector>

#include "cedu/discovery.hpp"
#include "cedu/events.hpp"
#include "cedu/rollout.hpp"
#include "cedu/types.hpp"

namespace cedu {

// Fitted structural model over a lag+1 window ("fold-time": one static
// graph whose edges cannot point backward in time).
struct FoldTimeScm {
  int lag = 0;
  int num_constructs = 0;
  // lag + 1 slices shaped like TemporalGraph weights.  Slice 0 is kept
  // for the instantaneous structure but the fitted model folds every
  // within-step effect into action_response, so fit_scm leaves it zero
  // (trivially acyclic).
  std::vector<Matrix> weights;
  Vector intercept;        // n + 1
  Matrix action_response;  // n x (n+1): mean residual response to each action
  Vector noise_halfwidth;  // n, uniform-noise half-width estimates

  int num_vars() const { return num_constructs + 1; }
  void validate() const;

  // Rollout view of the model (lagged slices + intercept + action
  // response + noise).
  LinearDynamics dynamics() const;
};

// Fits the SCM on trajectories: pooled VAR for the lagged slices and
// intercept, per-action residual means for the within-step action
// response, and sqrt(3) * (residual standard deviation) for the uniform
// noise half-widths.  Errors as fit_var.
FoldTimeScm fit_scm(const SyntheticDataset& dataset, int lag);

// Monte-Carlo CATE under the fitted SCM; same rollout semantics as the
// simulator oracle.  Requires conditioning length > lag.
McEstimate estimate_cate_stats(const FoldTimeScm& scm, const CateQuery& query,
                               int num_rollouts, std::uint64_t seed,
                               const ActionPolicy& policy = uniform_policy());
double estimate_cate(const FoldTimeScm& scm, const CateQuery& query,
                     int num_rollouts, std::uint64_t seed,
                     const ActionPolicy& policy = uniform_policy());

// One row of the task-4 questionnaire.
struct Task4Query {
  std::string experiment_id;
  long question_construct = 0;   // c_t: construct whose accuracy is measured
  long treatment_construct = 0;  // c_I
  long control_construct = 0;    // c_R
  int year = 0;                  // UK year group T

  void validate() const;  // year in 1..13
};

// Reads construct_experiments_input_test.csv.  Accepts both header
// variants used by the source material (TreatmentConstructId /
// TreatmentLessonConstructId, same for control).
std::vector<Task4Query> read_task4_queries(std::istream& in);

enum class Task4Method {
  kAuto,       // empirical when supported, otherwise the fitted SCM
  kEmpirical,  // difference of post-lesson checkout accuracy
  kScm,        // fold-time SCM fitted on year-T construct series
};

struct Task4Options {
  Task4Method method = Task4Method::kAuto;
  int lag = 2;
  int window = 5;
  int num_rollouts = 2000;
  std::uint64_t seed = 0;
  int min_students = 3;  // per-arm support needed by the empirical route
};

// Year-group CATE from observational logs.  Errors carry the tokens
// NO_YEAR_DATA (no year-T students with events) and NO_SUPPORT (the
// queried constructs cannot be estimated from the data); a result of 0 is
// only ever returned as a genuine estimate.
double estimate_cate_task4(const EventLog& log, const Task4Query& query,
                           const Task4Options& options = {});

// A/B-test events: randomized per-student arm assignment.
struct AbEvent {
  std::string experiment_id;
  long user_id = 0;
  int arm = 0;  // 1 = treatment, 0 = control
  int year = 0;
  long construct_id = 0;
  EventType type = EventType::checkout;
  int attempt = 1;  // 1 = first attempt
  int is_correct = 0;
};

// Reads an A/B event table (columns ExperimentId, UserId, Arm, YearGroup,
// ConstructId, Type, Attempt, IsCorrect; Arm accepts 0/1 or
// control/treatment).
std::vector<AbEvent> read_ab_events(std::istream& in);

enum class AbOutcome {
  checkout_accuracy,      // mean first-attempt checkout correctness
  checkin_checkout_gain,  // per-student checkout minus checkin accuracy
};

// Ground-truth CATE from the experiment: per-student outcome means are
// averaged within each arm (students weigh equally regardless of how
// many answers they gave), then differenced treatment - control.
// Throws ValidationError when either arm has no qualifying students.
double ab_ground_truth(const std::vector<AbEvent>& events, const Task4Query& query,
                       AbOutcome outcome = AbOutcome::checkout_accuracy);

}  // namespace cedu
