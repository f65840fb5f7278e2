#include "cedu/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cedu/graph.hpp"
#include "cedu/parallel.hpp"

namespace cedu {

namespace {
constexpr double kInitSkillLow = -1.5;
constexpr double kInitSkillHigh = -0.5;
constexpr double kStabilityLimit = 0.95;
constexpr int kMaxGraphAttempts = 200;
}  // namespace

void SimConfig::validate() const {
  if (num_constructs < 2) throw ValidationError("sim config: num_constructs must be >= 2");
  if (num_students < 1) throw ValidationError("sim config: num_students must be >= 1");
  if (lag < 1) throw ValidationError("sim config: lag must be >= 1");
  if (num_steps <= lag) throw ValidationError("sim config: num_steps must exceed lag");
  auto probability = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError(std::string("sim config: ") + what + " must lie in [0, 1]");
  };
  probability(edge_probability, "edge_probability");
  probability(feedback_probability, "feedback_probability");
  if (!(0.0 <= weight_low && weight_low <= weight_high))
    throw ValidationError("sim config: weight range must satisfy 0 <= low <= high");
  if (!(0.0 <= persistence_low && persistence_low <= persistence_high &&
        persistence_high < 1.0))
    throw ValidationError("sim config: persistence range must satisfy 0 <= low <= high < 1");
  if (!(learning_gain > 0.0)) throw ValidationError("sim config: learning_gain must be > 0");
  if (!(noise_scale >= 0.0)) throw ValidationError("sim config: noise_scale must be >= 0");
}

ActionPolicy uniform_policy() {
  return [](Rng& rng, const Vector& state) {
    return rng.uniform_int(static_cast<int>(state.size()) - 1);
  };
}

void LinearDynamics::validate() const {
  const int m = num_vars();
  if (num_constructs < 1) throw ValidationError("dynamics: num_constructs must be >= 1");
  if (lagged.empty()) throw ValidationError("dynamics: needs at least one lag");
  for (const Matrix& w : lagged)
    if (w.rows() != m || w.cols() != m)
      throw ValidationError("dynamics: lag slice has wrong shape");
  if (intercept.size() != m) throw ValidationError("dynamics: intercept has wrong size");
  if (action_response.rows() != num_constructs || action_response.cols() != m)
    throw ValidationError("dynamics: action_response has wrong shape");
  if (noise_halfwidth.size() != num_constructs)
    throw ValidationError("dynamics: noise_halfwidth has wrong size");
  if ((noise_halfwidth.array() < 0.0).any())
    throw ValidationError("dynamics: noise_halfwidth must be >= 0");
}

Vector LinearDynamics::step_state(const std::vector<Vector>& history, int action,
                                  const Vector& noise) const {
  Vector x = intercept;
  for (int k = 0; k < lag(); ++k) x.noalias() += lagged[k].transpose() * history[k];
  x += action_response.row(action).transpose();
  x.tail(num_constructs) += noise;
  x(0) = static_cast<double>(action);
  return x;
}

TemporalGraph generate_graph(const SimConfig& config) {
  config.validate();
  const int n = config.num_constructs;
  const int m = n + 1;
  Rng rng = Rng::stream(config.seed, {stream_tag::kGraph});

  const double feedback_high =
      config.weight_low + 0.4 * (config.weight_high - config.weight_low);

  for (int attempt = 0; attempt < kMaxGraphAttempts; ++attempt) {
    // Hidden topological order shared by every lag slice.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i)
      std::swap(order[i], order[rng.uniform_int(i + 1)]);
    std::vector<int> pos(n);
    for (int r = 0; r < n; ++r) pos[order[r]] = r;

    TemporalGraph graph;
    graph.lag = config.lag;
    graph.num_constructs = n;
    graph.weights.assign(static_cast<std::size_t>(config.lag) + 1, Matrix::Zero(m, m));

    // Lag-1 self edges: skill retention.
    for (int j = 0; j < n; ++j)
      graph.weights[1](j + 1, j + 1) =
          rng.uniform(config.persistence_low, config.persistence_high);

    // Cross edges at lags >= 1: forward in the hidden order with
    // edge_probability, backward (feedback) with feedback_probability at
    // the low end of the weight range.
    for (int tau = 1; tau <= config.lag; ++tau) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          if (i == j) continue;
          if (pos[i] < pos[j]) {
            if (rng.uniform() < config.edge_probability)
              graph.weights[tau](i + 1, j + 1) =
                  rng.uniform(config.weight_low, config.weight_high);
          } else {
            if (rng.uniform() < config.feedback_probability)
              graph.weights[tau](i + 1, j + 1) =
                  rng.uniform(config.weight_low, feedback_high);
          }
        }
      }
    }

    // Lag-0 construct edges: forward only, so the slice is a DAG and the
    // bot channel keeps zero in-degree.
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (i == j || pos[i] >= pos[j]) continue;
        if (rng.uniform() < config.edge_probability)
          graph.weights[0](i + 1, j + 1) =
              rng.uniform(config.weight_low, config.weight_high);
      }
    }

    // Stability of the lagged recursion: spectral radius of the companion
    // matrix over the construct block.
    const int dim = n * config.lag;
    Matrix companion = Matrix::Zero(dim, dim);
    for (int tau = 1; tau <= config.lag; ++tau)
      companion.block(0, (tau - 1) * n, n, n) =
          graph.weights[tau].bottomRightCorner(n, n).transpose();
    for (int k = 0; k + 1 < config.lag; ++k)
      companion.block((k + 1) * n, k * n, n, n).setIdentity();
    const double radius =
        companion.eigenvalues().array().abs().maxCoeff();
    if (radius < kStabilityLimit) {
      graph.validate();
      return graph;
    }
  }
  throw NumericError("generate_graph: no stable graph found after " +
                     std::to_string(kMaxGraphAttempts) + " attempts");
}

SimState initial_state(const SimConfig& config, Rng& rng) {
  const int n = config.num_constructs;
  Vector x = Vector::Zero(n + 1);
  for (int j = 0; j < n; ++j) x(j + 1) = rng.uniform(kInitSkillLow, kInitSkillHigh);
  SimState state;
  state.history.assign(static_cast<std::size_t>(config.lag), x);
  return state;
}

Vector draw_step_noise(const SimConfig& config, Rng& rng) {
  Vector noise(config.num_constructs);
  for (int j = 0; j < config.num_constructs; ++j)
    noise(j) = rng.uniform(-config.noise_scale, config.noise_scale);
  return noise;
}

SimState step(const SimState& state, int action, const TemporalGraph& graph,
              const SimConfig& config, const Vector& noise) {
  const int n = graph.num_constructs;
  if (action < 0 || action >= n) throw ValidationError("step: action out of range");
  if (static_cast<int>(state.history.size()) < graph.lag)
    throw ValidationError("step: state history shorter than the graph lag");
  if (noise.size() != n) throw ValidationError("step: noise has wrong size");

  Vector x = Vector::Zero(n + 1);
  for (int tau = 1; tau <= graph.lag; ++tau)
    x.noalias() += graph.weights[tau].transpose() * state.history[tau - 1];
  // The taught construct acts within the step: its direct boost plus its
  // instantaneous spillover onto lag-0 children.
  x.tail(n) += config.learning_gain *
               (Vector::Unit(n, action) + graph.weights[0].row(action + 1).tail(n).transpose());
  x.tail(n) += noise;
  x(0) = static_cast<double>(action);

  SimState next;
  next.history.reserve(state.history.size());
  next.history.push_back(std::move(x));
  for (std::size_t k = 0; k + 1 < state.history.size(); ++k)
    next.history.push_back(state.history[k]);
  return next;
}

SyntheticDataset simulate_dataset(const SimConfig& config, const TemporalGraph& graph,
                                  const ActionPolicy& policy, int jobs) {
  config.validate();
  graph.validate();
  if (graph.num_constructs != config.num_constructs)
    throw ValidationError("simulate_dataset: graph/config construct count mismatch");
  if (graph.lag != config.lag)
    throw ValidationError("simulate_dataset: graph/config lag mismatch");

  const int n = config.num_constructs;
  SyntheticDataset dataset;
  dataset.num_constructs = n;
  dataset.trajectories.resize(static_cast<std::size_t>(config.num_students));

  parallel_for(config.num_students, jobs, [&](std::int64_t u) {
    Rng rng = Rng::stream(config.seed, {stream_tag::kStudent,
                                        static_cast<std::uint64_t>(u)});
    SimState state = initial_state(config, rng);
    Trajectory traj;
    traj.student_id = static_cast<long>(u);
    traj.actions.resize(static_cast<std::size_t>(config.num_steps));
    traj.probs.resize(config.num_steps, n);
    for (int t = 0; t < config.num_steps; ++t) {
      const int action = policy(rng, state.history.front());
      const Vector noise = draw_step_noise(config, rng);
      state = step(state, action, graph, config, noise);
      traj.actions[static_cast<std::size_t>(t)] = action;
      traj.probs.row(t) = logistic(state.latent())
                              .min(1.0 - kProbClamp)
                              .max(kProbClamp)
                              .matrix()
                              .transpose();
    }
    dataset.trajectories[static_cast<std::size_t>(u)] = std::move(traj);
  });
  return dataset;
}

std::vector<CateQuery> generate_queries(const TemporalGraph& graph,
                                        const SyntheticDataset& dataset,
                                        const SimConfig& config, int count,
                                        std::uint64_t seed) {
  graph.validate();
  dataset.validate();
  if (count < 0) throw ValidationError("generate_queries: count must be >= 0");
  if (dataset.trajectories.empty())
    throw ValidationError("generate_queries: dataset has no trajectories");

  const int n = dataset.num_constructs;
  const AggregatedGraph influence = aggregate(graph, 0.0);

  std::vector<CateQuery> queries;
  queries.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Rng rng = Rng::stream(seed, {stream_tag::kQuery, static_cast<std::uint64_t>(k)});
    const Trajectory& traj =
        dataset.trajectories[static_cast<std::size_t>(
            rng.uniform_int(static_cast<int>(dataset.trajectories.size())))];
    const int max_rows = traj.steps();
    const int min_rows = config.lag + 1;
    if (max_rows < min_rows)
      throw ValidationError("generate_queries: trajectory shorter than lag + 1");
    const int rows = min_rows + rng.uniform_int(max_rows - min_rows + 1);

    CateQuery q;
    q.conditioning.resize(rows, n + 1);
    for (int t = 0; t < rows; ++t) {
      q.conditioning(t, 0) = static_cast<double>(traj.actions[static_cast<std::size_t>(t)]);
      q.conditioning.row(t).tail(n) = traj.probs.row(t);
    }
    q.target_construct = rng.uniform_int(n);
    // Bias the intervention towards constructs that actually influence
    // the target so that most queries have a nonzero answer.
    if (rng.uniform() < 0.5) {
      q.intervention = q.target_construct;
    } else {
      std::vector<int> parents;
      for (int i = 0; i < n; ++i)
        if (i != q.target_construct && influence.adj(i, q.target_construct) != 0)
          parents.push_back(i);
      q.intervention = parents.empty()
                           ? rng.uniform_int(n)
                           : parents[static_cast<std::size_t>(
                                 rng.uniform_int(static_cast<int>(parents.size())))];
    }
    int r = rng.uniform_int(n - 1);
    if (r >= q.intervention) ++r;
    q.reference = r;
    q.effect_time = 2;
    q.validate();
    queries.push_back(std::move(q));
  }
  return queries;
}

LinearDynamics dynamics_from_graph(const TemporalGraph& graph, double learning_gain,
                                   double noise_scale) {
  graph.validate();
  if (!(learning_gain > 0.0))
    throw ValidationError("dynamics_from_graph: learning_gain must be > 0");
  if (!(noise_scale >= 0.0))
    throw ValidationError("dynamics_from_graph: noise_scale must be >= 0");
  const int n = graph.num_constructs;
  LinearDynamics dyn;
  dyn.num_constructs = n;
  dyn.lagged.assign(graph.weights.begin() + 1, graph.weights.end());
  dyn.intercept = Vector::Zero(n + 1);
  dyn.action_response = Matrix::Zero(n, n + 1);
  for (int a = 0; a < n; ++a) {
    dyn.action_response(a, a + 1) = learning_gain;
    dyn.action_response.row(a).tail(n) +=
        learning_gain * graph.weights[0].row(a + 1).tail(n);
  }
  dyn.noise_halfwidth = Vector::Constant(n, noise_scale);
  dyn.validate();
  return dyn;
}

McEstimate rollout_cate(const LinearDynamics& dynamics, const CateQuery& query,
                        int num_rollouts, std::uint64_t seed,
                        const ActionPolicy& policy) {
  dynamics.validate();
  query.validate();
  const int n = dynamics.num_constructs;
  if (query.num_constructs() != n)
    throw ValidationError("rollout_cate: query/system construct count mismatch");
  const int lag = dynamics.lag();
  const int rows = static_cast<int>(query.conditioning.rows());
  if (rows < lag)
    throw ValidationError("rollout_cate: conditioning shorter than the model lag");
  if (num_rollouts < 1)
    throw ValidationError("rollout_cate: num_rollouts must be >= 1");

  // Seed the state history from the last `lag` conditioning rows,
  // mapping observed probabilities back to the latent scale.
  std::vector<Vector> base_history(static_cast<std::size_t>(lag));
  for (int k = 0; k < lag; ++k) {
    const int t = rows - 1 - k;
    Vector x(n + 1);
    x(0) = query.conditioning(t, 0);
    for (int j = 0; j < n; ++j) {
      const double p = query.conditioning(t, j + 1);
      if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("rollout_cate: conditioning probability outside [0, 1]");
      x(j + 1) = logit_clamped(p);
    }
    base_history[static_cast<std::size_t>(k)] = std::move(x);
  }

  const int horizon = query.effect_time + 1;  // the intervention step plus follow-up
  double sum = 0.0, sum_sq = 0.0;
  std::vector<Vector> history(static_cast<std::size_t>(lag));
  Matrix noise(horizon, n);

  for (int r = 0; r < num_rollouts; ++r) {
    Rng noise_rng = Rng::stream(seed, {stream_tag::kRollout, static_cast<std::uint64_t>(r)});
    for (int t = 0; t < horizon; ++t)
      for (int j = 0; j < n; ++j)
        noise(t, j) = noise_rng.uniform(-dynamics.noise_halfwidth(j),
                                        dynamics.noise_halfwidth(j));
    const Rng policy_rng_base = Rng::stream(
        seed, {stream_tag::kRollout, static_cast<std::uint64_t>(r), stream_tag::kPolicy});

    // Both arms replay the same noise and the same policy stream, so the
    // only difference between them is the intervened action.
    auto run_arm = [&](int first_action) {
      history = base_history;
      Rng policy_rng = policy_rng_base;
      for (int t = 0; t < horizon; ++t) {
        const int action =
            t == 0 ? first_action : policy(policy_rng, history.front());
        Vector x = dynamics.step_state(history, action, noise.row(t).transpose());
        for (std::size_t k = history.size() - 1; k > 0; --k)
          history[k] = std::move(history[k - 1]);
        history[0] = std::move(x);
      }
      return logistic(history.front()(query.target_construct + 1));
    };

    const double effect = run_arm(query.intervention) - run_arm(query.reference);
    sum += effect;
    sum_sq += effect * effect;
  }

  McEstimate est;
  est.mean = sum / num_rollouts;
  if (num_rollouts > 1) {
    const double var =
        std::max(0.0, (sum_sq - sum * sum / num_rollouts) / (num_rollouts - 1));
    est.std_error = std::sqrt(var / num_rollouts);
  }
  return est;
}

McEstimate cate_oracle_stats(const TemporalGraph& graph, const SimConfig& config,
                             const CateQuery& query, int num_rollouts,
                             std::uint64_t seed, const ActionPolicy& policy) {
  const LinearDynamics dyn =
      dynamics_from_graph(graph, config.learning_gain, config.noise_scale);
  return rollout_cate(dyn, query, num_rollouts, seed, policy);
}

double cate_oracle(const TemporalGraph& graph, const SimConfig& config,
                   const CateQuery& query, int num_rollouts, std::uint64_t seed,
                   const ActionPolicy& policy) {
  return cate_oracle_stats(graph, config, query, num_rollouts, seed, policy).mean;
}

}  // namespace cedu
