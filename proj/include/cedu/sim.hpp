#pragma once
// Ground-truth simulator: lagged structural causal model of a student
// practising constructs with a teaching bot.
//
// Each student carries a latent skill vector s_t (one entry per
// construct).  At step t the bot teaches construct a_t; the skill update
// is
//
//   s_t[j] = sum_{tau=1..lag} sum_i W_tau(i+1, j+1) * s_{t-tau}[i]
//          + gain * (1[a_t = j] + W_0(a_t+1, j+1))
//          + eps_j,     eps_j ~ Uniform[-noise_scale, +noise_scale]
//
// and the observation emitted for the step is p_t = logistic(s_t),
// clamped into (0, 1).  The taught construct acts within the step, so row
// t of a trajectory already reflects a_t.  Noise is uniform (not
// Gaussian), which is what makes the instantaneous structure
// identifiable for the discovery module.

#include <cstdint>
#include <vector>

#include "cedu/rng.hpp"
#include "cedu/rollout.hpp"
#include "cedu/types.hpp"

namespace cedu {

struct SimConfig {
  int num_constructs = 50;
  int num_students = 100;
  int num_steps = 400;
  int lag = 2;

  // Graph topology: probability of a forward cross edge per ordered pair
  // and per lag, and of a rare backward ("feedback") edge at lags >= 1.
  double edge_probability = 0.025;
  double feedback_probability = 0.002;
  double weight_low = 0.1;    // cross-edge magnitude range
  double weight_high = 0.3;
  double persistence_low = 0.55;  // lag-1 self-edge (skill retention) range
  double persistence_high = 0.8;

  double learning_gain = 0.6;  // immediate boost from being taught
  double noise_scale = 0.1;    // half-width of the uniform step noise
  std::uint64_t seed = 0;

  void validate() const;
};

// Simulator state: newest-first history of the extended state vectors
// (n + 1 entries each; slot 0 = the action value of that step, slots
// 1..n = latent skills).  history.size() == lag.
struct SimState {
  std::vector<Vector> history;

  // Latent skill vector at the newest step.
  Vector latent() const { return history.front().tail(history.front().size() - 1); }
  // Success probabilities at the newest step (unclamped logistic).
  Vector probs() const { return logistic(latent()).matrix(); }
};

// Samples a random stable temporal graph.
//
// All cross edges point forward along one hidden topological order shared
// by every lag, which keeps the linear system stable by construction;
// feedback edges (backward in that order, drawn with
// feedback_probability at lags >= 1, at the low end of the weight range)
// add rare cycles.  Candidates whose companion-matrix spectral radius is
// >= 0.95 are redrawn; after 200 failed attempts a NumericError is
// thrown.  Lag-0 construct edges form a DAG by construction and the bot
// channel has no incoming edges, so the result always satisfies
// TemporalGraph::validate().
TemporalGraph generate_graph(const SimConfig& config);

// Initial state: every construct starts with the same latent skill drawn
// per student from Uniform[-1.5, -0.5]; the action slot starts at 0.
SimState initial_state(const SimConfig& config, Rng& rng);

// Draws the per-step noise vector (n uniforms in [-scale, +scale]).
Vector draw_step_noise(const SimConfig& config, Rng& rng);

// One simulator step with an externally supplied noise vector.
SimState step(const SimState& state, int action, const TemporalGraph& graph,
              const SimConfig& config, const Vector& noise);

// Simulates num_students trajectories of num_steps rows each.  Students
// are independent: student u draws from stream (seed, kStudent, u), so
// the output is identical for any job count.
SyntheticDataset simulate_dataset(const SimConfig& config, const TemporalGraph& graph,
                                  const ActionPolicy& policy = uniform_policy(),
                                  int jobs = 1);

// Samples CATE queries against a simulated dataset: a random student
// prefix as conditioning, a random target, an intervention biased towards
// constructs that actually influence the target, and effect time 2.
std::vector<CateQuery> generate_queries(const TemporalGraph& graph,
                                        const SyntheticDataset& dataset,
                                        const SimConfig& config, int count,
                                        std::uint64_t seed);

// Views a ground-truth graph as rollout dynamics (zero intercepts, the
// action response implied by gain and the lag-0 slice, uniform noise of
// half-width noise_scale).
LinearDynamics dynamics_from_graph(const TemporalGraph& graph, double learning_gain,
                                   double noise_scale);

// Ground-truth Monte-Carlo answer to a query, with its standard error.
McEstimate cate_oracle_stats(const TemporalGraph& graph, const SimConfig& config,
                             const CateQuery& query, int num_rollouts,
                             std::uint64_t seed,
                             const ActionPolicy& policy = uniform_policy());

double cate_oracle(const TemporalGraph& graph, const SimConfig& config,
                   const CateQuery& query, int num_rollouts, std::uint64_t seed,
                   const ActionPolicy& policy = uniform_policy());

// Probability clamp applied when emitting observations.
inline constexpr double kProbClamp = 1e-9;

}  // namespace cedu
