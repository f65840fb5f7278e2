#pragma once
// Shared linear-dynamics rollout engine.
//
// Both the ground-truth simulator and the fitted fold-time SCM answer
// counterfactual queries by rolling the same kind of system forward:
//
//   x_t[0]     = value of the action taken at step t
//   x_t[j+1]   = intercept[j+1]
//              + sum_{k=1..lag} (lagged[k-1]^T x_{t-k})[j+1]
//              + action_response(a_t, j+1)
//              + noise[j]                       (constructs j = 0..n-1)
//
// where x is the latent state over the n + 1 variables of types.hpp.
// Treatment effects are estimated with paired rollouts: both arms of a
// query consume identical noise draws and identical future policy
// decisions, so the difference estimator is exact for identical arms and
// exactly antisymmetric under swapping them.

#include <functional>
#include <vector>

#include "cedu/rng.hpp"
#include "cedu/types.hpp"

namespace cedu {

struct SimState;  // defined in sim.hpp

// Chooses the next action given the rollout RNG and the newest state
// vector (n + 1 entries, slot 0 = previous action value).
using ActionPolicy = std::function<int(Rng&, const Vector& state)>;

// Policy that teaches a uniformly random construct each step.
ActionPolicy uniform_policy();

struct LinearDynamics {
  int num_constructs = 0;
  std::vector<Matrix> lagged;  // lag slices; lagged[k](i, j): var i at t-1-k -> var j at t
  Vector intercept;            // n + 1 entries; slot 0 is unused
  Matrix action_response;      // n x (n+1); row a = additive response to teaching a
  Vector noise_halfwidth;      // n entries, uniform noise half-width per construct

  int lag() const { return static_cast<int>(lagged.size()); }
  int num_vars() const { return num_constructs + 1; }
  void validate() const;

  // Advances one step.  history is newest-first (history[k] = x_{t-1-k})
  // and must hold at least lag() states; noise has n entries.
  Vector step_state(const std::vector<Vector>& history, int action,
                    const Vector& noise) const;
};

// Monte-Carlo CATE estimate for `query` under `dynamics`.
//
// The conditioning prefix must have at least lag() rows; its last rows
// seed the state history (probabilities are mapped to the latent scale via
// the clamped logit).  Rollout r draws its noise and policy stream from
// (seed, r), independent of every other rollout.
McEstimate rollout_cate(const LinearDynamics& dynamics, const CateQuery& query,
                        int num_rollouts, std::uint64_t seed,
                        const ActionPolicy& policy = uniform_policy());

}  // namespace cedu
