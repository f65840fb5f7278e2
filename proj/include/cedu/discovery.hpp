#pragma once
// Temporal causal discovery: pooled lagged regression for the lag >= 1
// structure plus a within-step stage for the instantaneous structure.
//
// The lagged slices come from an ordinary least-squares vector
// autoregression fitted on the latent scale (observed probabilities are
// mapped through the clamped logit; the bot action column enters as a raw
// numeric value).  The instantaneous slice cannot be read off the same
// regression because within-step construct influence only flows from the
// construct being taught, so it is recovered from how the VAR residuals
// of each construct respond to each action (an action-contrast estimate
// of the lag-0 spillover).  When the data carries no usable action signal
// the module falls back to a classic DirectLiNGaM ordering of the
// residuals with triangular regression.

#include <vector>

#include "cedu/types.hpp"

namespace cedu {

struct VarOptions {
  // Map construct columns through logit before regressing.  Disable to
  // regress on the raw observed scale.
  bool logit_transform = true;
  double clamp = 1e-9;  // clamp distance for the logit
};

// Fitted vector autoregression over the n + 1 variables.
struct VarModel {
  int lag = 0;
  int num_constructs = 0;
  std::vector<Matrix> lagged;    // lag slices; lagged[k](i, j): var i at t-1-k -> var j
  Vector intercept;              // n + 1
  Matrix residuals;              // pooled rows x (n + 1)
  std::vector<int> row_actions;  // action taken at each residual row's step

  int num_vars() const { return num_constructs + 1; }
};

// Fits the pooled VAR by least squares.  Throws NumericError when the
// design matrix is rank deficient (constant columns, collinear lags).
// lag == 0 degenerates to column centering: residuals are the centered
// data and there are no lagged slices.
VarModel fit_var(const SyntheticDataset& dataset, int lag,
                 const VarOptions& options = {});

// Classic DirectLiNGaM causal ordering of the columns of `data` (kurtotic
// non-Gaussian noise assumed).  Deterministic: entropy comparisons break
// ties towards the lowest column index.  Rows beyond max_rows are
// subsampled with a fixed stride.
std::vector<int> direct_lingam_order(const Matrix& data, int max_rows = 2000);

struct DiscoveryOptions {
  double threshold = 0.05;  // |weight| <= threshold is treated as absent
  VarOptions var;
  int lingam_max_rows = 2000;
  // Minimum estimated action gain for the action-contrast stage; below
  // this the instantaneous stage falls back to DirectLiNGaM.
  double action_gain_floor = 1e-3;
};

// Estimates the full weighted temporal graph (lagged slices from the VAR,
// instantaneous slice from the action-contrast stage, small weights
// zeroed).  The returned graph satisfies TemporalGraph::validate(): the
// instantaneous slice is made acyclic by greedily ordering constructs by
// incoming-edge count and dropping order-violating edges.
TemporalGraph estimate_temporal_graph(const SyntheticDataset& dataset, int lag,
                                      const DiscoveryOptions& options);
TemporalGraph estimate_temporal_graph(const SyntheticDataset& dataset, int lag,
                                      double threshold = 0.05);

// Full discovery pipeline: estimate_temporal_graph then aggregate.
AggregatedGraph discover(const SyntheticDataset& dataset, int lag,
                         double threshold = 0.05);

}  // namespace cedu
