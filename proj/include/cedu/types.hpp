#pragma once
// Core domain types shared across the toolkit.
//
// Variable convention: a "system" of n constructs is modelled over n + 1
// variables.  Variable 0 is the bot action channel and variables 1..n are
// the constructs (construct j lives at variable index j + 1).  Construct
// indices exposed to users (actions, query fields, aggregated graphs) are
// 0-based over the n constructs.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cedu {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::MatrixXi;

// Error taxonomy.  ValidationError: the input violates a documented
// contract.  IoError: the filesystem or byte stream is unusable.
// NumericError: a computation failed (singular system, non-finite values).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};
class NumericError : public Error {
 public:
  using Error::Error;
};

// Elementwise logistic function, usable with any Eigen dense expression.
template <typename Derived>
auto logistic(const Eigen::DenseBase<Derived>& x) {
  return 1.0 / (1.0 + (-x.derived().array()).exp());
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Elementwise logit with clamping away from {0, 1} so the result is finite.
template <typename Derived>
auto logit_clamped(const Eigen::DenseBase<Derived>& p, double eps = 1e-9) {
  auto q = p.derived().array().min(1.0 - eps).max(eps);
  return (q / (1.0 - q)).log();
}

inline double logit_clamped(double p, double eps = 1e-9) {
  double q = std::min(1.0 - eps, std::max(eps, p));
  return std::log(q / (1.0 - q));
}

// Weighted lagged adjacency over the n + 1 variables.
//
// weights[tau](i, j) is the linear coefficient from variable i at time
// t - tau to variable j at time t.  Slice 0 holds the instantaneous
// (within-step) effects and must be a DAG with a zero diagonal; no
// variable may point into the bot channel at lag 0.
struct TemporalGraph {
  int lag = 0;
  int num_constructs = 0;
  std::vector<Matrix> weights;  // lag + 1 slices, each (n+1) x (n+1)

  int num_vars() const { return num_constructs + 1; }
  const Matrix& slice(int tau) const { return weights.at(static_cast<std::size_t>(tau)); }
  Matrix& slice(int tau) { return weights.at(static_cast<std::size_t>(tau)); }

  // Throws ValidationError if shapes or structural invariants are broken.
  void validate() const;
};

// Binary construct-to-construct adjacency, the target object of discovery.
// adj(i, j) == 1 means "construct i influences construct j at some lag".
struct AggregatedGraph {
  IntMatrix adj;  // n x n with entries in {0, 1} and a zero diagonal

  int size() const { return static_cast<int>(adj.rows()); }
  void validate() const;
};

// Category of the ordered-free relation between a pair of constructs.
enum class RelationCategory : int {
  none = 0,      // no edge either way
  forward = 1,   // i -> j only
  backward = 2,  // j -> i only
  both = 3,      // edges both ways
};

// One simulated (or reconstructed) student time series.  Row t of probs
// holds the per-construct success probabilities observed after the bot
// taught construct actions[t] at step t.
struct Trajectory {
  long student_id = 0;
  std::vector<int> actions;  // construct index taught at each step
  Matrix probs;              // steps x n, entries in [0, 1]

  int steps() const { return static_cast<int>(probs.rows()); }
  int num_constructs() const { return static_cast<int>(probs.cols()); }
};

// A set of trajectories over a common construct system.
struct SyntheticDataset {
  int num_constructs = 0;
  std::vector<Trajectory> trajectories;

  void validate() const;
};

// A conditional average treatment effect question: given an observed
// prefix, how much higher would construct `target_construct`'s success
// probability be at `effect_time` steps after the prefix if the bot taught
// `intervention` now instead of `reference`?
struct CateQuery {
  Matrix conditioning;       // rows x (n+1); column 0 = bot action values
  int intervention = 0;      // construct taught in the treatment arm
  int reference = 0;         // construct taught in the control arm
  int target_construct = 0;  // construct whose probability is compared
  int effect_time = 2;       // steps after the intervention step

  int num_constructs() const { return static_cast<int>(conditioning.cols()) - 1; }
  void validate() const;
};

// Monte-Carlo estimate with its standard error.
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

}  // namespace cedu
