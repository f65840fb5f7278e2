#include "cedu/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cedu/graph.hpp"

namespace cedu {
namespace {

// Negentropy-style differential entropy approximation (Hyvarinen's
// maximum-entropy approximation with the standard constants).
double entropy_approx(const Vector& u) {
  constexpr double k1 = 79.047;
  constexpr double k2 = 7.4129;
  constexpr double gamma = 0.37457;
  const double n = static_cast<double>(u.size());
  const double t1 = u.array().cosh().log().sum() / n;
  const double t2 = (u.array() * (-u.array().square() / 2.0).exp()).sum() / n;
  return (1.0 + std::log(2.0 * M_PI)) / 2.0 - k1 * (t1 - gamma) * (t1 - gamma) -
         k2 * t2 * t2;
}

Vector standardize(const Vector& x) {
  const double n = static_cast<double>(x.size());
  const double mean = x.mean();
  const double sd = std::sqrt((x.array() - mean).square().sum() / n);
  if (!(sd > 0.0))
    throw NumericError("direct_lingam_order: constant column");
  return ((x.array() - mean) / sd).matrix();
}

double median_of(std::vector<double> values) {
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  if (n == 0) return 0.0;
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Greedy acyclic ordering: repeatedly pick the remaining node with the
// fewest incoming edges from other remaining nodes (lowest index on
// ties), then drop every edge that violates the resulting order.
Matrix enforce_dag(Matrix w) {
  const int n = static_cast<int>(w.rows());
  std::vector<bool> remaining(static_cast<std::size_t>(n), true);
  std::vector<int> position(static_cast<std::size_t>(n), 0);
  for (int rank = 0; rank < n; ++rank) {
    int best = -1, best_in = std::numeric_limits<int>::max();
    for (int j = 0; j < n; ++j) {
      if (!remaining[static_cast<std::size_t>(j)]) continue;
      int in = 0;
      for (int i = 0; i < n; ++i)
        if (i != j && remaining[static_cast<std::size_t>(i)] && w(i, j) != 0.0) ++in;
      if (in < best_in) {
        best_in = in;
        best = j;
      }
    }
    position[static_cast<std::size_t>(best)] = rank;
    remaining[static_cast<std::size_t>(best)] = false;
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (position[static_cast<std::size_t>(i)] >= position[static_cast<std::size_t>(j)])
        w(i, j) = 0.0;
  return w;
}

void apply_threshold(Matrix& w, double threshold) {
  w = (w.array().abs() > threshold).select(w, 0.0);
}

}  // namespace

VarModel fit_var(const SyntheticDataset& dataset, int lag, const VarOptions& options) {
  dataset.validate();
  if (lag < 0) throw ValidationError("fit_var: lag must be >= 0");
  const int n = dataset.num_constructs;
  const int m = n + 1;

  std::size_t total_rows = 0;
  for (const Trajectory& t : dataset.trajectories)
    if (t.steps() > lag) total_rows += static_cast<std::size_t>(t.steps() - lag);
  if (total_rows == 0)
    throw ValidationError("fit_var: no usable rows (trajectories shorter than lag + 1)");

  const int cols = 1 + lag * m;
  Matrix design(static_cast<Eigen::Index>(total_rows), cols);
  Matrix targets(static_cast<Eigen::Index>(total_rows), m);
  std::vector<int> row_actions(total_rows);

  // A trajectory row on the regression scale: action value then latent
  // (or raw) construct values.
  auto value_row = [&](const Trajectory& traj, int t, Eigen::Index dst_row, Matrix& dst,
                       Eigen::Index dst_col) {
    dst(dst_row, dst_col) = static_cast<double>(traj.actions[static_cast<std::size_t>(t)]);
    for (int j = 0; j < n; ++j) {
      const double p = traj.probs(t, j);
      dst(dst_row, dst_col + 1 + j) =
          options.logit_transform ? logit_clamped(p, options.clamp) : p;
    }
  };

  Eigen::Index row = 0;
  for (const Trajectory& traj : dataset.trajectories) {
    for (int t = lag; t < traj.steps(); ++t) {
      design(row, 0) = 1.0;
      for (int k = 1; k <= lag; ++k)
        value_row(traj, t - k, row, design, 1 + (k - 1) * m);
      value_row(traj, t, row, targets, 0);
      row_actions[static_cast<std::size_t>(row)] =
          traj.actions[static_cast<std::size_t>(t)];
      ++row;
    }
  }

  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() < cols)
    throw NumericError("fit_var: design matrix is rank deficient");
  const Matrix beta = qr.solve(targets);

  VarModel model;
  model.lag = lag;
  model.num_constructs = n;
  model.intercept = beta.row(0).transpose();
  model.lagged.reserve(static_cast<std::size_t>(lag));
  for (int k = 0; k < lag; ++k)
    model.lagged.push_back(beta.block(1 + k * m, 0, m, m));
  model.residuals = targets - design * beta;
  model.row_actions = std::move(row_actions);
  return model;
}

std::vector<int> direct_lingam_order(const Matrix& data, int max_rows) {
  const int d = static_cast<int>(data.cols());
  const Eigen::Index rows = data.rows();
  if (d < 1) throw ValidationError("direct_lingam_order: no columns");
  if (rows < 3) throw ValidationError("direct_lingam_order: too few rows");
  if (max_rows < 3) throw ValidationError("direct_lingam_order: max_rows too small");

  // Deterministic stride subsample when the input is large.
  Matrix X;
  if (rows > max_rows) {
    X.resize(max_rows, d);
    for (int i = 0; i < max_rows; ++i)
      X.row(i) = data.row(static_cast<Eigen::Index>(
          static_cast<std::int64_t>(i) * rows / max_rows));
  } else {
    X = data;
  }
  const double nrows = static_cast<double>(X.rows());

  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(d));
  std::vector<int> remaining(static_cast<std::size_t>(d));
  std::iota(remaining.begin(), remaining.end(), 0);

  while (!remaining.empty()) {
    if (remaining.size() == 1) {
      order.push_back(remaining[0]);
      break;
    }
    // Standardized columns and their entropies for this round.
    std::vector<Vector> z(remaining.size());
    std::vector<double> hz(remaining.size());
    for (std::size_t a = 0; a < remaining.size(); ++a) {
      z[a] = standardize(X.col(remaining[a]));
      hz[a] = entropy_approx(z[a]);
    }
    // Score each candidate root by its pairwise likelihood-ratio
    // violations: T(i) = sum_j min(0, diff(i, j))^2.
    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < remaining.size(); ++a) {
      double score = 0.0;
      for (std::size_t b = 0; b < remaining.size(); ++b) {
        if (a == b) continue;
        const double rho = z[a].dot(z[b]) / nrows;
        const Vector ra = (z[a] - rho * z[b]);  // residual of a given b
        const Vector rb = (z[b] - rho * z[a]);
        const double diff = (hz[b] + entropy_approx(standardize(ra))) -
                            (hz[a] + entropy_approx(standardize(rb)));
        const double v = std::min(0.0, diff);
        score += v * v;
      }
      if (score < best_score) {
        best_score = score;
        best = a;
      }
    }
    const int root = remaining[best];
    order.push_back(root);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    // Project the chosen root out of the remaining columns.
    const Vector xr = X.col(root);
    const double xr_mean = xr.mean();
    const double xr_var = (xr.array() - xr_mean).square().sum() / nrows;
    for (int c : remaining) {
      const Vector xc = X.col(c);
      const double cov =
          ((xc.array() - xc.mean()) * (xr.array() - xr_mean)).sum() / nrows;
      X.col(c) = xc - (cov / xr_var) * xr;
    }
  }
  return order;
}

namespace {

// Instantaneous slice via the action-contrast estimator.  Returns false
// when the action signal is too weak to normalize by.
bool instantaneous_from_actions(const VarModel& vm, double threshold,
                                double gain_floor, Matrix& w0) {
  const int n = vm.num_constructs;
  const Eigen::Index rows = vm.residuals.rows();

  // Mean residual of each construct grouped by the step's action.
  Matrix group_mean = Matrix::Zero(n, n);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(n);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const int a = vm.row_actions[static_cast<std::size_t>(r)];
    counts(a) += 1;
    group_mean.row(a) += vm.residuals.row(r).tail(n);
  }
  for (int a = 0; a < n; ++a)
    if (counts(a) > 0) group_mean.row(a) /= static_cast<double>(counts(a));

  // Per-target baseline: actions that do not touch construct j leave its
  // residual mean at a common shift, recovered by the median.
  Vector baseline(n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> others;
    for (int a = 0; a < n; ++a)
      if (a != j && counts(a) > 0) others.push_back(group_mean(a, j));
    baseline(j) = median_of(std::move(others));
  }

  // The estimated gain is the average own-action response above baseline.
  double gain_sum = 0.0;
  int gain_terms = 0;
  for (int j = 0; j < n; ++j) {
    if (counts(j) == 0) continue;
    gain_sum += group_mean(j, j) - baseline(j);
    ++gain_terms;
  }
  if (gain_terms == 0) return false;
  const double gain = gain_sum / gain_terms;
  if (!(gain > gain_floor)) return false;

  w0 = Matrix::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    if (counts(i) == 0) continue;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      w0(i + 1, j + 1) = (group_mean(i, j) - baseline(j)) / gain;
    }
  }
  Matrix block = w0.bottomRightCorner(n, n);
  apply_threshold(block, threshold);
  w0.bottomRightCorner(n, n) = enforce_dag(block);
  return true;
}

// Fallback: DirectLiNGaM ordering of the residuals plus triangular
// regression along that order.
Matrix instantaneous_from_lingam(const VarModel& vm, double threshold, int max_rows) {
  const int m = vm.num_vars();
  const std::vector<int> order = direct_lingam_order(vm.residuals, max_rows);

  Matrix w0 = Matrix::Zero(m, m);
  for (std::size_t q = 1; q < order.size(); ++q) {
    const int target = order[q];
    if (target == 0) continue;  // nothing may point into the bot channel
    Matrix design(vm.residuals.rows(), q + 1);
    design.col(0).setOnes();
    for (std::size_t p = 0; p < q; ++p) design.col(static_cast<Eigen::Index>(p + 1)) =
        vm.residuals.col(order[p]);
    const Vector beta =
        design.colPivHouseholderQr().solve(vm.residuals.col(target));
    for (std::size_t p = 0; p < q; ++p)
      w0(order[p], target) = beta(static_cast<Eigen::Index>(p + 1));
  }
  apply_threshold(w0, threshold);
  return w0;
}

}  // namespace

TemporalGraph estimate_temporal_graph(const SyntheticDataset& dataset, int lag,
                                      const DiscoveryOptions& options) {
  if (lag < 1) throw ValidationError("estimate_temporal_graph: lag must be >= 1");
  if (!(options.threshold >= 0.0))
    throw ValidationError("estimate_temporal_graph: threshold must be >= 0");
  const VarModel vm = fit_var(dataset, lag, options.var);
  const int n = vm.num_constructs;
  const int m = n + 1;

  TemporalGraph graph;
  graph.lag = lag;
  graph.num_constructs = n;
  graph.weights.assign(static_cast<std::size_t>(lag) + 1, Matrix::Zero(m, m));
  for (int k = 0; k < lag; ++k) {
    Matrix w = vm.lagged[static_cast<std::size_t>(k)];
    apply_threshold(w, options.threshold);
    graph.weights[static_cast<std::size_t>(k + 1)] = std::move(w);
  }

  Matrix w0;
  if (!instantaneous_from_actions(vm, options.threshold, options.action_gain_floor, w0))
    w0 = instantaneous_from_lingam(vm, options.threshold, options.lingam_max_rows);
  w0.col(0).setZero();
  w0.diagonal().setZero();
  graph.weights[0] = std::move(w0);

  graph.validate();
  return graph;
}

TemporalGraph estimate_temporal_graph(const SyntheticDataset& dataset, int lag,
                                      double threshold) {
  DiscoveryOptions options;
  options.threshold = threshold;
  return estimate_temporal_graph(dataset, lag, options);
}

AggregatedGraph discover(const SyntheticDataset& dataset, int lag, double threshold) {
  return aggregate(estimate_temporal_graph(dataset, lag, threshold), threshold);
}

}  // namespace cedu
