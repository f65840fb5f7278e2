#include "cedu/graph.hpp"

#include <set>
#include <string>

namespace cedu {
namespace {

// True iff the matrix (interpreted as adjacency of nonzeros) is acyclic.
bool is_dag(const Matrix& w) {
  const int n = static_cast<int>(w.rows());
  std::vector<int> indegree(n, 0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j && w(i, j) != 0.0) ++indegree[j];
  std::vector<int> queue;
  for (int j = 0; j < n; ++j)
    if (indegree[j] == 0) queue.push_back(j);
  int removed = 0;
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    ++removed;
    for (int j = 0; j < n; ++j) {
      if (j != v && w(v, j) != 0.0 && --indegree[j] == 0) queue.push_back(j);
    }
  }
  return removed == n;
}

}  // namespace

void TemporalGraph::validate() const {
  if (num_constructs < 1) throw ValidationError("temporal graph: num_constructs must be >= 1");
  if (lag < 0) throw ValidationError("temporal graph: lag must be >= 0");
  if (static_cast<int>(weights.size()) != lag + 1)
    throw ValidationError("temporal graph: expected " + std::to_string(lag + 1) +
                          " weight slices, got " + std::to_string(weights.size()));
  const int m = num_vars();
  for (const Matrix& w : weights) {
    if (w.rows() != m || w.cols() != m)
      throw ValidationError("temporal graph: weight slice has wrong shape");
    if (!w.allFinite()) throw ValidationError("temporal graph: non-finite weight");
  }
  const Matrix& w0 = weights.front();
  for (int i = 0; i < m; ++i) {
    if (w0(i, i) != 0.0)
      throw ValidationError("temporal graph: instantaneous slice has a nonzero diagonal");
    if (i > 0 && w0(i, 0) != 0.0)
      throw ValidationError("temporal graph: construct points into the bot channel at lag 0");
  }
  if (!is_dag(w0))
    throw ValidationError("temporal graph: instantaneous slice contains a cycle");
}

void AggregatedGraph::validate() const {
  if (adj.rows() != adj.cols())
    throw ValidationError("aggregated graph: adjacency must be square");
  for (int j = 0; j < adj.cols(); ++j) {
    for (int i = 0; i < adj.rows(); ++i) {
      if (adj(i, j) != 0 && adj(i, j) != 1)
        throw ValidationError("aggregated graph: entries must be 0 or 1");
    }
  }
  for (int i = 0; i < adj.rows(); ++i)
    if (adj(i, i) != 0)
      throw ValidationError("aggregated graph: diagonal must be zero");
}

void SyntheticDataset::validate() const {
  if (num_constructs < 1) throw ValidationError("dataset: num_constructs must be >= 1");
  for (const Trajectory& t : trajectories) {
    if (t.steps() == 0) throw ValidationError("dataset: empty trajectory");
    if (t.num_constructs() != num_constructs)
      throw ValidationError("dataset: trajectory construct count mismatch");
    if (static_cast<int>(t.actions.size()) != t.steps())
      throw ValidationError("dataset: actions/probs length mismatch");
    for (int a : t.actions)
      if (a < 0 || a >= num_constructs)
        throw ValidationError("dataset: action out of range");
    if (!t.probs.allFinite() || (t.probs.array() < 0.0).any() ||
        (t.probs.array() > 1.0).any())
      throw ValidationError("dataset: probabilities must lie in [0, 1]");
  }
}

void CateQuery::validate() const {
  const int n = num_constructs();
  if (n < 1) throw ValidationError("query: conditioning must have at least two columns");
  if (conditioning.rows() < 1) throw ValidationError("query: conditioning is empty");
  if (!conditioning.allFinite()) throw ValidationError("query: non-finite conditioning value");
  auto check_construct = [n](int c, const char* what) {
    if (c < 0 || c >= n)
      throw ValidationError(std::string("query: ") + what + " out of range");
  };
  check_construct(intervention, "intervention");
  check_construct(reference, "reference");
  check_construct(target_construct, "target construct");
  if (effect_time < 0) throw ValidationError("query: effect_time must be >= 0");
  for (int t = 0; t < conditioning.rows(); ++t) {
    double a = conditioning(t, 0);
    if (a != std::floor(a) || a < 0 || a >= n)
      throw ValidationError("query: conditioning action out of range");
  }
}

AggregatedGraph aggregate(const TemporalGraph& graph, double threshold) {
  graph.validate();
  if (!(threshold >= 0.0)) throw ValidationError("aggregate: threshold must be >= 0");
  const int n = graph.num_constructs;
  AggregatedGraph out;
  out.adj = IntMatrix::Zero(n, n);
  for (const Matrix& w : graph.weights) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (i != j && std::abs(w(i + 1, j + 1)) > threshold) out.adj(i, j) = 1;
      }
    }
  }
  return out;
}

RelationCategory relation_category(const AggregatedGraph& graph, int i, int j) {
  const int n = graph.size();
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw ValidationError("relation_category: index out of range");
  if (i >= j) throw ValidationError("relation_category: requires i < j");
  const bool fwd = graph.adj(i, j) != 0;
  const bool bwd = graph.adj(j, i) != 0;
  if (fwd && bwd) return RelationCategory::both;
  if (fwd) return RelationCategory::forward;
  if (bwd) return RelationCategory::backward;
  return RelationCategory::none;
}

AggregatedGraph select_subgraph(const AggregatedGraph& graph,
                                const std::vector<int>& indices) {
  graph.validate();
  const int n = graph.size();
  std::set<int> seen;
  for (int idx : indices) {
    if (idx < 0 || idx >= n) throw ValidationError("select_subgraph: index out of range");
    if (!seen.insert(idx).second)
      throw ValidationError("select_subgraph: duplicate index");
  }
  const int m = static_cast<int>(indices.size());
  AggregatedGraph out;
  out.adj = IntMatrix::Zero(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b) out.adj(a, b) = graph.adj(indices[a], indices[b]);
  return out;
}

}  // namespace cedu
