#pragma once
// Operations on temporal and aggregated causal graphs.

#include <vector>

#include "cedu/types.hpp"

namespace cedu {

// Collapses a weighted temporal graph to a binary construct-level graph.
// Edge (i, j) is present iff |weights[tau](i+1, j+1)| > threshold for any
// tau in 0..lag.  The bot channel and the diagonal are dropped.
// threshold must be >= 0.
AggregatedGraph aggregate(const TemporalGraph& graph, double threshold);

// Classifies the unordered pair {i, j} (requires i < j, both in range).
RelationCategory relation_category(const AggregatedGraph& graph, int i, int j);

// Restricts an aggregated graph to the given constructs, in the given
// order.  indices must be distinct and in range.
AggregatedGraph select_subgraph(const AggregatedGraph& graph,
                                const std::vector<int>& indices);

}  // namespace cedu
