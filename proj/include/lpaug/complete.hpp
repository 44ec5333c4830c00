#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lpaug/graph.hpp"
#include "lpaug/heuristics.hpp"

namespace lpaug {

enum class EdgeOrigin : std::uint8_t { Original = 0, Inflated = 1 };

constexpr int kOriginalBucket = -1;
constexpr int kNumRankBuckets = 10;

/// Training graph plus top-scored candidate edges. Edge metadata is indexed
/// by the base graph's canonical edge ids. Added edges get a score-rank
/// bucket in 0..9 (0 = highest scores); original edges carry -1. Added edges
/// join message passing but are never training labels.
struct InflatedGraph {
  Graph base;
  std::vector<EdgeOrigin> origin;
  std::vector<int> bucket;
  std::size_t requested_k = 0;
  std::size_t added = 0;

  std::size_t shortfall() const { return requested_k - added; }
  bool is_inflated(EdgeId e) const { return origin[e] == EdgeOrigin::Inflated; }
};

/// Scores a candidate pair using only the supplied (training) graph.
using ScoreFn = std::function<double(const Graph&, NodeId, NodeId)>;

ScoreFn heuristic_scorer(HeuristicKind kind);

/// All non-adjacent pairs (u,v), u<v, sharing at least one neighbor; sorted
/// lexicographically. Found by wedge enumeration, so cost scales with the sum
/// of squared degrees rather than all n^2 pairs.
std::vector<Edge> generate_candidates(const Graph& g);

/// Scores candidates, keeps the top k (descending score, ties broken by
/// lexicographic pair order), and returns the graph with those edges added.
/// If fewer than k candidates exist, all are added and the shortfall is
/// recorded. Buckets are equal-sized up to one extra member in the earlier
/// buckets when the added count is not divisible by 10.
InflatedGraph inflate(const Graph& g, const ScoreFn& scorer, long long k);

/// The original training graph, exactly as passed to inflate.
Graph strip_inflated(const InflatedGraph& ig);

/// Text format "u v origin bucket" per line; the plain edge-list loader reads
/// these files too, ignoring the extra columns.
void save_inflated(const InflatedGraph& ig, const std::string& path);
InflatedGraph load_inflated(const std::string& path);

}  // namespace lpaug
