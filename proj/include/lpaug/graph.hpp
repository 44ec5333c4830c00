#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lpaug {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

constexpr EdgeId kNoEdge = static_cast<EdgeId>(-1);

/// Undirected edge, canonical form u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  Edge() = default;
  Edge(NodeId a, NodeId b) : u(a < b ? a : b), v(a < b ? b : a) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  bool empty() const { return rows == 0; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
};

/// Immutable undirected graph. Adjacency is CSR with sorted, deduplicated
/// neighbor rows; each adjacency slot carries the id of its canonical edge
/// (u < v, lexicographic order) so per-edge metadata stays O(1) to reach.
/// Optional per-edge weights in [0,1] and an optional dense feature matrix.
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t num_nodes, std::vector<Edge> edges);
  Graph(std::size_t num_nodes, std::vector<Edge> edges, std::vector<double> weights);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {adj_.data() + row_offsets_[u], adj_.data() + row_offsets_[u + 1]};
  }
  std::span<const EdgeId> incident_edges(NodeId u) const {
    return {adj_edge_.data() + row_offsets_[u], adj_edge_.data() + row_offsets_[u + 1]};
  }
  std::size_t degree(NodeId u) const { return row_offsets_[u + 1] - row_offsets_[u]; }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  bool has_edge(NodeId u, NodeId v) const { return edge_id(u, v) != kNoEdge; }
  /// Canonical edge id of (u,v), or kNoEdge.
  EdgeId edge_id(NodeId u, NodeId v) const;

  bool is_weighted() const { return !edge_weights_.empty(); }
  double edge_weight(EdgeId e) const { return is_weighted() ? edge_weights_[e] : 1.0; }
  double weight_between(NodeId u, NodeId v) const;
  /// Weighted degree: sum of incident edge weights (plain degree if unweighted).
  double strength(NodeId u) const;

  bool has_features() const { return !features_.empty(); }
  const FeatureMatrix& features() const { return features_; }
  void attach_features(FeatureMatrix f);

  void check_node(NodeId u) const;

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  void build_csr();

  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> row_offsets_;  // num_nodes_+1
  std::vector<NodeId> adj_;
  std::vector<EdgeId> adj_edge_;
  std::vector<Edge> edges_;  // canonical, lexicographically sorted
  std::vector<double> edge_weights_;
  FeatureMatrix features_;
};

/// Train/valid/test positive edges plus fixed evaluation negatives, all
/// derived from one source graph and one seed.
struct SplitSpec {
  std::vector<Edge> train_pos;
  std::vector<Edge> valid_pos;
  std::vector<Edge> test_pos;
  std::vector<Edge> valid_neg;
  std::vector<Edge> test_neg;
  std::uint64_t seed = 0;
};

struct LoadedGraph {
  Graph graph;
  std::size_t dropped_self_loops = 0;
};

/// Parses "u v" lines (extra columns ignored, blank and '#' lines skipped).
/// Node count = max id + 1. Self-loop lines are dropped and counted.
LoadedGraph load_edge_list(const std::string& path);

/// Parses "u v w" lines into a weighted graph.
LoadedGraph load_weighted_edge_list(const std::string& path);

/// One row of whitespace-separated reals per node, row order = node id.
FeatureMatrix load_features(const std::string& path);

void save_edge_list(const Graph& g, const std::string& path);
void save_weighted_edge_list(const Graph& g, const std::string& path);

/// Uniform random partition of the edge set by seed, with frozen uniform
/// non-edge negatives of matching sizes for validation and test.
SplitSpec split_edges(const Graph& g, double valid_frac, double test_frac, std::uint64_t seed);

/// k distinct non-edges outside `exclude`, uniform without replacement.
/// Rejection-samples with a 100*k attempt cap, then falls back to full
/// enumeration. Throws if fewer than k such pairs exist.
std::vector<Edge> sample_negatives(const Graph& g, std::size_t k, const std::vector<Edge>& exclude,
                                   std::uint64_t seed);

void save_split(const SplitSpec& s, const std::string& path);
SplitSpec load_split(const std::string& path);

/// Train graph for a split: the source graph's nodes and features with only
/// the train positives as edges.
Graph train_graph(const Graph& source, const SplitSpec& split);

}  // namespace lpaug
