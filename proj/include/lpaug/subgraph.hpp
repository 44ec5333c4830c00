#pragma once

#include <vector>

#include "lpaug/complete.hpp"
#include "lpaug/graph.hpp"

namespace lpaug {

/// Edge of an enclosing subgraph in local ids (a < b), carrying the origin
/// metadata and the owning graph's canonical edge id.
struct SubgraphEdge {
  NodeId a = 0;
  NodeId b = 0;
  EdgeOrigin origin = EdgeOrigin::Original;
  int bucket = kOriginalBucket;
  EdgeId global_id = kNoEdge;

  friend bool operator==(const SubgraphEdge&, const SubgraphEdge&) = default;
};

/// l-hop neighborhood of a target pair, relabeled so the targets are local
/// nodes 0 and 1. The target edge itself is never a local edge, so the label
/// cannot leak through the structure. Each subgraph owns a copy of its local
/// structure: masking one subgraph cannot touch another.
struct EnclosingSubgraph {
  std::vector<NodeId> node_map;        // local -> global
  std::vector<SubgraphEdge> edges;     // sorted by (a,b)
  std::vector<double> zero_one;        // 1.0 for locals 0 and 1
  FeatureMatrix features;              // gathered rows, empty if none
  int hops = 0;

  // Local CSR over `edges`; every edge appears in both endpoint rows.
  std::vector<std::size_t> adj_offsets;
  std::vector<NodeId> adj_nbr;
  std::vector<std::size_t> adj_edge;   // index into `edges`

  std::size_t num_nodes() const { return node_map.size(); }
  std::size_t num_edges() const { return edges.size(); }
  std::size_t degree(NodeId local) const { return adj_offsets[local + 1] - adj_offsets[local]; }
};

/// BFS union of the l-hop balls around i and j with the edge (i,j) removed
/// from traversal; induced edges among kept nodes minus the target edge.
/// When the ball exceeds max_nodes, non-target nodes are kept in
/// (hop distance, global id) order. Deterministic.
EnclosingSubgraph extract(const InflatedGraph& ig, NodeId i, NodeId j, int hops,
                          std::size_t max_nodes);

/// Elementwise extract; errors name the offending pair index.
std::vector<EnclosingSubgraph> batch_extract(const InflatedGraph& ig, const std::vector<Edge>& pairs,
                                             int hops, std::size_t max_nodes);

}  // namespace lpaug
