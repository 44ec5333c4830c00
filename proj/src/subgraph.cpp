#include "lpaug/subgraph.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace lpaug {

namespace {

constexpr int kUnreached = std::numeric_limits<int>::max();

/// Hop distances from the two targets with the target edge removed, cut off
/// beyond `hops`. A node's distance is the smaller of its distances to i and
/// j, which a joint BFS from both sources computes directly.
std::vector<int> bounded_bfs(const Graph& g, NodeId i, NodeId j, int hops) {
  std::vector<int> dist(g.num_nodes(), kUnreached);
  std::queue<NodeId> q;
  dist[i] = 0;
  dist[j] = 0;
  q.push(i);
  q.push(j);
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    if (dist[u] == hops) continue;
    for (NodeId v : g.neighbors(u)) {
      if ((u == i && v == j) || (u == j && v == i)) continue;
      if (dist[v] != kUnreached) continue;
      dist[v] = dist[u] + 1;
      q.push(v);
    }
  }
  return dist;
}

}  // namespace

EnclosingSubgraph extract(const InflatedGraph& ig, NodeId i, NodeId j, int hops,
                          std::size_t max_nodes) {
  const Graph& g = ig.base;
  g.check_node(i);
  g.check_node(j);
  if (i == j) throw std::runtime_error("extract: target nodes must differ");
  if (hops < 1) throw std::runtime_error("extract: hops must be >= 1");
  if (max_nodes < 2) throw std::runtime_error("extract: max_nodes must be >= 2");

  std::vector<int> dist = bounded_bfs(g, i, j, hops);
  std::vector<NodeId> others;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (v == i || v == j) continue;
    if (dist[v] != kUnreached) others.push_back(v);
  }
  std::sort(others.begin(), others.end(),
            [&](NodeId a, NodeId b) { return std::pair(dist[a], a) < std::pair(dist[b], b); });
  if (others.size() > max_nodes - 2) others.resize(max_nodes - 2);

  EnclosingSubgraph sub;
  sub.hops = hops;
  sub.node_map.reserve(others.size() + 2);
  sub.node_map.push_back(i);
  sub.node_map.push_back(j);
  sub.node_map.insert(sub.node_map.end(), others.begin(), others.end());

  std::vector<NodeId> local_of(g.num_nodes(), static_cast<NodeId>(-1));
  for (NodeId l = 0; l < sub.node_map.size(); ++l) local_of[sub.node_map[l]] = l;

  for (NodeId l = 0; l < sub.node_map.size(); ++l) {
    NodeId gu = sub.node_map[l];
    auto nbrs = g.neighbors(gu);
    auto eids = g.incident_edges(gu);
    for (std::size_t t = 0; t < nbrs.size(); ++t) {
      NodeId lv = local_of[nbrs[t]];
      if (lv == static_cast<NodeId>(-1) || lv <= l) continue;  // keep each edge once
      if ((l == 0 && lv == 1)) continue;  // target edge stays out
      SubgraphEdge e;
      e.a = l;
      e.b = lv;
      e.origin = ig.origin[eids[t]];
      e.bucket = ig.bucket[eids[t]];
      e.global_id = eids[t];
      sub.edges.push_back(e);
    }
  }
  std::sort(sub.edges.begin(), sub.edges.end(),
            [](const SubgraphEdge& x, const SubgraphEdge& y) {
              return std::pair(x.a, x.b) < std::pair(y.a, y.b);
            });

  sub.zero_one.assign(sub.num_nodes(), 0.0);
  sub.zero_one[0] = 1.0;
  sub.zero_one[1] = 1.0;

  if (g.has_features()) {
    const FeatureMatrix& f = g.features();
    sub.features.rows = sub.num_nodes();
    sub.features.cols = f.cols;
    sub.features.data.reserve(sub.num_nodes() * f.cols);
    for (NodeId v : sub.node_map) {
      sub.features.data.insert(sub.features.data.end(), f.row(v), f.row(v) + f.cols);
    }
  }

  sub.adj_offsets.assign(sub.num_nodes() + 1, 0);
  for (const SubgraphEdge& e : sub.edges) {
    ++sub.adj_offsets[e.a + 1];
    ++sub.adj_offsets[e.b + 1];
  }
  for (std::size_t v = 0; v < sub.num_nodes(); ++v) sub.adj_offsets[v + 1] += sub.adj_offsets[v];
  sub.adj_nbr.resize(2 * sub.edges.size());
  sub.adj_edge.resize(2 * sub.edges.size());
  std::vector<std::size_t> cursor(sub.adj_offsets.begin(), sub.adj_offsets.end() - 1);
  for (std::size_t idx = 0; idx < sub.edges.size(); ++idx) {
    const SubgraphEdge& e = sub.edges[idx];
    sub.adj_nbr[cursor[e.a]] = e.b;
    sub.adj_edge[cursor[e.a]++] = idx;
    sub.adj_nbr[cursor[e.b]] = e.a;
    sub.adj_edge[cursor[e.b]++] = idx;
  }
  return sub;
}

std::vector<EnclosingSubgraph> batch_extract(const InflatedGraph& ig, const std::vector<Edge>& pairs,
                                             int hops, std::size_t max_nodes) {
  std::vector<EnclosingSubgraph> out;
  out.reserve(pairs.size());
  for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
    try {
      out.push_back(extract(ig, pairs[idx].u, pairs[idx].v, hops, max_nodes));
    } catch (const std::exception& e) {
      throw std::runtime_error("batch_extract: pair " + std::to_string(idx) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lpaug
