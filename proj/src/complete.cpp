#include "lpaug/complete.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lpaug {

ScoreFn heuristic_scorer(HeuristicKind kind) {
  return [kind](const Graph& g, NodeId u, NodeId v) { return score(g, kind, u, v); };
}

std::vector<Edge> generate_candidates(const Graph& g) {
  std::vector<Edge> out;
  for (NodeId z = 0; z < g.num_nodes(); ++z) {
    auto nbrs = g.neighbors(z);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
        if (!g.has_edge(nbrs[i], nbrs[j])) out.emplace_back(nbrs[i], nbrs[j]);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

int bucket_of_rank(std::size_t rank, std::size_t added) {
  std::size_t base = added / kNumRankBuckets;
  std::size_t extra = added % kNumRankBuckets;
  // First `extra` buckets hold base+1 members.
  std::size_t boundary = extra * (base + 1);
  if (rank < boundary) return static_cast<int>(rank / (base + 1));
  if (base == 0) return kNumRankBuckets - 1;  // unreachable: rank < added <= boundary
  return static_cast<int>(extra + (rank - boundary) / base);
}

}  // namespace

InflatedGraph inflate(const Graph& g, const ScoreFn& scorer, long long k) {
  if (k < 0) throw std::runtime_error("inflate: k must be nonnegative");
  std::vector<Edge> candidates = generate_candidates(g);
  std::vector<std::size_t> order(candidates.size());
  std::vector<double> scores(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    order[i] = i;
    scores[i] = scorer(g, candidates[i].u, candidates[i].v);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return candidates[a] < candidates[b];
  });
  std::size_t added = std::min<std::size_t>(static_cast<std::size_t>(k), candidates.size());

  std::map<Edge, int> added_bucket;
  for (std::size_t r = 0; r < added; ++r) added_bucket[candidates[order[r]]] = bucket_of_rank(r, added);

  std::vector<Edge> edges = g.edges();
  std::vector<double> weights;
  if (g.is_weighted()) {
    for (EdgeId e = 0; e < g.num_edges(); ++e) weights.push_back(g.edge_weight(e));
  }
  for (const auto& [e, b] : added_bucket) {
    edges.push_back(e);
    if (g.is_weighted()) weights.push_back(1.0);
  }

  InflatedGraph ig;
  ig.base = g.is_weighted() ? Graph(g.num_nodes(), std::move(edges), std::move(weights))
                            : Graph(g.num_nodes(), std::move(edges));
  if (g.has_features()) ig.base.attach_features(g.features());
  ig.requested_k = static_cast<std::size_t>(k);
  ig.added = added;
  ig.origin.assign(ig.base.num_edges(), EdgeOrigin::Original);
  ig.bucket.assign(ig.base.num_edges(), kOriginalBucket);
  for (EdgeId e = 0; e < ig.base.num_edges(); ++e) {
    auto it = added_bucket.find(ig.base.edge(e));
    if (it != added_bucket.end()) {
      ig.origin[e] = EdgeOrigin::Inflated;
      ig.bucket[e] = it->second;
    }
  }
  return ig;
}

Graph strip_inflated(const InflatedGraph& ig) {
  std::vector<Edge> edges;
  std::vector<double> weights;
  for (EdgeId e = 0; e < ig.base.num_edges(); ++e) {
    if (ig.origin[e] != EdgeOrigin::Original) continue;
    edges.push_back(ig.base.edge(e));
    if (ig.base.is_weighted()) weights.push_back(ig.base.edge_weight(e));
  }
  Graph g = ig.base.is_weighted() ? Graph(ig.base.num_nodes(), std::move(edges), std::move(weights))
                                  : Graph(ig.base.num_nodes(), std::move(edges));
  if (ig.base.has_features()) g.attach_features(ig.base.features());
  return g;
}

void save_inflated(const InflatedGraph& ig, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write inflated graph: " + path);
  for (EdgeId e = 0; e < ig.base.num_edges(); ++e) {
    const Edge& edge = ig.base.edge(e);
    out << edge.u << ' ' << edge.v << ' ' << static_cast<int>(ig.origin[e]) << ' ' << ig.bucket[e]
        << '\n';
  }
}

InflatedGraph load_inflated(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open inflated graph: " + path);
  std::vector<Edge> edges;
  std::map<Edge, std::pair<int, int>> meta;
  NodeId max_node = 0;
  bool any = false;
  std::string line;
  std::size_t lineno = 0;
  std::size_t added = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first) || first[0] == '#') continue;
    long long u, v;
    int origin, bucket;
    std::istringstream full(line);
    if (!(full >> u >> v >> origin >> bucket) || u < 0 || v < 0 || u == v ||
        (origin != 0 && origin != 1) || bucket < -1 || bucket >= kNumRankBuckets ||
        (origin == 0) != (bucket == kOriginalBucket)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed inflated-edge line: " + line);
    }
    Edge e(static_cast<NodeId>(u), static_cast<NodeId>(v));
    any = true;
    max_node = std::max({max_node, e.u, e.v});
    if (meta.emplace(e, std::make_pair(origin, bucket)).second) {
      edges.push_back(e);
      if (origin == 1) ++added;
    }
  }
  InflatedGraph ig;
  ig.base = Graph(any ? static_cast<std::size_t>(max_node) + 1 : 0, std::move(edges));
  ig.requested_k = added;
  ig.added = added;
  ig.origin.assign(ig.base.num_edges(), EdgeOrigin::Original);
  ig.bucket.assign(ig.base.num_edges(), kOriginalBucket);
  for (EdgeId e = 0; e < ig.base.num_edges(); ++e) {
    const auto& [origin, bucket] = meta.at(ig.base.edge(e));
    ig.origin[e] = static_cast<EdgeOrigin>(origin);
    ig.bucket[e] = bucket;
  }
  return ig;
}

}  // namespace lpaug
