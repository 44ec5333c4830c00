#include "lpaug/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "lpaug/rng.hpp"

namespace lpaug {

Graph ring_lattice_rewired(std::size_t n, std::size_t k, double rewire_prob, std::uint64_t seed) {
  if (n < 3 || k < 2 || k % 2 != 0 || k >= n)
    throw std::invalid_argument("ring_lattice_rewired: need n >= 3 and even k in [2, n)");
  if (!(rewire_prob >= 0.0 && rewire_prob <= 1.0))
    throw std::invalid_argument("ring_lattice_rewired: rewire_prob outside [0,1]");
  Rng rng(seed);
  std::set<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (std::size_t j = 1; j <= k / 2; ++j) {
      NodeId v = static_cast<NodeId>((u + j) % n);
      if (rng.uniform() < rewire_prob) {
        for (int attempt = 0; attempt < 32; ++attempt) {
          NodeId w = static_cast<NodeId>(rng.below(n));
          if (w == u) continue;
          Edge cand{std::min(u, w), std::max(u, w)};
          if (edges.count(cand)) continue;
          v = w;
          break;
        }
      }
      if (v != u) edges.insert(Edge{std::min(u, v), std::max(u, v)});
    }
  }
  return Graph(n, {edges.begin(), edges.end()});
}

Graph preferential_attachment(std::size_t n, std::size_t m, double closure_prob,
                              std::uint64_t seed) {
  if (m < 1 || n <= m + 1)
    throw std::invalid_argument("preferential_attachment: need m >= 1 and n > m + 1");
  if (!(closure_prob >= 0.0 && closure_prob <= 1.0))
    throw std::invalid_argument("preferential_attachment: closure_prob outside [0,1]");
  Rng rng(seed);
  std::set<Edge> edges;
  std::vector<NodeId> endpoints;  // one entry per edge endpoint: degree-proportional urn
  std::vector<std::vector<NodeId>> adj(n);

  auto link = [&](NodeId a, NodeId b) {
    edges.insert(Edge{std::min(a, b), std::max(a, b)});
    endpoints.push_back(a);
    endpoints.push_back(b);
    adj[a].push_back(b);
    adj[b].push_back(a);
  };

  NodeId seed_size = static_cast<NodeId>(m + 1);
  for (NodeId u = 0; u < seed_size; ++u)
    for (NodeId v = u + 1; v < seed_size; ++v) link(u, v);

  for (NodeId t = seed_size; t < n; ++t) {
    std::set<NodeId> chosen;
    NodeId prev = 0;
    for (std::size_t e = 0; e < m; ++e) {
      NodeId target = 0;
      bool found = false;
      if (e > 0 && rng.uniform() < closure_prob) {
        // close a triangle through the previous target
        const std::vector<NodeId>& nbrs = adj[prev];
        for (int attempt = 0; attempt < 16 && !nbrs.empty(); ++attempt) {
          NodeId cand = nbrs[rng.below(nbrs.size())];
          if (cand != t && !chosen.count(cand)) {
            target = cand;
            found = true;
            break;
          }
        }
      }
      while (!found) {
        NodeId cand = endpoints[rng.below(endpoints.size())];
        if (cand != t && !chosen.count(cand)) {
          target = cand;
          found = true;
        }
      }
      chosen.insert(target);
      link(t, target);
      prev = target;
    }
  }
  return Graph(n, {edges.begin(), edges.end()});
}

PlantedGraph planted_two_communities(std::size_t per_side, double p_in, double noise_frac,
                                     std::uint64_t seed) {
  if (per_side < 2) throw std::invalid_argument("planted_two_communities: per_side too small");
  if (!(p_in > 0.0 && p_in <= 1.0))
    throw std::invalid_argument("planted_two_communities: p_in outside (0,1]");
  if (noise_frac < 0.0) throw std::invalid_argument("planted_two_communities: negative noise_frac");
  Rng rng(seed);
  std::size_t n = 2 * per_side;
  std::set<Edge> clean;
  for (int block = 0; block < 2; ++block) {
    NodeId off = static_cast<NodeId>(block * per_side);
    for (NodeId u = 0; u < per_side; ++u)
      for (NodeId v = u + 1; v < per_side; ++v)
        if (rng.uniform() < p_in) clean.insert(Edge{static_cast<NodeId>(off + u),
                                                    static_cast<NodeId>(off + v)});
  }

  std::size_t want_noise =
      static_cast<std::size_t>(std::llround(noise_frac * static_cast<double>(clean.size())));
  std::set<Edge> noise;
  std::size_t guard = 0;
  while (noise.size() < want_noise && guard < 100 * want_noise + 1000) {
    ++guard;
    NodeId u = static_cast<NodeId>(rng.below(n));
    NodeId v = static_cast<NodeId>(rng.below(n));
    if (u == v) continue;
    Edge e{std::min(u, v), std::max(u, v)};
    if (clean.count(e) || noise.count(e)) continue;
    noise.insert(e);
  }

  PlantedGraph out;
  out.clean_edges.assign(clean.begin(), clean.end());
  out.noise_edges.assign(noise.begin(), noise.end());
  std::vector<Edge> all = out.clean_edges;
  all.insert(all.end(), out.noise_edges.begin(), out.noise_edges.end());
  out.graph = Graph(n, std::move(all));
  return out;
}

Graph standin_cele() { return ring_lattice_rewired(297, 14, 0.15, 0xce1eu); }

Graph standin_usair() { return preferential_attachment(332, 6, 0.3, 0x05a1au); }

Graph standin_yeast() { return preferential_attachment(400, 3, 0.6, 0x9ea57u); }

Graph standin_router() { return preferential_attachment(350, 2, 0.0, 0x4073u); }

Graph standin_dataset(const std::string& name) {
  if (name == "cele") return standin_cele();
  if (name == "usair") return standin_usair();
  if (name == "yeast") return standin_yeast();
  if (name == "router") return standin_router();
  throw std::invalid_argument("standin_dataset: unknown name " + name);
}

}  // namespace lpaug
