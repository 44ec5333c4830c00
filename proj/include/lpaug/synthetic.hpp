#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpaug/graph.hpp"

namespace lpaug {

/// Ring lattice over n nodes where each node links to its k nearest ring
/// neighbors, with each edge endpoint rewired uniformly with probability
/// rewire_prob. High clustering, short paths.
Graph ring_lattice_rewired(std::size_t n, std::size_t k, double rewire_prob, std::uint64_t seed);

/// Growing-attachment graph: each new node draws m targets with probability
/// proportional to current degree. With closure_prob > 0, follow-up targets
/// are drawn from the previous target's neighborhood instead, closing
/// triangles.
Graph preferential_attachment(std::size_t n, std::size_t m, double closure_prob,
                              std::uint64_t seed);

struct PlantedGraph {
  Graph graph;
  std::vector<Edge> clean_edges;
  std::vector<Edge> noise_edges;
};

/// Two dense communities of `per_side` nodes (within-community edge
/// probability p_in) plus uniform random noise edges, noise_frac of the
/// clean edge count. Noise edges are reported separately so tests can build
/// oracle masks.
PlantedGraph planted_two_communities(std::size_t per_side, double p_in, double noise_frac,
                                     std::uint64_t seed);

/// Deterministic desk-scale stand-ins for the four small link-prediction
/// benchmarks; matching node counts and topology character, reproducible
/// from fixed internal seeds.
Graph standin_cele();    // ~297 nodes, clustered small world
Graph standin_usair();   // 332 nodes, hub-heavy
Graph standin_yeast();   // 400 nodes, triad-closing attachment
Graph standin_router();  // 350 nodes, sparse low-clustering attachment

/// The named stand-in ("cele", "usair", "yeast", "router").
Graph standin_dataset(const std::string& name);

}  // namespace lpaug
