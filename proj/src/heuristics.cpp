#include "lpaug/heuristics.hpp"

#include <cmath>
#include <stdexcept>

namespace lpaug {

HeuristicKind parse_heuristic(const std::string& name) {
  if (name == "CN" || name == "cn") return HeuristicKind::CN;
  if (name == "AA" || name == "aa") return HeuristicKind::AA;
  if (name == "RA" || name == "ra") return HeuristicKind::RA;
  throw std::runtime_error("unknown heuristic: " + name + " (expected CN, AA, or RA)");
}

std::string heuristic_name(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::CN: return "CN";
    case HeuristicKind::AA: return "AA";
    case HeuristicKind::RA: return "RA";
  }
  throw std::runtime_error("invalid heuristic kind");
}

namespace {

/// Walks the sorted neighbor rows of u and v in lockstep and hands each common
/// neighbor z to `fn` along with the two incident edge weights. Ascending z
/// order keeps floating-point accumulation deterministic.
template <class Fn>
void for_common_neighbors(const Graph& g, NodeId u, NodeId v, Fn&& fn) {
  g.check_node(u);
  g.check_node(v);
  if (u == v) throw std::runtime_error("heuristic score: u == v");
  auto nu = g.neighbors(u);
  auto nv = g.neighbors(v);
  auto eu = g.incident_edges(u);
  auto ev = g.incident_edges(v);
  std::size_t i = 0, j = 0;
  while (i < nu.size() && j < nv.size()) {
    if (nu[i] < nv[j]) {
      ++i;
    } else if (nu[i] > nv[j]) {
      ++j;
    } else {
      fn(nu[i], g.edge_weight(eu[i]), g.edge_weight(ev[j]));
      ++i;
      ++j;
    }
  }
}

}  // namespace

double score_cn(const Graph& g, NodeId u, NodeId v) {
  double s = 0.0;
  for_common_neighbors(g, u, v, [&](NodeId, double wu, double wv) { s += wu * wv; });
  return s;
}

double score_aa(const Graph& g, NodeId u, NodeId v) {
  double s = 0.0;
  for_common_neighbors(g, u, v, [&](NodeId z, double wu, double wv) {
    double st = g.strength(z);
    if (st <= 1.0) return;
    s += wu * wv / std::log(st);
  });
  return s;
}

double score_ra(const Graph& g, NodeId u, NodeId v) {
  double s = 0.0;
  for_common_neighbors(g, u, v, [&](NodeId z, double wu, double wv) {
    double st = g.strength(z);
    if (st <= 0.0) return;
    s += wu * wv / st;
  });
  return s;
}

double score(const Graph& g, HeuristicKind kind, NodeId u, NodeId v) {
  switch (kind) {
    case HeuristicKind::CN: return score_cn(g, u, v);
    case HeuristicKind::AA: return score_aa(g, u, v);
    case HeuristicKind::RA: return score_ra(g, u, v);
  }
  throw std::runtime_error("invalid heuristic kind");
}

std::vector<double> score_batch(const Graph& g, HeuristicKind kind, const std::vector<Edge>& pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    try {
      out.push_back(score(g, kind, pairs[i].u, pairs[i].v));
    } catch (const std::exception& e) {
      throw std::runtime_error("score_batch: pair " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lpaug
