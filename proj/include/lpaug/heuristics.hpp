#pragma once

#include <string>
#include <vector>

#include "lpaug/graph.hpp"

namespace lpaug {

enum class HeuristicKind { CN, AA, RA };

HeuristicKind parse_heuristic(const std::string& name);
std::string heuristic_name(HeuristicKind kind);

/// Common-neighbor count; on weighted graphs the sum over common neighbors z
/// of w(u,z)*w(z,v). Unweighted graphs use implicit weight 1, so both cases
/// are one code path and weight-1 graphs score identically to unweighted ones.
double score_cn(const Graph& g, NodeId u, NodeId v);

/// Adamic-Adar: sum over common neighbors z of w(u,z)*w(z,v)/ln(strength(z)),
/// skipping z with strength <= 1 (ln would be <= 0). Unweighted strength is
/// the degree, so the skip is the usual degree<=1 guard.
double score_aa(const Graph& g, NodeId u, NodeId v);

/// Resource allocation: sum over common neighbors z of
/// w(u,z)*w(z,v)/strength(z), skipping z with strength <= 0.
double score_ra(const Graph& g, NodeId u, NodeId v);

double score(const Graph& g, HeuristicKind kind, NodeId u, NodeId v);

/// Elementwise score of each pair; errors carry the offending pair index.
std::vector<double> score_batch(const Graph& g, HeuristicKind kind, const std::vector<Edge>& pairs);

}  // namespace lpaug
