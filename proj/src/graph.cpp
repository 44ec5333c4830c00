#include "lpaug/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "lpaug/rng.hpp"

namespace lpaug {

namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

void dedupe_canonical(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

}  // namespace

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges) : num_nodes_(num_nodes), edges_(std::move(edges)) {
  dedupe_canonical(edges_);
  build_csr();
}

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges, std::vector<double> weights)
    : num_nodes_(num_nodes) {
  if (edges.size() != weights.size()) {
    throw std::runtime_error("Graph: edge and weight counts differ");
  }
  std::vector<std::size_t> order(edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
  edges_.reserve(edges.size());
  edge_weights_.reserve(edges.size());
  for (std::size_t i : order) {
    if (!edges_.empty() && edges_.back() == edges[i]) continue;  // keep first occurrence
    edges_.push_back(edges[i]);
    edge_weights_.push_back(weights[i]);
  }
  build_csr();
}

void Graph::build_csr() {
  for (const Edge& e : edges_) {
    if (e.u == e.v) throw std::runtime_error("Graph: self-loop in edge list");
    if (e.v >= num_nodes_) throw std::runtime_error("Graph: edge endpoint out of range");
  }
  row_offsets_.assign(num_nodes_ + 1, 0);
  for (const Edge& e : edges_) {
    ++row_offsets_[e.u + 1];
    ++row_offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < num_nodes_; ++i) row_offsets_[i + 1] += row_offsets_[i];
  adj_.resize(row_offsets_[num_nodes_]);
  adj_edge_.resize(row_offsets_[num_nodes_]);
  std::vector<std::size_t> cursor(row_offsets_.begin(), row_offsets_.end() - 1);
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    adj_[cursor[e.u]] = e.v;
    adj_edge_[cursor[e.u]++] = id;
    adj_[cursor[e.v]] = e.u;
    adj_edge_[cursor[e.v]++] = id;
  }
  // Canonical edge order already sorts each row: edges are lexicographic, so
  // node u's neighbors > u arrive sorted; neighbors < u arrive sorted too but
  // interleave, so one sort pass per row keeps lookups binary-searchable.
  for (std::size_t u = 0; u < num_nodes_; ++u) {
    auto b = row_offsets_[u];
    auto e = row_offsets_[u + 1];
    std::vector<std::pair<NodeId, EdgeId>> row;
    row.reserve(e - b);
    for (auto i = b; i < e; ++i) row.emplace_back(adj_[i], adj_edge_[i]);
    std::sort(row.begin(), row.end());
    for (auto i = b; i < e; ++i) {
      adj_[i] = row[i - b].first;
      adj_edge_[i] = row[i - b].second;
    }
  }
}

EdgeId Graph::edge_id(NodeId u, NodeId v) const {
  check_node(u);
  check_node(v);
  if (u == v) return kNoEdge;
  auto nbrs = neighbors(u);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
  if (it == nbrs.end() || *it != v) return kNoEdge;
  return incident_edges(u)[static_cast<std::size_t>(it - nbrs.begin())];
}

double Graph::weight_between(NodeId u, NodeId v) const {
  EdgeId e = edge_id(u, v);
  if (e == kNoEdge) return 0.0;
  return edge_weight(e);
}

double Graph::strength(NodeId u) const {
  check_node(u);
  if (!is_weighted()) return static_cast<double>(degree(u));
  double s = 0.0;
  for (EdgeId e : incident_edges(u)) s += edge_weights_[e];
  return s;
}

void Graph::attach_features(FeatureMatrix f) {
  if (f.rows != num_nodes_) {
    throw std::runtime_error("attach_features: row count " + std::to_string(f.rows) +
                             " does not match node count " + std::to_string(num_nodes_));
  }
  features_ = std::move(f);
}

void Graph::check_node(NodeId u) const {
  if (u >= num_nodes_) {
    throw std::runtime_error("node id " + std::to_string(u) + " out of range (graph has " +
                             std::to_string(num_nodes_) + " nodes)");
  }
}

bool operator==(const Graph& a, const Graph& b) {
  return a.num_nodes_ == b.num_nodes_ && a.edges_ == b.edges_ && a.edge_weights_ == b.edge_weights_;
}

namespace {

struct ParsedLine {
  bool blank = false;
  NodeId u = 0;
  NodeId v = 0;
  double w = 1.0;
  bool has_weight = false;
};

ParsedLine parse_edge_line(const std::string& line, std::size_t lineno, const std::string& path) {
  ParsedLine out;
  std::istringstream ss(line);
  std::string tok;
  if (!(ss >> tok) || tok[0] == '#') {
    out.blank = true;
    return out;
  }
  auto parse_node = [&](const std::string& t) -> NodeId {
    try {
      std::size_t pos = 0;
      long long value = std::stoll(t, &pos);
      if (pos != t.size() || value < 0) throw std::invalid_argument(t);
      return static_cast<NodeId>(value);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed edge line: " + line);
    }
  };
  out.u = parse_node(tok);
  if (!(ss >> tok)) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed edge line: " + line);
  }
  out.v = parse_node(tok);
  if (ss >> tok) {
    try {
      std::size_t pos = 0;
      out.w = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      out.has_weight = true;
    } catch (const std::exception&) {
      // third column is not numeric; treat as annotation and ignore
    }
  }
  return out;
}

LoadedGraph load_edges_impl(const std::string& path, bool weighted) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  std::vector<Edge> edges;
  std::vector<double> weights;
  std::size_t dropped = 0;
  NodeId max_node = 0;
  bool any = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    ParsedLine p = parse_edge_line(line, lineno, path);
    if (p.blank) continue;
    if (weighted && !p.has_weight) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": missing weight column: " + line);
    }
    if (weighted && (p.w < 0.0 || p.w > 1.0)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": weight out of [0,1]: " + line);
    }
    if (p.u == p.v) {
      ++dropped;
      continue;
    }
    any = true;
    max_node = std::max({max_node, p.u, p.v});
    edges.emplace_back(p.u, p.v);
    if (weighted) weights.push_back(p.w);
  }
  std::size_t n = any ? static_cast<std::size_t>(max_node) + 1 : 0;
  if (weighted) return {Graph(n, std::move(edges), std::move(weights)), dropped};
  return {Graph(n, std::move(edges)), dropped};
}

}  // namespace

LoadedGraph load_edge_list(const std::string& path) { return load_edges_impl(path, false); }

LoadedGraph load_weighted_edge_list(const std::string& path) { return load_edges_impl(path, true); }

FeatureMatrix load_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature file: " + path);
  FeatureMatrix f;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::vector<double> row;
    double x;
    while (ss >> x) row.push_back(x);
    if (row.empty()) continue;
    if (f.cols == 0) f.cols = row.size();
    if (row.size() != f.cols) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(f.cols) +
                               " values, got " + std::to_string(row.size()));
    }
    f.data.insert(f.data.end(), row.begin(), row.end());
    ++f.rows;
  }
  return f;
}

void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list: " + path);
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

void save_weighted_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list: " + path);
  out.precision(17);
  for (EdgeId i = 0; i < g.num_edges(); ++i) {
    const Edge& e = g.edge(i);
    out << e.u << ' ' << e.v << ' ' << g.edge_weight(i) << '\n';
  }
}

SplitSpec split_edges(const Graph& g, double valid_frac, double test_frac, std::uint64_t seed) {
  if (valid_frac < 0 || test_frac < 0 || valid_frac + test_frac >= 1.0) {
    throw std::runtime_error("split_edges: fractions must be nonnegative and sum below 1");
  }
  std::vector<Edge> pool = g.edges();
  Rng rng(derive_seed(seed, "split.shuffle"));
  rng.shuffle(pool);
  auto m = pool.size();
  auto n_valid = static_cast<std::size_t>(std::llround(valid_frac * static_cast<double>(m)));
  auto n_test = static_cast<std::size_t>(std::llround(test_frac * static_cast<double>(m)));
  SplitSpec s;
  s.seed = seed;
  s.valid_pos.assign(pool.begin(), pool.begin() + n_valid);
  s.test_pos.assign(pool.begin() + n_valid, pool.begin() + n_valid + n_test);
  s.train_pos.assign(pool.begin() + n_valid + n_test, pool.end());
  std::vector<Edge> negs = sample_negatives(g, n_valid + n_test, {}, derive_seed(seed, "split.neg"));
  s.valid_neg.assign(negs.begin(), negs.begin() + n_valid);
  s.test_neg.assign(negs.begin() + n_valid, negs.end());
  return s;
}

std::vector<Edge> sample_negatives(const Graph& g, std::size_t k, const std::vector<Edge>& exclude,
                                   std::uint64_t seed) {
  std::size_t n = g.num_nodes();
  if (n < 2 && k > 0) throw std::runtime_error("sample_negatives: graph too small");
  std::unordered_set<std::uint64_t> excluded;
  excluded.reserve(exclude.size());
  for (const Edge& e : exclude) excluded.insert(pair_key(e.u, e.v));
  auto is_free = [&](NodeId u, NodeId v) {
    return u != v && !g.has_edge(u, v) && !excluded.count(pair_key(std::min(u, v), std::max(u, v)));
  };
  std::vector<Edge> out;
  out.reserve(k);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(k);
  Rng rng(seed);
  std::size_t attempts = 0;
  const std::size_t cap = 100 * std::max<std::size_t>(k, 1);
  while (out.size() < k && attempts < cap) {
    ++attempts;
    auto u = static_cast<NodeId>(rng.below(n));
    auto v = static_cast<NodeId>(rng.below(n));
    if (!is_free(u, v)) continue;
    Edge e(u, v);
    if (!seen.insert(pair_key(e.u, e.v)).second) continue;
    out.push_back(e);
  }
  if (out.size() == k) return out;
  // Sparse leftovers: enumerate every remaining non-edge and sample exactly.
  std::vector<Edge> pool;
  for (NodeId u = 0; u + 1 < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (is_free(u, v) && !seen.count(pair_key(u, v))) pool.emplace_back(u, v);
    }
  }
  if (out.size() + pool.size() < k) {
    throw std::runtime_error("sample_negatives: requested " + std::to_string(k) +
                             " non-edges but only " + std::to_string(out.size() + pool.size()) +
                             " exist");
  }
  rng.shuffle(pool);
  out.insert(out.end(), pool.begin(), pool.begin() + (k - out.size()));
  return out;
}

namespace {

void write_edge_block(std::ofstream& out, const std::string& name, const std::vector<Edge>& edges) {
  out << name << ' ' << edges.size() << '\n';
  for (const Edge& e : edges) out << e.u << ' ' << e.v << '\n';
}

std::vector<Edge> read_edge_block(std::ifstream& in, const std::string& expect, const std::string& path) {
  std::string name;
  std::size_t count = 0;
  if (!(in >> name >> count) || name != expect) {
    throw std::runtime_error(path + ": malformed split file (expected block " + expect + ")");
  }
  std::vector<Edge> edges;
  edges.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    NodeId u, v;
    if (!(in >> u >> v)) throw std::runtime_error(path + ": truncated split block " + expect);
    edges.emplace_back(u, v);
  }
  return edges;
}

}  // namespace

void save_split(const SplitSpec& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write split file: " + path);
  out << "split_v1 " << s.seed << '\n';
  write_edge_block(out, "train_pos", s.train_pos);
  write_edge_block(out, "valid_pos", s.valid_pos);
  write_edge_block(out, "test_pos", s.test_pos);
  write_edge_block(out, "valid_neg", s.valid_neg);
  write_edge_block(out, "test_neg", s.test_neg);
}

SplitSpec load_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open split file: " + path);
  std::string magic;
  SplitSpec s;
  if (!(in >> magic >> s.seed) || magic != "split_v1") {
    throw std::runtime_error(path + ": not a split file");
  }
  s.train_pos = read_edge_block(in, "train_pos", path);
  s.valid_pos = read_edge_block(in, "valid_pos", path);
  s.test_pos = read_edge_block(in, "test_pos", path);
  s.valid_neg = read_edge_block(in, "valid_neg", path);
  s.test_neg = read_edge_block(in, "test_neg", path);
  return s;
}

Graph train_graph(const Graph& source, const SplitSpec& split) {
  Graph g(source.num_nodes(), split.train_pos);
  if (source.has_features()) g.attach_features(source.features());
  return g;
}

}  // namespace lpaug
