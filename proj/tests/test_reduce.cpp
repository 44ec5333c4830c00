#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "lpaug/complete.hpp"
#include "lpaug/graph.hpp"
#include "lpaug/heuristics.hpp"
#include "lpaug/reduce.hpp"
#include "lpaug/rng.hpp"
#include "lpaug/subgraph.hpp"

using namespace lpaug;

namespace {

ReduceConfig tiny_config() {
  ReduceConfig cfg;
  cfg.hidden = 4;
  cfg.attn_dim = 3;
  cfg.edge_emb_dim = 2;
  cfg.encoder_layers = 2;
  cfg.hops = 1;
  cfg.max_nodes = 16;
  cfg.epochs = 2;
  cfg.patience = 2;
  cfg.batch_size = 4;
  return cfg;
}

void zero_tensor(ModelParams& p, const std::string& name) {
  for (double& x : p.at(name).a) x = 0.0;
}

void scale_tensor(ModelParams& p, const std::string& name, double s) {
  for (double& x : p.at(name).a) x *= s;
}

void fill_tensor(ModelParams& p, const std::string& name, double v) {
  for (double& x : p.at(name).a) x = v;
}

// Forward re-implementation with plain loops, kept deliberately free of the
// Tape machinery so the two paths can disagree.
using Rowv = std::vector<double>;
using Matx = std::vector<Rowv>;

Rowv affine_row(const Rowv& x, const Mat& w, const Mat& b) {
  REQUIRE(x.size() == w.rows);
  Rowv out(w.cols, 0.0);
  for (std::size_t j = 0; j < w.cols; ++j) {
    double s = b.at(0, j);
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * w.at(i, j);
    out[j] = s;
  }
  return out;
}

Rowv relu_row(Rowv x) {
  for (double& v : x) v = std::max(v, 0.0);
  return x;
}

Rowv mlp2_row(const ModelParams& ps, const Rowv& x, const std::string& l0, const std::string& l1) {
  Rowv h = relu_row(affine_row(x, ps.at(l0 + ".w"), ps.at(l0 + ".b")));
  return affine_row(h, ps.at(l1 + ".w"), ps.at(l1 + ".b"));
}

Rowv concat_rows(const std::vector<Rowv>& parts) {
  Rowv out;
  for (const Rowv& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

double dot(const Rowv& a, const Rowv& b) {
  REQUIRE(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Matx oracle_input(const EnclosingSubgraph& sub) {
  Matx x(sub.num_nodes());
  for (std::size_t i = 0; i < sub.num_nodes(); ++i) {
    x[i].push_back(sub.zero_one[i]);
    if (sub.features.empty()) {
      x[i].push_back(1.0);
    } else {
      for (std::size_t j = 0; j < sub.features.cols; ++j) x[i].push_back(sub.features.row(i)[j]);
    }
  }
  return x;
}

// mask: one multiplier per local edge; empty means all ones.
Matx oracle_encode(const EnclosingSubgraph& sub, const ModelParams& ps, const ReduceConfig& cfg,
                   const std::vector<double>& mask) {
  Matx h = oracle_input(sub);
  for (int l = 0; l < cfg.encoder_layers; ++l) {
    std::size_t d = h[0].size();
    Matx next(sub.num_nodes());
    for (std::size_t v = 0; v < sub.num_nodes(); ++v) {
      Rowv agg(d, 0.0);
      for (std::size_t s = sub.adj_offsets[v]; s < sub.adj_offsets[v + 1]; ++s) {
        double w = mask.empty() ? 1.0 : mask[sub.adj_edge[s]];
        for (std::size_t j = 0; j < d; ++j) agg[j] += w * h[sub.adj_nbr[s]][j];
      }
      double denom = 1.0 + static_cast<double>(sub.degree(static_cast<NodeId>(v)));
      for (double& a : agg) a /= denom;
      std::string base = "enc" + std::to_string(l);
      next[v] = relu_row(affine_row(concat_rows({h[v], agg}), ps.at(base + ".w"),
                                    ps.at(base + ".b")));
    }
    h = std::move(next);
  }
  return h;
}

Rowv oracle_mean_rows(const Matx& h) {
  Rowv out(h[0].size(), 0.0);
  for (const Rowv& r : h)
    for (std::size_t j = 0; j < r.size(); ++j) out[j] += r[j];
  for (double& v : out) v /= static_cast<double>(h.size());
  return out;
}

Rowv oracle_query(const ModelParams& ps, const ReduceConfig& cfg, const Matx& h) {
  if (cfg.no_attention) {
    const Mat& q = ps.at("attn_fixed_q");
    Rowv out(q.cols);
    for (std::size_t j = 0; j < q.cols; ++j) out[j] = q.at(0, j);
    return out;
  }
  return mlp2_row(ps, oracle_mean_rows(h), "attn_q0", "attn_q1");
}

Rowv oracle_embed_row(const ModelParams& ps, const SubgraphEdge& e, const ReduceConfig& cfg) {
  const Mat& emb = ps.at("edge_embed");
  std::size_t row = e.origin == EdgeOrigin::Original ? 0 : 1 + static_cast<std::size_t>(e.bucket);
  Rowv out(emb.cols, 0.0);
  if (!cfg.no_edge_label)
    for (std::size_t j = 0; j < emb.cols; ++j) out[j] = emb.at(row, j);
  return out;
}

std::vector<double> oracle_edge_logits(const EnclosingSubgraph& sub, const ModelParams& ps,
                                       const ReduceConfig& cfg) {
  Matx h = oracle_encode(sub, ps, cfg, {});
  Rowv q = oracle_query(ps, cfg, h);
  double scale = 0.5 / std::sqrt(static_cast<double>(cfg.attn_dim));
  std::vector<double> out;
  for (const SubgraphEdge& e : sub.edges) {
    Rowv emb = oracle_embed_row(ps, e, cfg);
    double a_uv = dot(mlp2_row(ps, concat_rows({h[e.a], h[e.b], emb}), "attn_k0", "attn_k1"), q);
    double a_vu = dot(mlp2_row(ps, concat_rows({h[e.b], h[e.a], emb}), "attn_k0", "attn_k1"), q);
    out.push_back(std::clamp(scale * (a_uv + a_vu), -15.0, 15.0));
  }
  return out;
}

std::vector<double> oracle_node_logits(const EnclosingSubgraph& sub, const ModelParams& ps,
                                       const ReduceConfig& cfg) {
  Matx h = oracle_encode(sub, ps, cfg, {});
  Rowv q = oracle_query(ps, cfg, h);
  double scale = 1.0 / std::sqrt(static_cast<double>(cfg.attn_dim));
  std::vector<double> out;
  for (std::size_t v = 0; v < sub.num_nodes(); ++v) {
    double a = dot(mlp2_row(ps, h[v], "attn_n0", "attn_n1"), q);
    out.push_back(std::clamp(scale * a, -15.0, 15.0));
  }
  return out;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Plain link predictor on a masked subgraph; with an all-ones mask this is
// the no-augmentation baseline in its entirety.
double oracle_pred_logit(const EnclosingSubgraph& sub, const ModelParams& ps,
                         const ReduceConfig& cfg, const std::vector<double>& mask) {
  Matx h = oracle_encode(sub, ps, cfg, mask);
  Rowv head = concat_rows({h[0], h[1], oracle_mean_rows(h)});
  return mlp2_row(ps, head, "pred0", "pred1")[0];
}

double oracle_bce(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

InflatedGraph plain_inflated(const Graph& g) { return inflate(g, heuristic_scorer(HeuristicKind::RA), 0); }

Graph two_triangles() {
  return Graph(8, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {4, 6}, {5, 6}, {6, 7}});
}

Graph community_pair(std::size_t side) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < side; ++u)
    for (NodeId v = u + 1; v < side; ++v) edges.push_back({u, v});
  NodeId off = static_cast<NodeId>(side);
  for (NodeId u = 0; u < side; ++u)
    for (NodeId v = u + 1; v < side; ++v) edges.push_back({off + u, off + v});
  edges.push_back({0, off});
  return Graph(2 * side, std::move(edges));
}

}  // namespace

TEST_CASE("config validation lists every violated field") {
  ReduceConfig cfg = tiny_config();
  cfg.beta = -1.0;
  cfg.tau = 0.0;
  cfg.gamma_ori = 1.5;
  try {
    cfg.validate();
    FAIL("expected rejection");
  } catch (const std::exception& ex) {
    std::string msg = ex.what();
    CHECK(msg.find("beta") != std::string::npos);
    CHECK(msg.find("tau") != std::string::npos);
    CHECK(msg.find("gamma_ori") != std::string::npos);
  }
}

TEST_CASE("zeroed query makes every keep-probability one half") {
  InflatedGraph ig = plain_inflated(two_triangles());
  EnclosingSubgraph sub = extract(ig, 0, 1, 2, 16);
  ReduceConfig cfg = tiny_config();
  ModelParams ps = make_params(input_dim(ig.base), cfg, 7);
  zero_tensor(ps, "attn_q1.w");
  zero_tensor(ps, "attn_q1.b");

  EdgeMaskDistribution dist = edge_logits(sub, ps, cfg);
  REQUIRE(dist.size() == sub.num_edges());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    CHECK(dist.logits[i] == 0.0);
    CHECK(dist.keep_prob[i] == 0.5);
  }

  ReduceConfig ncfg = cfg;
  ncfg.sampling = SamplingMode::Nodewise;
  EdgeMaskDistribution nd = nodewise_logits(sub, ps, ncfg);
  for (double p : nd.keep_prob) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("edgeless subgraph yields an empty distribution and still scores") {
  Graph g(6, {{0, 1}, {2, 3}, {3, 4}, {2, 4}, {4, 5}});
  InflatedGraph ig = plain_inflated(g);
  EnclosingSubgraph sub = extract(ig, 0, 1, 2, 16);
  REQUIRE(sub.num_edges() == 0);

  ReduceConfig cfg = tiny_config();
  ModelParams ps = make_params(input_dim(ig.base), cfg, 3);
  CHECK(edge_logits(sub, ps, cfg).size() == 0);

  LossResult lr = forward_loss(sub, 1.0, ps, cfg, 11, false);
  CHECK(std::isfinite(lr.loss));
  CHECK(lr.kl == 0.0);
  InferResult inf = infer(sub, ps, cfg);
  CHECK(inf.weights.empty());
  CHECK(inf.score > 0.0);
  CHECK(inf.score < 1.0);
}

TEST_CASE("edge logits match an explicit dot-product recomputation") {
  Graph g(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  InflatedGraph ig = inflate(g, heuristic_scorer(HeuristicKind::RA), 2);
  REQUIRE(ig.added == 2);
  EnclosingSubgraph sub = extract(ig, 0, 1, 2, 16);
  REQUIRE(sub.num_edges() == 5);
  bool has_inflated = false;
  for (const SubgraphEdge& e : sub.edges)
    if (e.origin == EdgeOrigin::Inflated) has_inflated = true;
  REQUIRE(has_inflated);

  for (bool no_attn : {false, true}) {
    for (bool no_label : {false, true}) {
      ReduceConfig cfg = tiny_config();
      cfg.no_attention = no_attn;
      cfg.no_edge_label = no_label;
      ModelParams ps = make_params(input_dim(ig.base), cfg, 23);
      EdgeMaskDistribution dist = edge_logits(sub, ps, cfg);
      std::vector<double> want = oracle_edge_logits(sub, ps, cfg);
      REQUIRE(dist.size() == want.size());
      for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(dist.logits[i] == doctest::Approx(want[i]).epsilon(1e-12));
        CHECK(dist.keep_prob[i] == doctest::Approx(sigmoid(want[i])).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("keep-probabilities stay strictly inside the unit interval") {
  InflatedGraph ig = plain_inflated(two_triangles());
  EnclosingSubgraph sub = extract(ig, 2, 3, 2, 16);
  ReduceConfig cfg = tiny_config();
  ModelParams ps = make_params(input_dim(ig.base), cfg, 5);
  scale_tensor(ps, "attn_k1.w", 1e6);
  scale_tensor(ps, "attn_q1.b", 1e6);

  EdgeMaskDistribution dist = edge_logits(sub, ps, cfg);
  REQUIRE(dist.size() > 0);
  bool clamped = false;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    CHECK(dist.keep_prob[i] > 0.0);
    CHECK(dist.keep_prob[i] < 1.0);
    CHECK(dist.logits[i] >= -15.0);
    CHECK(dist.logits[i] <= 15.0);
    if (std::abs(dist.logits[i]) == 15.0) clamped = true;
  }
  CHECK(clamped);
}

TEST_CASE("nodewise keep-probabilities are products of per-node terms") {
  Graph g(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}});
  InflatedGraph ig = plain_inflated(g);
  EnclosingSubgraph sub = extract(ig, 0, 1, 2, 16);
  ReduceConfig cfg = tiny_config();
  cfg.sampling = SamplingMode::Nodewise;
  ModelParams ps = make_params(input_dim(ig.base), cfg, 31);

  EdgeMaskDistribution dist = nodewise_logits(sub, ps, cfg);
  std::vector<double> nl = oracle_node_logits(sub, ps, cfg);
  REQUIRE(dist.size() == sub.num_edges());
  for (std::size_t i = 0; i < sub.num_edges(); ++i) {
    double want = sigmoid(nl[sub.edges[i].a]) * sigmoid(nl[sub.edges[i].b]);
    CHECK(dist.keep_prob[i] == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK_THROWS(edge_logits(sub, ps, cfg));
}

TEST_CASE("kl regularizer matches the closed form and vanishes at the prior") {
  ReduceConfig cfg = tiny_config();
  cfg.gamma_ori = 0.8;
  cfg.gamma_ext = 0.3;

  EdgeMaskDistribution one;
  one.keep_prob = {0.5};
  one.logits = {0.0};
  one.origin = {EdgeOrigin::Original};
  CHECK(kl_regularizer_value(one, cfg) ==
        doctest::Approx(0.5 * std::log(0.5 / 0.8) + 0.5 * std::log(0.5 / 0.2)).epsilon(1e-12));
  CHECK(kl_regularizer_value(one, cfg) == doctest::Approx(0.22314).epsilon(1e-4));

  EdgeMaskDistribution at_prior;
  at_prior.keep_prob = {0.8, 0.3};
  at_prior.logits = {0.0, 0.0};
  at_prior.origin = {EdgeOrigin::Original, EdgeOrigin::Inflated};
  CHECK(kl_regularizer_value(at_prior, cfg) == doctest::Approx(0.0).epsilon(1e-15));

  Rng rng(99);
  EdgeMaskDistribution mixed;
  double want = 0.0;
  for (int i = 0; i < 200; ++i) {
    double p = rng.uniform_open();
    EdgeOrigin o = rng.uniform() < 0.5 ? EdgeOrigin::Original : EdgeOrigin::Inflated;
    double gamma = o == EdgeOrigin::Original ? cfg.gamma_ori : cfg.gamma_ext;
    double term = p * std::log(p / gamma) + (1 - p) * std::log((1 - p) / (1 - gamma));
    CHECK(term >= 0.0);
    want += term;
    mixed.keep_prob.push_back(p);
    mixed.logits.push_back(std::log(p) - std::log1p(-p));
    mixed.origin.push_back(o);
  }
  CHECK(kl_regularizer_value(mixed, cfg) == doctest::Approx(want).epsilon(1e-12));

  ReduceConfig bad = cfg;
  bad.gamma_ext = 1.0;
  CHECK_THROWS(kl_regularizer_value(one, bad));
}

TEST_CASE("zeroed predictor head gives loss ln 2 on a positive label") {
  InflatedGraph ig = plain_inflated(two_triangles());
  EnclosingSubgraph sub = extract(ig, 0, 1, 1, 16);
  ReduceConfig cfg = tiny_config();
  cfg.beta = 0.0;
  ModelParams ps = make_params(input_dim(ig.base), cfg, 13);
  zero_tensor(ps, "pred1.w");
  zero_tensor(ps, "pred1.b");

  LossResult lr = forward_loss(sub, 1.0, ps, cfg, 5, false);
  CHECK(lr.p_hat == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lr.loss == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("pinned mask and zero beta reduce to the plain baseline exactly") {
  Graph g = two_triangles();
  InflatedGraph ig = plain_inflated(g);
  ReduceConfig cfg = tiny_config();
  cfg.force_mask_one = true;
  cfg.beta = 0.0;
  ModelParams ps = make_params(input_dim(ig.base), cfg, 41);

  std::vector<Edge> targets = {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4},
                               {4, 5}, {4, 6}, {5, 6}, {6, 7}, {0, 7}};
  for (std::size_t i = 0; i < targets.size(); ++i) {
    EnclosingSubgraph sub = extract(ig, targets[i].u, targets[i].v, cfg.hops, cfg.max_nodes);
    double label = i % 2 ? 0.0 : 1.0;
    LossResult lr = forward_loss(sub, label, ps, cfg, 77, false);
    double z = oracle_pred_logit(sub, ps, cfg, {});
    CHECK(std::abs(lr.loss - oracle_bce(z, label)) < 1e-12);
    CHECK(std::abs(lr.p_hat - sigmoid(z)) < 1e-12);
    CHECK(lr.kl == 0.0);

    InferResult inf = infer(sub, ps, cfg);
    CHECK(std::abs(inf.score - sigmoid(z)) < 1e-12);
    if (sub.num_edges() > 0) {
      REQUIRE(inf.weights.size() == sub.num_edges());
      for (double w : inf.weights) CHECK(w == 1.0);
    }
  }
}

TEST_CASE("composed loss gradients agree with finite differences") {
  Graph g(7, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {3, 5}, {5, 6}});
  InflatedGraph ig = inflate(g, heuristic_scorer(HeuristicKind::AA), 2);

  std::vector<std::pair<Edge, SamplingMode>> cases = {
      {{0, 1}, SamplingMode::Edgewise},
      {{2, 3}, SamplingMode::Edgewise},
      {{0, 4}, SamplingMode::Edgewise},
      {{3, 4}, SamplingMode::Nodewise},
  };
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    ReduceConfig cfg = tiny_config();
    cfg.sampling = cases[ci].second;
    cfg.beta = 0.2;
    cfg.gamma_ori = 0.6;
    cfg.gamma_ext = 0.4;
    EnclosingSubgraph sub = extract(ig, cases[ci].first.u, cases[ci].first.v, 1, 8);
    REQUIRE(sub.num_nodes() <= 8);
    ModelParams ps = make_params(input_dim(ig.base), cfg, 100 + ci);
    double label = ci % 2 ? 0.0 : 1.0;
    LossFn f = [&](const ModelParams& p) {
      LossResult r = forward_loss(sub, label, p, cfg, 900 + ci, true);
      return std::make_pair(r.loss, r.grads);
    };
    GradCheckReport rep = grad_check(f, ps, 1e-5, 4, 55 + ci);
    INFO("case ", ci, " worst ", rep.worst_param);
    CHECK(rep.coords_checked > 0);
    CHECK(rep.max_rel_err < 1e-5);
  }
}

TEST_CASE("subgraph losses do not depend on evaluation order") {
  InflatedGraph ig = plain_inflated(community_pair(5));
  ReduceConfig cfg = tiny_config();
  ModelParams ps = make_params(input_dim(ig.base), cfg, 17);

  std::vector<Edge> targets = {{0, 1}, {2, 3}, {5, 6}, {0, 5}};
  std::vector<double> first;
  for (const Edge& e : targets) {
    EnclosingSubgraph sub = extract(ig, e.u, e.v, cfg.hops, cfg.max_nodes);
    first.push_back(forward_loss(sub, 1.0, ps, cfg, derive_seed(3, e.u, e.v), false).loss);
  }
  std::vector<double> reversed(targets.size());
  for (std::size_t i = targets.size(); i-- > 0;) {
    EnclosingSubgraph sub = extract(ig, targets[i].u, targets[i].v, cfg.hops, cfg.max_nodes);
    reversed[i] = forward_loss(sub, 1.0, ps, cfg, derive_seed(3, targets[i].u, targets[i].v),
                               false).loss;
  }
  CHECK(first == reversed);
}

TEST_CASE("inference is deterministic and matches hardened sampling") {
  InflatedGraph ig = plain_inflated(two_triangles());
  EnclosingSubgraph sub = extract(ig, 4, 5, 1, 16);
  REQUIRE(sub.num_edges() > 0);
  ReduceConfig cfg = tiny_config();
  ModelParams ps = make_params(input_dim(ig.base), cfg, 61);

  InferResult a = infer(sub, ps, cfg);
  InferResult b = infer(sub, ps, cfg);
  CHECK(a.score == b.score);
  CHECK(a.weights == b.weights);

  // Saturated keep-probabilities make the sampled mask almost surely
  // constant, so the sample average must land on the deterministic score.
  for (double key_bias : {3.0, -3.0}) {
    zero_tensor(ps, "attn_q1.w");
    fill_tensor(ps, "attn_q1.b", 3.0);
    zero_tensor(ps, "attn_k1.w");
    fill_tensor(ps, "attn_k1.b", key_bias);
    EdgeMaskDistribution dist = edge_logits(sub, ps, cfg);
    for (double p : dist.keep_prob) CHECK(std::min(p, 1.0 - p) < 1e-4);

    ReduceConfig sharp = cfg;
    sharp.tau = 0.02;
    double mc = 0.0;
    const int n = 400;
    for (int s = 0; s < n; ++s) {
      mc += forward_loss(sub, 1.0, ps, sharp, 5000 + s, false).p_hat;
    }
    mc /= n;
    CHECK(std::abs(mc - infer(sub, ps, sharp).score) < 1e-3);
  }
}

TEST_CASE("training is reproducible and histories carry validation scores") {
  Graph g = community_pair(5);
  SplitSpec split = split_edges(g, 0.15, 0.2, 9);
  Graph tg = train_graph(g, split);
  InflatedGraph ig = inflate(tg, heuristic_scorer(HeuristicKind::RA), 3);

  ReduceConfig cfg = tiny_config();
  cfg.epochs = 3;
  cfg.patience = 3;
  TrainResult a = train(ig, split, cfg, 20);
  TrainResult b = train(ig, split, cfg, 20);

  REQUIRE(a.history.size() == b.history.size());
  CHECK(a.history == b.history);
  CHECK(a.best_epoch == b.best_epoch);
  CHECK(a.best_valid == b.best_valid);
  for (const auto& [name, m] : a.params.tensors) {
    CHECK(m == b.params.tensors.at(name));
  }
  for (const EpochStats& s : a.history) {
    CHECK(std::isfinite(s.mean_loss));
    CHECK(s.valid_hits >= 0.0);
  }

  TrainResult c = train(ig, split, cfg, 21);
  bool any_diff = false;
  for (const auto& [name, m] : a.params.tensors) {
    if (!(m == c.params.tensors.at(name))) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("training rejects positives that are not original edges") {
  Graph g = community_pair(4);
  SplitSpec split = split_edges(g, 0.15, 0.2, 4);
  Graph tg = train_graph(g, split);
  InflatedGraph ig = inflate(tg, heuristic_scorer(HeuristicKind::RA), 2);

  SplitSpec poisoned = split;
  REQUIRE(ig.added > 0);
  for (EdgeId e = 0; e < ig.base.num_edges(); ++e) {
    if (ig.is_inflated(e)) {
      poisoned.train_pos.push_back(ig.base.edge(e));
      break;
    }
  }
  ReduceConfig cfg = tiny_config();
  CHECK_THROWS_WITH_AS(train(ig, poisoned, cfg, 1),
                       doctest::Contains("positive edge missing from the original graph"),
                       std::runtime_error);
}

TEST_CASE("non-finite parameters trip the training fault and divergence path") {
  Graph g = community_pair(4);
  SplitSpec split = split_edges(g, 0.15, 0.2, 8);
  Graph tg = train_graph(g, split);
  InflatedGraph ig = plain_inflated(tg);
  ReduceConfig cfg = tiny_config();

  ModelParams poisoned = make_params(input_dim(ig.base), cfg, 2);
  fill_tensor(poisoned, "pred1.b", std::numeric_limits<double>::quiet_NaN());

  EnclosingSubgraph sub = extract(ig, split.train_pos[0].u, split.train_pos[0].v, 1, 16);
  CHECK_THROWS_AS(forward_loss(sub, 1.0, poisoned, cfg, 1, false), TrainingFault);

  TrainResult r = train(ig, split, cfg, 5, &poisoned);
  CHECK(r.diverged);
  CHECK(r.history.empty());
}

TEST_CASE("strong prior pressure pulls keep-probabilities toward gamma") {
  Graph g = community_pair(5);
  SplitSpec split = split_edges(g, 0.15, 0.2, 12);
  Graph tg = train_graph(g, split);
  InflatedGraph ig = plain_inflated(tg);

  ReduceConfig cfg = tiny_config();
  cfg.beta = 100.0;
  cfg.gamma_ori = 0.2;
  cfg.gamma_ext = 0.2;
  cfg.lr = 0.02;
  cfg.epochs = 40;
  cfg.patience = 40;
  cfg.eval_every = 10;
  TrainResult r = train(ig, split, cfg, 33);
  REQUIRE(!r.diverged);

  double sum = 0.0;
  std::size_t count = 0;
  for (const Edge& e : split.train_pos) {
    EnclosingSubgraph sub = extract(ig, e.u, e.v, cfg.hops, cfg.max_nodes);
    for (double w : infer(sub, r.params, cfg).weights) {
      sum += w;
      ++count;
    }
  }
  REQUIRE(count > 0);
  CHECK(std::abs(sum / static_cast<double>(count) - cfg.gamma_ori) < 0.1);
}

TEST_CASE("exported weights are per-edge means over covering subgraphs") {
  // community_pair(4) plus a far component no evaluation pair reaches
  std::vector<Edge> base = community_pair(4).edges();
  base.push_back({8, 9});
  Graph g(10, std::move(base));
  InflatedGraph ig = inflate(g, heuristic_scorer(HeuristicKind::RA), 2);
  ReduceConfig cfg = tiny_config();
  ModelParams ps = make_params(input_dim(ig.base), cfg, 19);

  std::vector<Edge> pairs = {{0, 1}, {1, 2}, {4, 5}, {0, 4}};
  Graph aug = export_augmented_graph(ig, ps, cfg, pairs);
  REQUIRE(aug.num_edges() == ig.base.num_edges());
  REQUIRE(aug.is_weighted());

  std::vector<double> sum(ig.base.num_edges(), 0.0);
  std::vector<std::size_t> count(ig.base.num_edges(), 0);
  for (const Edge& pr : pairs) {
    EnclosingSubgraph sub = extract(ig, pr.u, pr.v, cfg.hops, cfg.max_nodes);
    InferResult inf = infer(sub, ps, cfg);
    for (std::size_t i = 0; i < sub.edges.size(); ++i) {
      sum[sub.edges[i].global_id] += inf.weights[i];
      ++count[sub.edges[i].global_id];
    }
  }
  bool some_untouched = false, some_touched = false;
  for (EdgeId e = 0; e < aug.num_edges(); ++e) {
    if (count[e] == 0) {
      some_untouched = true;
      CHECK(aug.edge_weight(e) == 1.0);
    } else {
      some_touched = true;
      CHECK(aug.edge_weight(e) ==
            doctest::Approx(sum[e] / static_cast<double>(count[e])).epsilon(1e-12));
    }
  }
  CHECK(some_untouched);
  CHECK(some_touched);

  zero_tensor(ps, "attn_q1.w");
  zero_tensor(ps, "attn_q1.b");
  Graph half = export_augmented_graph(ig, ps, cfg, pairs);
  for (EdgeId e = 0; e < half.num_edges(); ++e) {
    if (count[e] > 0) CHECK(half.edge_weight(e) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("mask disagreement reports population stds over repeat appearances") {
  Graph g = community_pair(4);
  InflatedGraph ig = plain_inflated(g);
  ReduceConfig cfg = tiny_config();
  ModelParams ps = make_params(input_dim(ig.base), cfg, 29);

  std::vector<Edge> pairs = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  std::map<EdgeId, std::vector<double>> seen;
  for (const Edge& pr : pairs) {
    EnclosingSubgraph sub = extract(ig, pr.u, pr.v, cfg.hops, cfg.max_nodes);
    InferResult inf = infer(sub, ps, cfg);
    for (std::size_t i = 0; i < sub.edges.size(); ++i)
      seen[sub.edges[i].global_id].push_back(inf.weights[i]);
  }

  std::vector<EdgeDisagreement> got = mask_disagreement(ig, ps, cfg, pairs);
  std::size_t expected = 0;
  for (const auto& [e, ws] : seen)
    if (ws.size() >= 2) ++expected;
  REQUIRE(got.size() == expected);
  for (const EdgeDisagreement& d : got) {
    const std::vector<double>& ws = seen.at(d.edge);
    REQUIRE(d.appearances == ws.size());
    double mean = 0.0;
    for (double w : ws) mean += w;
    mean /= static_cast<double>(ws.size());
    double var = 0.0;
    for (double w : ws) var += (w - mean) * (w - mean);
    var /= static_cast<double>(ws.size());
    CHECK(d.stddev == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  }

  zero_tensor(ps, "attn_q1.w");
  zero_tensor(ps, "attn_q1.b");
  for (const EdgeDisagreement& d : mask_disagreement(ig, ps, cfg, pairs)) {
    CHECK(d.stddev == doctest::Approx(0.0).epsilon(1e-15));
  }
}
