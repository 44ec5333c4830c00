#include "lpaug/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "lpaug/evalharness.hpp"
#include "lpaug/rng.hpp"

namespace lpaug {

void ReduceConfig::validate() const {
  std::string bad;
  auto flag = [&](bool ok, const char* name) {
    if (!ok) bad += std::string(bad.empty() ? "" : ",") + name;
  };
  flag(beta >= 0.0, "beta");
  flag(gamma_ori > 0.0 && gamma_ori < 1.0, "gamma_ori");
  flag(gamma_ext > 0.0 && gamma_ext < 1.0, "gamma_ext");
  flag(tau > 0.0, "tau");
  flag(hops >= 1, "hops");
  flag(hidden >= 1, "hidden");
  flag(attn_dim >= 1, "attn_dim");
  flag(edge_emb_dim >= 1, "edge_emb_dim");
  flag(encoder_layers >= 1, "encoder_layers");
  flag(epochs >= 1, "epochs");
  flag(patience >= 1, "patience");
  flag(lr > 0.0, "lr");
  flag(negatives_per_positive >= 1, "negatives_per_positive");
  flag(batch_size >= 1, "batch_size");
  flag(max_nodes >= 2, "max_nodes");
  flag(eval_every >= 1, "eval_every");
  flag(valid_hits_k >= 1, "valid_hits_k");
  if (!bad.empty()) throw std::runtime_error("invalid reduce config fields: " + bad);
}

std::size_t input_dim(const Graph& g) {
  return 1 + (g.has_features() ? g.features().cols : 1);
}

ModelParams make_params(std::size_t in_dim, const ReduceConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ModelParams p;
  p.init_seed = seed;
  std::uint64_t idx = 0;
  auto add = [&](const std::string& name, std::size_t rows, std::size_t cols, std::size_t fan_in) {
    p.tensors[name] = uniform_init(rows, cols, fan_in, derive_seed(seed, "init", idx++));
  };
  std::size_t H = cfg.hidden;
  std::size_t A = cfg.attn_dim;
  std::size_t E = cfg.edge_emb_dim;
  for (int l = 0; l < cfg.encoder_layers; ++l) {
    std::size_t in = 2 * (l == 0 ? in_dim : H);
    std::string base = "enc" + std::to_string(l);
    add(base + ".w", in, H, in);
    add(base + ".b", 1, H, in);
  }
  // Rows: 0 original, 1 + rank bucket for added edges.
  add("edge_embed", 1 + kNumRankBuckets, E, E);
  add("attn_q0.w", H, H, H);
  add("attn_q0.b", 1, H, H);
  add("attn_q1.w", H, A, H);
  add("attn_q1.b", 1, A, H);
  add("attn_k0.w", 2 * H + E, H, 2 * H + E);
  add("attn_k0.b", 1, H, 2 * H + E);
  add("attn_k1.w", H, A, H);
  add("attn_k1.b", 1, A, H);
  add("attn_n0.w", H, H, H);
  add("attn_n0.b", 1, H, H);
  add("attn_n1.w", H, A, H);
  add("attn_n1.b", 1, A, H);
  add("attn_fixed_q", 1, A, A);
  add("pred0.w", 3 * H, H, 3 * H);
  add("pred0.b", 1, H, 3 * H);
  add("pred1.w", H, 1, H);
  add("pred1.b", 1, 1, H);
  return p;
}

namespace {

constexpr double kLogitClamp = 15.0;

std::size_t embed_row(EdgeOrigin origin, int bucket) {
  if (origin == EdgeOrigin::Original) return 0;
  return 1 + static_cast<std::size_t>(bucket);
}

Mat node_input(const EnclosingSubgraph& sub) {
  std::size_t n = sub.num_nodes();
  std::size_t fcols = sub.features.empty() ? 1 : sub.features.cols;
  Mat x(n, 1 + fcols);
  for (std::size_t i = 0; i < n; ++i) {
    x.at(i, 0) = sub.zero_one[i];
    if (sub.features.empty()) {
      x.at(i, 1) = 1.0;
    } else {
      for (std::size_t j = 0; j < fcols; ++j) x.at(i, 1 + j) = sub.features.row(i)[j];
    }
  }
  return x;
}

Var mlp2(Tape& t, const ModelParams& ps, Var x, const std::string& l0, const std::string& l1) {
  Var h = t.relu(t.add_rowvec(t.matmul(x, t.param(ps, l0 + ".w")), t.param(ps, l0 + ".b")));
  return t.add_rowvec(t.matmul(h, t.param(ps, l1 + ".w")), t.param(ps, l1 + ".b"));
}

/// Encoder stack: each layer concatenates the node state with the
/// (mask-weighted) neighbor mean and applies linear + ReLU. Both the unmasked
/// and masked passes call this with the same parameter names, so the encoder
/// is shared.
Var encode(Tape& t, const EnclosingSubgraph& sub, const ModelParams& ps, const ReduceConfig& cfg,
           Var h0, Var mask) {
  Var h = h0;
  for (int l = 0; l < cfg.encoder_layers; ++l) {
    Var agg = t.neighbor_mean(sub, h, mask);
    std::string base = "enc" + std::to_string(l);
    h = t.relu(t.add_rowvec(t.matmul(t.concat_cols({h, agg}), t.param(ps, base + ".w")),
                            t.param(ps, base + ".b")));
  }
  return h;
}

Var query_vec(Tape& t, const ModelParams& ps, const ReduceConfig& cfg, Var h) {
  if (cfg.no_attention) return t.param(ps, "attn_fixed_q");
  Var hg = t.mean_rows(h);
  return mlp2(t, ps, hg, "attn_q0", "attn_q1");
}

struct EdgeIndex {
  std::vector<std::size_t> us, vs, emb;
};

EdgeIndex edge_index(const EnclosingSubgraph& sub) {
  EdgeIndex ix;
  for (const SubgraphEdge& e : sub.edges) {
    ix.us.push_back(e.a);
    ix.vs.push_back(e.b);
    ix.emb.push_back(embed_row(e.origin, e.bucket));
  }
  return ix;
}

/// Symmetrized, clamped attention logits for every subgraph edge: key MLP on
/// [h_u ; h_v ; edge embedding] against the query, scaled by 1/sqrt(attn_dim),
/// averaged over both directions.
Var edge_logits_var(Tape& t, const EnclosingSubgraph& sub, const ModelParams& ps,
                    const ReduceConfig& cfg, Var h) {
  EdgeIndex ix = edge_index(sub);
  Var hu = t.gather_rows(h, ix.us);
  Var hv = t.gather_rows(h, ix.vs);
  Var emb = t.gather_rows(t.param(ps, "edge_embed"), ix.emb);
  if (cfg.no_edge_label) emb = t.scale(emb, 0.0);
  Var qT = t.transpose(query_vec(t, ps, cfg, h));
  Var a_uv = t.matmul(mlp2(t, ps, t.concat_cols({hu, hv, emb}), "attn_k0", "attn_k1"), qT);
  Var a_vu = t.matmul(mlp2(t, ps, t.concat_cols({hv, hu, emb}), "attn_k0", "attn_k1"), qT);
  double scale = 0.5 / std::sqrt(static_cast<double>(cfg.attn_dim));
  return t.clamp(t.scale(t.add(a_uv, a_vu), scale), -kLogitClamp, kLogitClamp);
}

/// Per-node attention logits for the nodewise sampling variant.
Var node_logits_var(Tape& t, const EnclosingSubgraph& sub, const ModelParams& ps,
                    const ReduceConfig& cfg, Var h) {
  (void)sub;
  Var qT = t.transpose(query_vec(t, ps, cfg, h));
  Var a = t.matmul(mlp2(t, ps, h, "attn_n0", "attn_n1"), qT);
  double scale = 1.0 / std::sqrt(static_cast<double>(cfg.attn_dim));
  return t.clamp(t.scale(a, scale), -kLogitClamp, kLogitClamp);
}

std::vector<double> concrete_noise(const EnclosingSubgraph& sub, std::uint64_t seed, bool nodewise) {
  std::vector<double> noise;
  if (nodewise) {
    noise.reserve(sub.num_nodes());
    for (NodeId local = 0; local < sub.num_nodes(); ++local) {
      double u = keyed_uniform(seed, derive_seed(0x6e6f6465ULL, sub.node_map[local]));
      noise.push_back(std::log(u) - std::log1p(-u));
    }
  } else {
    noise.reserve(sub.num_edges());
    for (const SubgraphEdge& e : sub.edges) {
      double u = keyed_uniform(seed, e.global_id);
      noise.push_back(std::log(u) - std::log1p(-u));
    }
  }
  return noise;
}

std::vector<double> gamma_per_edge(const EnclosingSubgraph& sub, const ReduceConfig& cfg) {
  std::vector<double> g;
  g.reserve(sub.num_edges());
  for (const SubgraphEdge& e : sub.edges) {
    g.push_back(e.origin == EdgeOrigin::Original ? cfg.gamma_ori : cfg.gamma_ext);
  }
  return g;
}

struct ForwardVars {
  Var loss = Tape::kNoVar;
  Var bce = Tape::kNoVar;
  Var kl = Tape::kNoVar;
  Var pred_logit = Tape::kNoVar;
  Var keep_prob = Tape::kNoVar;
};

/// Shared forward graph for training and inference. In expectation mode the
/// mask equals the keep-probabilities and no noise is drawn.
ForwardVars build_forward(Tape& t, const EnclosingSubgraph& sub, double label,
                          const ModelParams& ps, const ReduceConfig& cfg, std::uint64_t seed,
                          bool expectation) {
  cfg.validate();
  Mat x = node_input(sub);
  std::size_t H = cfg.hidden;
  if (ps.at("enc0.w").rows != 2 * x.cols) {
    throw std::runtime_error("forward: parameter input width does not match subgraph features");
  }
  Var h0 = t.constant(std::move(x));
  Var h = encode(t, sub, ps, cfg, h0, Tape::kNoVar);

  bool nodewise = cfg.sampling == SamplingMode::Nodewise;
  bool need_mask_model = !cfg.force_mask_one || cfg.beta != 0.0;
  ForwardVars out;
  Var mask = Tape::kNoVar;

  if (sub.num_edges() > 0 && need_mask_model) {
    EdgeIndex ix = edge_index(sub);
    Var p_edge;
    Var omega;
    if (nodewise) {
      Var nlog = node_logits_var(t, sub, ps, cfg, h);
      Var p_node = t.sigmoid(nlog);
      p_edge = t.mul_elem(t.gather_rows(p_node, ix.us), t.gather_rows(p_node, ix.vs));
      if (cfg.no_sample || expectation) {
        omega = p_edge;
      } else {
        Var w_node = t.binary_concrete(nlog, concrete_noise(sub, seed, true), cfg.tau);
        omega = t.mul_elem(t.gather_rows(w_node, ix.us), t.gather_rows(w_node, ix.vs));
      }
    } else {
      Var elog = edge_logits_var(t, sub, ps, cfg, h);
      p_edge = t.sigmoid(elog);
      if (cfg.no_sample || expectation) {
        omega = p_edge;
      } else {
        omega = t.binary_concrete(elog, concrete_noise(sub, seed, false), cfg.tau);
      }
    }
    out.keep_prob = p_edge;
    if (!cfg.force_mask_one) mask = omega;
    if (cfg.beta != 0.0) out.kl = t.bernoulli_kl_sum(p_edge, gamma_per_edge(sub, cfg));
  }

  Var h_masked = encode(t, sub, ps, cfg, h0, mask);
  Var pooled = t.mean_rows(h_masked);
  Var head = t.concat_cols({t.gather_rows(h_masked, {0}), t.gather_rows(h_masked, {1}), pooled});
  (void)H;
  out.pred_logit = mlp2(t, ps, head, "pred0", "pred1");
  out.bce = t.bce_with_logit(out.pred_logit, label);
  out.loss = out.kl == Tape::kNoVar ? out.bce : t.add(out.bce, t.scale(out.kl, cfg.beta));
  return out;
}

EdgeMaskDistribution distribution_from(const EnclosingSubgraph& sub, const std::vector<double>& p) {
  EdgeMaskDistribution dist;
  dist.keep_prob = p;
  dist.logits.reserve(p.size());
  dist.origin.reserve(sub.num_edges());
  for (double x : p) dist.logits.push_back(std::log(x) - std::log1p(-x));
  for (const SubgraphEdge& e : sub.edges) dist.origin.push_back(e.origin);
  return dist;
}

std::vector<double> keep_prob_values(Tape& t, const ForwardVars& fw) {
  if (fw.keep_prob == Tape::kNoVar) return {};
  return t.val(fw.keep_prob).a;
}

}  // namespace

EdgeMaskDistribution edge_logits(const EnclosingSubgraph& sub, const ModelParams& params,
                                 const ReduceConfig& cfg) {
  if (cfg.sampling == SamplingMode::Nodewise) {
    throw std::runtime_error("edge_logits: config selects nodewise sampling; call nodewise_logits");
  }
  if (sub.num_edges() == 0) return {};
  Tape t;
  Var h0 = t.constant(node_input(sub));
  Var h = encode(t, sub, params, cfg, h0, Tape::kNoVar);
  Var elog = edge_logits_var(t, sub, params, cfg, h);
  Var p = t.sigmoid(elog);
  EdgeMaskDistribution dist;
  dist.logits = t.val(elog).a;
  dist.keep_prob = t.val(p).a;
  for (const SubgraphEdge& e : sub.edges) dist.origin.push_back(e.origin);
  return dist;
}

EdgeMaskDistribution nodewise_logits(const EnclosingSubgraph& sub, const ModelParams& params,
                                     const ReduceConfig& cfg) {
  if (sub.num_edges() == 0) return {};
  Tape t;
  Var h0 = t.constant(node_input(sub));
  Var h = encode(t, sub, params, cfg, h0, Tape::kNoVar);
  Var nlog = node_logits_var(t, sub, params, cfg, h);
  Var p_node = t.sigmoid(nlog);
  EdgeIndex ix = edge_index(sub);
  Var p_edge = t.mul_elem(t.gather_rows(p_node, ix.us), t.gather_rows(p_node, ix.vs));
  return distribution_from(sub, t.val(p_edge).a);
}

double kl_regularizer_value(const EdgeMaskDistribution& dist, const ReduceConfig& cfg) {
  if (cfg.gamma_ori <= 0.0 || cfg.gamma_ori >= 1.0 || cfg.gamma_ext <= 0.0 || cfg.gamma_ext >= 1.0) {
    throw std::runtime_error("kl_regularizer: gamma outside (0,1)");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    double p = dist.keep_prob[i];
    double g = dist.origin[i] == EdgeOrigin::Original ? cfg.gamma_ori : cfg.gamma_ext;
    total += p * std::log(p / g) + (1.0 - p) * std::log((1.0 - p) / (1.0 - g));
  }
  return total;
}

LossResult forward_loss(const EnclosingSubgraph& sub, double label, const ModelParams& params,
                        const ReduceConfig& cfg, std::uint64_t seed, bool with_grads) {
  Tape t;
  ForwardVars fw = build_forward(t, sub, label, params, cfg, seed, false);
  LossResult r;
  r.loss = t.val(fw.loss).a[0];
  r.bce = t.val(fw.bce).a[0];
  r.kl = fw.kl == Tape::kNoVar ? 0.0 : t.val(fw.kl).a[0];
  r.p_hat = 1.0 / (1.0 + std::exp(-t.val(fw.pred_logit).a[0]));
  r.keep_prob = keep_prob_values(t, fw);
  if (!std::isfinite(r.loss)) {
    throw TrainingFault("forward_loss: non-finite loss (bce=" + std::to_string(r.bce) +
                        ", kl=" + std::to_string(r.kl) + ")");
  }
  if (with_grads) {
    t.backward(fw.loss);
    r.grads = t.param_grads();
  }
  return r;
}

InferResult infer(const EnclosingSubgraph& sub, const ModelParams& params,
                  const ReduceConfig& cfg) {
  Tape t;
  ForwardVars fw = build_forward(t, sub, 0.0, params, cfg, 0, true);
  InferResult r;
  r.score = 1.0 / (1.0 + std::exp(-t.val(fw.pred_logit).a[0]));
  r.weights = keep_prob_values(t, fw);
  if (r.weights.empty() && sub.num_edges() > 0) {
    // Backbone configs skip the pruner; expected weights are all-keep.
    r.weights.assign(sub.num_edges(), 1.0);
  }
  return r;
}

namespace {

void accumulate(GradMap& into, const GradMap& grads, double scale) {
  for (const auto& [name, g] : grads) {
    auto it = into.find(name);
    if (it == into.end()) {
      Mat m = g;
      for (double& x : m.a) x *= scale;
      into.emplace(name, std::move(m));
    } else {
      for (std::size_t i = 0; i < g.size(); ++i) it->second.a[i] += scale * g.a[i];
    }
  }
}

bool finite(const GradMap& grads) {
  for (const auto& [name, g] : grads) {
    for (double x : g.a) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

double valid_hits(const std::vector<EnclosingSubgraph>& pos, const std::vector<EnclosingSubgraph>& neg,
                  const ModelParams& params, const ReduceConfig& cfg) {
  std::vector<double> ps, ns;
  ps.reserve(pos.size());
  ns.reserve(neg.size());
  for (const auto& s : pos) ps.push_back(infer(s, params, cfg).score);
  for (const auto& s : neg) ns.push_back(infer(s, params, cfg).score);
  if (ns.empty() || ps.empty()) return 0.0;
  std::size_t k = std::min<std::size_t>(cfg.valid_hits_k, ns.size());
  return hits_at_k(ps, ns, k);
}

}  // namespace

TrainResult train(const InflatedGraph& ig, const SplitSpec& split, const ReduceConfig& cfg,
                  std::uint64_t seed, const ModelParams* warm_start) {
  cfg.validate();
  if (split.train_pos.empty()) throw std::runtime_error("train: no training positives");

  // Training labels must never touch an added edge: positives predate
  // inflation, and negatives are rejected against the inflated adjacency.
  for (const Edge& e : split.train_pos) {
    EdgeId id = ig.base.edge_id(e.u, e.v);
    if (id == kNoEdge || ig.is_inflated(id)) {
      throw std::runtime_error("train: positive edge missing from the original graph");
    }
  }

  ModelParams params =
      warm_start ? *warm_start : make_params(input_dim(ig.base), cfg, derive_seed(seed, "init"));
  Adam opt(cfg.lr);

  std::vector<EnclosingSubgraph> pos_subs =
      batch_extract(ig, split.train_pos, cfg.hops, cfg.max_nodes);
  std::vector<EnclosingSubgraph> vpos = batch_extract(ig, split.valid_pos, cfg.hops, cfg.max_nodes);
  std::vector<EnclosingSubgraph> vneg = batch_extract(ig, split.valid_neg, cfg.hops, cfg.max_nodes);

  TrainResult result;
  ModelParams last_good = params;
  ModelParams best = params;
  std::size_t n_pos = split.train_pos.size();
  std::size_t cap = cfg.train_cap == 0 ? n_pos : std::min(cfg.train_cap, n_pos);
  int npp = cfg.negatives_per_positive;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<std::size_t> order(n_pos);
    for (std::size_t i = 0; i < n_pos; ++i) order[i] = i;
    Rng shuffler(derive_seed(seed, "order", static_cast<std::uint64_t>(epoch)));
    shuffler.shuffle(order);
    order.resize(cap);

    std::vector<Edge> negs =
        sample_negatives(ig.base, cap * static_cast<std::size_t>(npp), {},
                         derive_seed(seed, "negs", static_cast<std::uint64_t>(epoch)));
    for (const Edge& e : negs) {
      if (ig.base.has_edge(e.u, e.v)) {
        throw std::runtime_error("train: negative collides with an edge of the inflated graph");
      }
    }

    double sum_loss = 0.0, sum_bce = 0.0, sum_kl = 0.0;
    std::size_t seen = 0;
    GradMap batch_grads;
    std::size_t in_batch = 0;
    bool diverged = false;

    auto flush = [&]() {
      if (in_batch == 0) return;
      for (auto& [name, g] : batch_grads) {
        for (double& x : g.a) x /= static_cast<double>(in_batch);
      }
      opt.step(params, batch_grads);
      batch_grads.clear();
      in_batch = 0;
    };

    std::uint64_t noise_root = derive_seed(seed, "noise", static_cast<std::uint64_t>(epoch));
    auto step_one = [&](const EnclosingSubgraph& sub, double label, const Edge& target) {
      std::uint64_t sub_seed =
          derive_seed(noise_root, (static_cast<std::uint64_t>(target.u) << 32) | target.v);
      LossResult lr;
      try {
        lr = forward_loss(sub, label, params, cfg, sub_seed, true);
      } catch (const TrainingFault&) {
        diverged = true;
        return;
      }
      if (!finite(lr.grads)) {
        diverged = true;
        return;
      }
      sum_loss += lr.loss;
      sum_bce += lr.bce;
      sum_kl += lr.kl;
      ++seen;
      accumulate(batch_grads, lr.grads, 1.0);
      if (++in_batch >= cfg.batch_size * static_cast<std::size_t>(1 + npp)) flush();
    };

    for (std::size_t oi = 0; oi < order.size() && !diverged; ++oi) {
      step_one(pos_subs[order[oi]], 1.0, split.train_pos[order[oi]]);
      for (int t = 0; t < npp && !diverged; ++t) {
        const Edge& ne = negs[oi * static_cast<std::size_t>(npp) + static_cast<std::size_t>(t)];
        EnclosingSubgraph nsub = extract(ig, ne.u, ne.v, cfg.hops, cfg.max_nodes);
        step_one(nsub, 0.0, ne);
      }
    }

    if (diverged) {
      result.params = result.best_epoch >= 0 ? best : last_good;
      result.diverged = true;
      return result;
    }
    flush();
    last_good = params;

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = seen ? sum_loss / static_cast<double>(seen) : 0.0;
    stats.mean_bce = seen ? sum_bce / static_cast<double>(seen) : 0.0;
    stats.mean_kl = seen ? sum_kl / static_cast<double>(seen) : 0.0;

    bool evaluate = epoch % cfg.eval_every == 0 || epoch == cfg.epochs;
    if (evaluate && !vpos.empty() && !vneg.empty()) {
      stats.valid_hits = valid_hits(vpos, vneg, params, cfg);
      if (stats.valid_hits > result.best_valid) {
        result.best_valid = stats.valid_hits;
        result.best_epoch = epoch;
        best = params;
      }
    }
    result.history.push_back(stats);
    if (result.best_epoch >= 0 && epoch - result.best_epoch >= cfg.patience) break;
  }

  result.params = result.best_epoch >= 0 ? best : params;
  return result;
}

Graph export_augmented_graph(const InflatedGraph& ig, const ModelParams& params,
                             const ReduceConfig& cfg, const std::vector<Edge>& pairs) {
  std::vector<double> sum(ig.base.num_edges(), 0.0);
  std::vector<std::size_t> count(ig.base.num_edges(), 0);
  for (const Edge& pr : pairs) {
    EnclosingSubgraph sub = extract(ig, pr.u, pr.v, cfg.hops, cfg.max_nodes);
    InferResult r = infer(sub, params, cfg);
    for (std::size_t i = 0; i < sub.edges.size(); ++i) {
      sum[sub.edges[i].global_id] += r.weights[i];
      ++count[sub.edges[i].global_id];
    }
  }
  std::vector<Edge> edges = ig.base.edges();
  std::vector<double> weights(edges.size(), 1.0);
  for (EdgeId e = 0; e < edges.size(); ++e) {
    if (count[e] > 0) weights[e] = sum[e] / static_cast<double>(count[e]);
  }
  return Graph(ig.base.num_nodes(), std::move(edges), std::move(weights));
}

std::vector<EdgeDisagreement> mask_disagreement(const InflatedGraph& ig, const ModelParams& params,
                                                const ReduceConfig& cfg,
                                                const std::vector<Edge>& pairs) {
  std::map<EdgeId, std::vector<double>> seen;
  for (const Edge& pr : pairs) {
    EnclosingSubgraph sub = extract(ig, pr.u, pr.v, cfg.hops, cfg.max_nodes);
    InferResult r = infer(sub, params, cfg);
    for (std::size_t i = 0; i < sub.edges.size(); ++i) {
      seen[sub.edges[i].global_id].push_back(r.weights[i]);
    }
  }
  std::vector<EdgeDisagreement> out;
  for (const auto& [edge, ps] : seen) {
    if (ps.size() < 2) continue;
    double mean = 0.0;
    for (double p : ps) mean += p;
    mean /= static_cast<double>(ps.size());
    double var = 0.0;
    for (double p : ps) var += (p - mean) * (p - mean);
    var /= static_cast<double>(ps.size());
    EdgeDisagreement d;
    d.edge = edge;
    d.appearances = ps.size();
    d.stddev = std::sqrt(var);
    out.push_back(d);
  }
  return out;
}

}  // namespace lpaug
