#include "lpaug/evalharness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "json.hpp"
#include "lpaug/rng.hpp"
#include "lpaug/subgraph.hpp"

namespace lpaug {

double hits_at_k(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores,
                 std::size_t k) {
  if (k == 0) throw std::invalid_argument("hits_at_k: k must be positive");
  if (neg_scores.size() < k)
    throw std::invalid_argument("hits_at_k: need at least k negative scores, have " +
                                std::to_string(neg_scores.size()) + " for k=" + std::to_string(k));
  if (pos_scores.empty()) throw std::invalid_argument("hits_at_k: no positive scores");
  std::vector<double> sorted = neg_scores;
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end(), std::greater<>());
  double threshold = sorted[k - 1];
  std::size_t hits = 0;
  for (double s : pos_scores)
    if (s > threshold) ++hits;
  return static_cast<double>(hits) / static_cast<double>(pos_scores.size());
}

PerturbResult perturb_edges(const Graph& g, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw std::invalid_argument("perturb_edges: rate must be in [0,1]");
  std::size_t total = static_cast<std::size_t>(
      std::ceil(rate * static_cast<double>(g.num_edges())));
  std::size_t removals = (total + 1) / 2;
  std::size_t additions = total / 2;
  removals = std::min(removals, g.num_edges());

  std::vector<std::size_t> order(g.num_edges());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, "perturb.remove"));
  rng.shuffle(order);

  std::vector<char> dropped(g.num_edges(), 0);
  for (std::size_t i = 0; i < removals; ++i) dropped[order[i]] = 1;

  std::vector<Edge> kept;
  std::vector<double> kept_w;
  kept.reserve(g.num_edges() - removals + additions);
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (dropped[e]) continue;
    kept.push_back(g.edge(e));
    kept_w.push_back(g.edge_weight(e));
  }

  PerturbResult out;
  out.removed = removals;
  std::vector<Edge> fresh;
  if (additions > 0) {
    try {
      fresh = sample_negatives(g, additions, {}, derive_seed(seed, "perturb.add"));
    } catch (const std::exception&) {
      // not enough free non-edges: take every one there is
      for (NodeId u = 0; u + 1 < g.num_nodes(); ++u)
        for (NodeId v = u + 1; v < g.num_nodes(); ++v)
          if (!g.has_edge(u, v)) fresh.push_back(Edge{u, v});
      Rng pick(derive_seed(seed, "perturb.add"));
      pick.shuffle(fresh);
      if (fresh.size() > additions) fresh.resize(additions);
    }
  }
  out.added = fresh.size();
  out.shortfall = additions - fresh.size();
  for (const Edge& e : fresh) {
    kept.push_back(e);
    kept_w.push_back(1.0);
  }

  if (g.is_weighted())
    out.graph = Graph(g.num_nodes(), std::move(kept), std::move(kept_w));
  else
    out.graph = Graph(g.num_nodes(), std::move(kept));
  if (g.has_features()) out.graph.attach_features(g.features());
  return out;
}

MetricsSummary summarize(const std::vector<MetricsReport>& reports) {
  MetricsSummary s;
  s.runs = reports.size();
  if (reports.empty()) return s;
  for (const auto& [k, v] : reports.front().hits_at) {
    bool everywhere = true;
    for (const MetricsReport& r : reports)
      if (!r.hits_at.count(k)) everywhere = false;
    if (!everywhere) continue;
    double mean = 0.0;
    for (const MetricsReport& r : reports) mean += r.hits_at.at(k);
    mean /= static_cast<double>(reports.size());
    double var = 0.0;
    for (const MetricsReport& r : reports) {
      double d = r.hits_at.at(k) - mean;
      var += d * d;
    }
    var /= static_cast<double>(reports.size());
    s.mean[k] = mean;
    s.stddev[k] = std::sqrt(var);
  }
  return s;
}

namespace {

template <typename F>
auto stage(const char* name, std::uint64_t seed, F&& f) {
  try {
    return f();
  } catch (const std::exception& ex) {
    throw std::runtime_error("run_experiment: stage " + std::string(name) + ", seed " +
                             std::to_string(seed) + ": " + ex.what());
  }
}

std::vector<double> model_scores(const InflatedGraph& ig, const std::vector<Edge>& pairs,
                                 const ModelParams& params, const ReduceConfig& rcfg) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const Edge& e : pairs) {
    EnclosingSubgraph sub = extract(ig, e.u, e.v, rcfg.hops, rcfg.max_nodes);
    out.push_back(infer(sub, params, rcfg).score);
  }
  return out;
}

MetricsReport run_one_seed(const RunConfig& cfg, const Graph& g, const SplitSpec& split,
                           std::uint64_t run_seed) {
  auto t0 = std::chrono::steady_clock::now();
  ReduceConfig rcfg = effective_reduce_config(cfg);
  MetricsReport rep;
  rep.seed = run_seed;
  rep.num_pos = split.test_pos.size();
  rep.num_neg = split.test_neg.size();

  Graph tg = stage("train_graph", run_seed, [&] { return train_graph(g, split); });
  SplitSpec eff = split;
  if (cfg.eval.perturb_rate > 0.0) {
    tg = stage("perturb", run_seed, [&] {
      return perturb_edges(tg, cfg.eval.perturb_rate, derive_seed(run_seed, "perturb")).graph;
    });
    // the corrupted graph is what training observes; evaluation pairs stay clean
    eff.train_pos = tg.edges();
  }

  std::vector<double> pos_scores, neg_scores;
  if (cfg.mode.method == Method::Heuristic) {
    HeuristicKind kind = parse_heuristic(cfg.mode.heuristic);
    pos_scores = stage("heuristic", run_seed,
                       [&] { return score_batch(tg, kind, split.test_pos); });
    neg_scores = stage("heuristic", run_seed,
                       [&] { return score_batch(tg, kind, split.test_neg); });
  } else {
    InflatedGraph ig = stage("complete", run_seed, [&] {
      return inflate(tg, heuristic_scorer(parse_heuristic(cfg.complete.scorer)),
                     effective_k(cfg));
    });
    TrainResult tr = stage("train", run_seed, [&] { return train(ig, eff, rcfg, run_seed); });
    pos_scores = stage("eval", run_seed,
                       [&] { return model_scores(ig, split.test_pos, tr.params, rcfg); });
    neg_scores = stage("eval", run_seed,
                       [&] { return model_scores(ig, split.test_neg, tr.params, rcfg); });
  }

  for (int k : cfg.eval.ks) {
    if (static_cast<std::size_t>(k) <= neg_scores.size())
      rep.hits_at[k] = hits_at_k(pos_scores, neg_scores, static_cast<std::size_t>(k));
  }
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg) {
  validate_config(cfg, false);
  LoadedGraph lg = cfg.dataset.weighted ? load_weighted_edge_list(cfg.dataset.edges)
                                        : load_edge_list(cfg.dataset.edges);
  Graph g = std::move(lg.graph);
  if (!cfg.dataset.features.empty()) g.attach_features(load_features(cfg.dataset.features));
  SplitSpec split = split_edges(g, cfg.split.valid_frac, cfg.split.test_frac, cfg.split.seed);

  ExperimentResult res;
  for (std::uint64_t s : cfg.eval.seeds) res.reports.push_back(run_one_seed(cfg, g, split, s));
  res.summary = summarize(res.reports);
  return res;
}

ExperimentResult run_experiment_file(const std::string& config_path) {
  RunConfig cfg = load_config(config_path);
  validate_config(cfg, true);
  ExperimentResult res = run_experiment(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  std::string path = cfg.out_dir + "/metrics.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << metrics_json(cfg, res);
  return res;
}

std::string metrics_json(const RunConfig& cfg, const ExperimentResult& result) {
  nlohmann::ordered_json j;
  auto& jc = j["config"];
  for (const auto& [k, v] : config_items(cfg)) jc[k] = v;
  auto& runs = j["runs"];
  runs = nlohmann::ordered_json::array();
  for (const MetricsReport& r : result.reports) {
    nlohmann::ordered_json jr;
    jr["seed"] = r.seed;
    jr["num_pos"] = r.num_pos;
    jr["num_neg"] = r.num_neg;
    auto& h = jr["hits_at"];
    for (const auto& [k, v] : r.hits_at) h[std::to_string(k)] = v;
    jr["wall_time_seconds"] = r.wall_time_seconds;
    runs.push_back(std::move(jr));
  }
  auto& js = j["summary"];
  js["runs"] = result.summary.runs;
  auto& jm = js["mean"];
  for (const auto& [k, v] : result.summary.mean) jm[std::to_string(k)] = v;
  auto& jd = js["std"];
  for (const auto& [k, v] : result.summary.stddev) jd[std::to_string(k)] = v;
  return j.dump(2) + "\n";
}

namespace {

std::map<int, double> heuristic_hits(const Graph& g, HeuristicKind kind, const SplitSpec& split,
                                     const std::vector<int>& ks) {
  std::vector<double> ps = score_batch(g, kind, split.test_pos);
  std::vector<double> ns = score_batch(g, kind, split.test_neg);
  std::map<int, double> out;
  for (int k : ks)
    if (static_cast<std::size_t>(k) <= ns.size())
      out[k] = hits_at_k(ps, ns, static_cast<std::size_t>(k));
  return out;
}

}  // namespace

std::vector<TransferReport> transferability(const InflatedGraph& ig, const ModelParams& params,
                                            const ReduceConfig& cfg, const SplitSpec& split,
                                            const std::vector<int>& ks, bool thresholded) {
  Graph raw = strip_inflated(ig);
  std::vector<Edge> pairs = split.test_pos;
  pairs.insert(pairs.end(), split.test_neg.begin(), split.test_neg.end());
  Graph weighted = export_augmented_graph(ig, params, cfg, pairs);

  Graph augmented;
  if (thresholded) {
    std::vector<Edge> kept;
    for (EdgeId e = 0; e < weighted.num_edges(); ++e)
      if (weighted.edge_weight(e) >= 0.5) kept.push_back(weighted.edge(e));
    augmented = Graph(weighted.num_nodes(), std::move(kept));
  } else {
    augmented = std::move(weighted);
  }

  std::vector<TransferReport> out;
  for (HeuristicKind kind : {HeuristicKind::CN, HeuristicKind::AA, HeuristicKind::RA}) {
    TransferReport r;
    r.kind = kind;
    r.raw_hits = heuristic_hits(raw, kind, split, ks);
    r.augmented_hits = heuristic_hits(augmented, kind, split, ks);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lpaug
