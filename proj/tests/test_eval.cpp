#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lpaug/config.hpp"
#include "lpaug/evalharness.hpp"
#include "lpaug/graph.hpp"
#include "lpaug/heuristics.hpp"
#include "lpaug/reduce.hpp"
#include "lpaug/rng.hpp"
#include "lpaug/synthetic.hpp"

using namespace lpaug;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const char* name, const std::string& content = "") {
    path = std::string("tmp_eval_") + name;
    if (!content.empty()) {
      std::ofstream out(path);
      out << content;
    }
  }
  ~TempFile() { std::remove(path.c_str()); }
};

// Rank-counting restatement of the metric: a positive hits iff fewer than k
// negatives score at or above it.
double hits_oracle(const std::vector<double>& pos, const std::vector<double>& neg, std::size_t k) {
  std::size_t hits = 0;
  for (double p : pos) {
    std::size_t at_or_above = 0;
    for (double n : neg)
      if (n >= p) ++at_or_above;
    if (at_or_above < k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pos.size());
}

std::string strip_wall_time(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("wall_time") == std::string::npos) out << line << "\n";
  }
  return out.str();
}

std::string edge_list_text(const Graph& g) {
  std::ostringstream os;
  for (const Edge& e : g.edges()) os << e.u << " " << e.v << "\n";
  return os.str();
}

}  // namespace

TEST_CASE("hits metric pinned examples and tie rule") {
  std::vector<double> sixty(60, 0.1);
  CHECK(hits_at_k({0.9}, sixty, 50) == 1.0);
  CHECK(hits_at_k({0.1}, sixty, 50) == 0.0);

  std::vector<double> neg = {0.6, 0.4, 0.3};
  CHECK(hits_at_k({0.5, 0.9}, neg, 1) == 0.5);
  CHECK(hits_at_k({0.5, 0.9}, neg, 2) == 1.0);

  CHECK_THROWS(hits_at_k({0.5}, neg, 4));
  CHECK_THROWS(hits_at_k({0.5}, neg, 0));
  CHECK_THROWS(hits_at_k({}, neg, 1));
}

TEST_CASE("hits metric equals the rank-counting oracle on random score sets") {
  Rng rng(404);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t np = 1 + rng.below(12);
    std::size_t nn = 1 + rng.below(40);
    std::size_t k = 1 + rng.below(nn);
    std::vector<double> pos, neg;
    // coarse grid forces threshold ties
    for (std::size_t i = 0; i < np; ++i) pos.push_back(0.1 * static_cast<double>(rng.below(11)));
    for (std::size_t i = 0; i < nn; ++i) neg.push_back(0.1 * static_cast<double>(rng.below(11)));
    CHECK(hits_at_k(pos, neg, k) == hits_oracle(pos, neg, k));
  }
}

TEST_CASE("hits values are monotone nondecreasing in K") {
  Rng rng(405);
  std::vector<double> pos, neg;
  for (int i = 0; i < 30; ++i) pos.push_back(rng.uniform());
  for (int i = 0; i < 80; ++i) neg.push_back(rng.uniform());
  double prev = 0.0;
  for (std::size_t k = 1; k <= neg.size(); ++k) {
    double h = hits_at_k(pos, neg, k);
    CHECK(h >= prev);
    prev = h;
  }
}

TEST_CASE("perturbation flips the requested number of slots") {
  Graph g = standin_router();
  CHECK(perturb_edges(g, 0.0, 7).graph == g);

  std::vector<Edge> hundred;
  for (NodeId u = 0; u < 25; ++u)
    for (NodeId v = u + 1; v < 25; ++v)
      if (hundred.size() < 100) hundred.push_back({u, v});
  Graph h(25, hundred);
  REQUIRE(h.num_edges() == 100);

  PerturbResult r = perturb_edges(h, 0.5, 3);
  CHECK(r.removed == 25);
  CHECK(r.added == 25);
  CHECK(r.shortfall == 0);
  CHECK(r.graph.num_edges() == 100);
  CHECK(r.graph.num_nodes() == 25);

  // odd slot count favors removals
  PerturbResult odd = perturb_edges(h, 0.05, 3);
  CHECK(odd.removed == 3);
  CHECK(odd.added == 2);

  std::size_t kept = 0, fresh = 0;
  for (const Edge& e : r.graph.edges()) {
    if (h.has_edge(e.u, e.v)) ++kept;
    else ++fresh;
  }
  CHECK(kept == 75);
  CHECK(fresh == 25);

  CHECK(perturb_edges(h, 0.5, 3).graph == r.graph);
  CHECK_FALSE(perturb_edges(h, 0.5, 4).graph == r.graph);
  CHECK_THROWS(perturb_edges(h, 1.5, 1));
}

TEST_CASE("perturbation on a complete graph records the addition shortfall") {
  std::vector<Edge> all;
  for (NodeId u = 0; u < 8; ++u)
    for (NodeId v = u + 1; v < 8; ++v) all.push_back({u, v});
  Graph k8(8, all);
  PerturbResult r = perturb_edges(k8, 1.0, 9);
  CHECK(r.removed == 14);
  // the 14 removals free exactly 14 slots for additions
  CHECK(r.added + r.shortfall == 14);
  CHECK(r.graph.num_nodes() == 8);
  for (const Edge& e : r.graph.edges()) CHECK(e.u < e.v);
}

TEST_CASE("perturbation carries weights and features through") {
  Graph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}}, {0.9, 0.8, 0.7, 0.6, 0.5});
  FeatureMatrix f;
  f.rows = 5;
  f.cols = 1;
  f.data = {1, 2, 3, 4, 5};
  g.attach_features(f);

  PerturbResult r = perturb_edges(g, 0.4, 11);
  CHECK(r.graph.is_weighted());
  CHECK(r.graph.has_features());
  for (const Edge& e : r.graph.edges()) {
    double w = r.graph.weight_between(e.u, e.v);
    if (g.has_edge(e.u, e.v)) {
      CHECK(w == g.weight_between(e.u, e.v));
    } else {
      CHECK(w == 1.0);
    }
  }
}

TEST_CASE("summary reports per-K means and population stds") {
  MetricsReport a, b;
  a.hits_at = {{20, 0.5}, {50, 0.7}};
  b.hits_at = {{20, 0.9}, {50, 0.7}, {100, 1.0}};
  MetricsSummary s = summarize({a, b});
  CHECK(s.runs == 2);
  CHECK(s.mean.at(20) == doctest::Approx(0.7));
  CHECK(s.stddev.at(20) == doctest::Approx(0.2));
  CHECK(s.stddev.at(50) == doctest::Approx(0.0));
  CHECK(s.mean.count(100) == 0);  // not present in every run
}

TEST_CASE("config defaults survive a dump, load, override round trip") {
  RunConfig def = default_config();
  TempFile f("roundtrip.cfg", dump_config(def));
  RunConfig loaded = load_config(f.path);
  CHECK(dump_config(loaded) == dump_config(def));

  apply_overrides(loaded, {"reduce.beta=0.5", "mode.method=backbone", "eval.ks=10,20"});
  CHECK(loaded.reduce.beta == 0.5);
  CHECK(loaded.mode.method == Method::Backbone);
  CHECK(loaded.eval.ks == std::vector<int>{10, 20});

  CHECK_THROWS_WITH_AS(apply_overrides(loaded, {"no.such.key=1", "reduce.beta=abc"}),
                       doctest::Contains("no.such.key"), std::runtime_error);
  try {
    apply_overrides(loaded, {"no.such.key=1", "reduce.beta=abc"});
  } catch (const std::exception& ex) {
    CHECK(std::string(ex.what()).find("reduce.beta") != std::string::npos);
  }
}

TEST_CASE("environment variables override config keys") {
  RunConfig cfg = default_config();
  setenv("LPAUG_REDUCE_TAU", "0.25", 1);
  setenv("LPAUG_MODE_NODEWISE", "true", 1);
  apply_env_overrides(cfg);
  unsetenv("LPAUG_REDUCE_TAU");
  unsetenv("LPAUG_MODE_NODEWISE");
  CHECK(cfg.reduce.tau == 0.25);
  CHECK(cfg.mode.nodewise);
}

TEST_CASE("config validation names every violated field including missing files") {
  RunConfig cfg = default_config();
  cfg.split.valid_frac = 0.9;
  cfg.split.test_frac = 0.3;
  cfg.eval.perturb_rate = 2.0;
  cfg.dataset.edges = "definitely_absent_file.txt";
  try {
    validate_config(cfg, true);
    FAIL("expected rejection");
  } catch (const std::exception& ex) {
    std::string msg = ex.what();
    CHECK(msg.find("split.valid_frac") != std::string::npos);
    CHECK(msg.find("eval.perturb_rate") != std::string::npos);
    CHECK(msg.find("dataset.edges") != std::string::npos);
  }
}

TEST_CASE("methods fold into the reduce settings") {
  RunConfig cfg = default_config();
  cfg.mode.method = Method::Backbone;
  ReduceConfig r = effective_reduce_config(cfg);
  CHECK(r.force_mask_one);
  CHECK(r.beta == 0.0);
  CHECK(effective_k(cfg) == 0);

  cfg.mode.method = Method::CompleteOnly;
  cfg.complete.k = 40;
  r = effective_reduce_config(cfg);
  CHECK(r.force_mask_one);
  CHECK(effective_k(cfg) == 40);

  cfg.mode.method = Method::Full;
  cfg.mode.no_sample = true;
  cfg.mode.no_attention = true;
  r = effective_reduce_config(cfg);
  CHECK_FALSE(r.force_mask_one);
  CHECK(r.no_sample);
  CHECK(r.no_attention);
  CHECK(effective_k(cfg) == 40);

  cfg.mode.method = Method::ReduceOnly;
  cfg.mode.beta_zero = true;
  r = effective_reduce_config(cfg);
  CHECK(r.beta == 0.0);
  CHECK_FALSE(r.force_mask_one);
  CHECK(effective_k(cfg) == 0);
}

TEST_CASE("heuristic experiments have zero variance across seeds") {
  Graph g = planted_two_communities(20, 0.3, 0.2, 5).graph;
  TempFile f("cnrun.edges", edge_list_text(g));

  RunConfig cfg = default_config();
  cfg.dataset.edges = f.path;
  cfg.mode.method = Method::Heuristic;
  cfg.mode.heuristic = "CN";
  cfg.eval.ks = {5, 10};
  cfg.eval.seeds = {1, 2, 3};
  cfg.split.seed = 77;

  ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.reports.size() == 3);
  CHECK(res.summary.stddev.at(5) == 0.0);
  CHECK(res.summary.stddev.at(10) == 0.0);
  CHECK(res.reports[0].hits_at == res.reports[2].hits_at);
  CHECK(res.reports[0].num_pos == res.reports[1].num_pos);
  for (const MetricsReport& r : res.reports) {
    for (const auto& [k, v] : r.hits_at) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("model experiments are reproducible and write stable metrics files") {
  Graph g = planted_two_communities(12, 0.4, 0.1, 9).graph;
  TempFile f("run.edges", edge_list_text(g));

  RunConfig cfg = default_config();
  cfg.dataset.edges = f.path;
  cfg.mode.method = Method::Full;
  cfg.complete.k = 10;
  cfg.reduce.hidden = 4;
  cfg.reduce.attn_dim = 3;
  cfg.reduce.edge_emb_dim = 2;
  cfg.reduce.encoder_layers = 1;
  cfg.reduce.hops = 1;
  cfg.reduce.max_nodes = 16;
  cfg.reduce.epochs = 2;
  cfg.reduce.patience = 2;
  cfg.eval.ks = {5};
  cfg.eval.seeds = {4, 5};
  cfg.split.seed = 11;

  ExperimentResult a = run_experiment(cfg);
  ExperimentResult b = run_experiment(cfg);
  REQUIRE(a.reports.size() == 2);
  CHECK(a.reports[0].hits_at == b.reports[0].hits_at);
  CHECK(a.reports[1].hits_at == b.reports[1].hits_at);
  CHECK(a.summary.mean.at(5) == b.summary.mean.at(5));

  std::string ja = strip_wall_time(metrics_json(cfg, a));
  std::string jb = strip_wall_time(metrics_json(cfg, b));
  CHECK(ja == jb);
  CHECK(ja.find("\"config\"") != std::string::npos);
  CHECK(ja.find("\"runs\"") != std::string::npos);
  CHECK(ja.find("\"summary\"") != std::string::npos);

  // perturbation path stays reproducible too
  cfg.eval.perturb_rate = 0.3;
  ExperimentResult p1 = run_experiment(cfg);
  ExperimentResult p2 = run_experiment(cfg);
  CHECK(p1.reports[0].hits_at == p2.reports[0].hits_at);
}

TEST_CASE("experiment file runner writes metrics next to the out dir") {
  Graph g = planted_two_communities(10, 0.5, 0.1, 3).graph;
  TempFile data("filerun.edges", edge_list_text(g));

  RunConfig cfg = default_config();
  cfg.dataset.edges = data.path;
  cfg.mode.method = Method::Heuristic;
  cfg.mode.heuristic = "RA";
  cfg.eval.ks = {5};
  cfg.eval.seeds = {1};
  cfg.out_dir = "tmp_eval_outdir";
  TempFile conf("filerun.cfg", dump_config(cfg));

  ExperimentResult res = run_experiment_file(conf.path);
  CHECK(res.reports.size() == 1);
  std::ifstream in("tmp_eval_outdir/metrics.json");
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(strip_wall_time(ss.str()) == strip_wall_time(metrics_json(cfg, res)));
  in.close();
  std::remove("tmp_eval_outdir/metrics.json");
  std::filesystem::remove("tmp_eval_outdir");
}

TEST_CASE("experiment failures name the stage and seed") {
  RunConfig cfg = default_config();
  cfg.dataset.edges = "missing.edges";
  CHECK_THROWS(run_experiment(cfg));

  Graph g = planted_two_communities(10, 0.5, 0.1, 3).graph;
  TempFile data("stagefail.edges", edge_list_text(g));
  cfg.dataset.edges = data.path;
  cfg.mode.method = Method::Full;
  cfg.reduce.hops = 1;
  cfg.reduce.max_nodes = 16;
  cfg.reduce.epochs = 1;
  cfg.reduce.hidden = 4;
  cfg.reduce.attn_dim = 2;
  cfg.reduce.edge_emb_dim = 2;
  cfg.reduce.encoder_layers = 1;
  cfg.eval.seeds = {6};
  cfg.complete.scorer = "RA";
  cfg.complete.k = -5;
  try {
    run_experiment(cfg);
    FAIL("expected rejection");
  } catch (const std::exception& ex) {
    std::string msg = ex.what();
    CHECK(msg.find("complete.k") != std::string::npos);
  }
}

TEST_CASE("all-keep export scores exactly like the raw graph") {
  Graph g = planted_two_communities(12, 0.4, 0.15, 21).graph;
  SplitSpec split = split_edges(g, 0.1, 0.2, 13);
  Graph tg = train_graph(g, split);
  InflatedGraph ig = inflate(tg, heuristic_scorer(HeuristicKind::RA), 0);

  ReduceConfig cfg;
  cfg.hidden = 4;
  cfg.attn_dim = 3;
  cfg.edge_emb_dim = 2;
  cfg.encoder_layers = 1;
  cfg.hops = 1;
  cfg.max_nodes = 16;
  cfg.force_mask_one = true;
  cfg.beta = 0.0;
  ModelParams ps = make_params(input_dim(ig.base), cfg, 77);

  std::vector<int> ks = {5, 10};
  std::vector<TransferReport> reps = transferability(ig, ps, cfg, split, ks, false);
  REQUIRE(reps.size() == 3);
  for (const TransferReport& r : reps) {
    CHECK(r.raw_hits == r.augmented_hits);
  }
}

TEST_CASE("uniform half weights leave common-neighbor rankings unchanged") {
  Graph g = planted_two_communities(12, 0.4, 0.15, 22).graph;
  SplitSpec split = split_edges(g, 0.1, 0.2, 14);
  Graph tg = train_graph(g, split);

  std::vector<Edge> pairs = split.test_pos;
  pairs.insert(pairs.end(), split.test_neg.begin(), split.test_neg.end());

  std::vector<double> half(tg.num_edges(), 0.5);
  Graph weighted(tg.num_nodes(), tg.edges(), half);

  std::vector<double> raw = score_batch(tg, HeuristicKind::CN, pairs);
  std::vector<double> scaled = score_batch(weighted, HeuristicKind::CN, pairs);
  REQUIRE(raw.size() == scaled.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(scaled[i] == doctest::Approx(0.25 * raw[i]).epsilon(1e-12));
  }

  std::vector<double> rp(raw.begin(), raw.begin() + split.test_pos.size());
  std::vector<double> rn(raw.begin() + split.test_pos.size(), raw.end());
  std::vector<double> sp(scaled.begin(), scaled.begin() + split.test_pos.size());
  std::vector<double> sn(scaled.begin() + split.test_pos.size(), scaled.end());
  for (std::size_t k : {1u, 5u, 10u}) {
    CHECK(hits_at_k(rp, rn, k) == hits_at_k(sp, sn, k));
  }
}

TEST_CASE("ranking is invariant under positive weight scaling for CN and RA") {
  Rng rng(515);
  PlantedGraph pg = planted_two_communities(10, 0.5, 0.3, 31);
  const Graph& base = pg.graph;
  std::vector<double> w;
  for (std::size_t i = 0; i < base.num_edges(); ++i) w.push_back(0.1 + 0.9 * rng.uniform());
  Graph g1(base.num_nodes(), base.edges(), w);

  for (double c : {0.25, 0.5, 0.9}) {
    std::vector<double> wc;
    for (double x : w) wc.push_back(c * x);
    Graph gc(base.num_nodes(), base.edges(), wc);

    std::vector<Edge> pairs;
    std::vector<double> labels;
    for (int i = 0; i < 60; ++i) {
      NodeId u = static_cast<NodeId>(rng.below(base.num_nodes()));
      NodeId v = static_cast<NodeId>(rng.below(base.num_nodes()));
      if (u == v) continue;
      pairs.push_back({std::min(u, v), std::max(u, v)});
      labels.push_back(i % 2);
    }
    for (HeuristicKind kind : {HeuristicKind::CN, HeuristicKind::RA}) {
      std::vector<double> s1 = score_batch(g1, kind, pairs);
      std::vector<double> sc = score_batch(gc, kind, pairs);
      std::vector<double> p1, n1, pc, nc;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        (labels[i] ? p1 : n1).push_back(s1[i]);
        (labels[i] ? pc : nc).push_back(sc[i]);
      }
      for (std::size_t k : {1u, 3u, 10u}) {
        CHECK(hits_at_k(p1, n1, k) == hits_at_k(pc, nc, k));
      }
    }
  }
}

TEST_CASE("an oracle mask that downweights noise edges helps resource allocation") {
  PlantedGraph pg = planted_two_communities(50, 0.2, 0.2, 7);
  SplitSpec split = split_edges(pg.graph, 0.1, 0.2, 42);
  Graph tg = train_graph(pg.graph, split);

  std::set<Edge> noise(pg.noise_edges.begin(), pg.noise_edges.end());
  std::vector<double> w;
  for (const Edge& e : tg.edges()) w.push_back(noise.count(e) ? 0.1 : 1.0);
  Graph oracle(tg.num_nodes(), tg.edges(), w);

  std::vector<double> rp = score_batch(tg, HeuristicKind::RA, split.test_pos);
  std::vector<double> rn = score_batch(tg, HeuristicKind::RA, split.test_neg);
  std::vector<double> op = score_batch(oracle, HeuristicKind::RA, split.test_pos);
  std::vector<double> on = score_batch(oracle, HeuristicKind::RA, split.test_neg);

  double raw = hits_at_k(rp, rn, 20);
  double masked = hits_at_k(op, on, 20);
  INFO("raw ", raw, " masked ", masked);
  CHECK(masked >= raw);
}

TEST_CASE("thresholded transfer keeps only confident edges, unweighted") {
  Graph g = planted_two_communities(10, 0.5, 0.2, 33).graph;
  SplitSpec split = split_edges(g, 0.1, 0.2, 15);
  Graph tg = train_graph(g, split);
  InflatedGraph ig = inflate(tg, heuristic_scorer(HeuristicKind::RA), 5);

  ReduceConfig cfg;
  cfg.hidden = 4;
  cfg.attn_dim = 3;
  cfg.edge_emb_dim = 2;
  cfg.encoder_layers = 1;
  cfg.hops = 2;
  cfg.max_nodes = 40;
  ModelParams ps = make_params(input_dim(ig.base), cfg, 55);
  // constant saturated-low attention: every touched edge is dropped
  for (double& x : ps.at("attn_q1.w").a) x = 0.0;
  for (double& x : ps.at("attn_q1.b").a) x = 3.0;
  for (double& x : ps.at("attn_k1.w").a) x = 0.0;
  for (double& x : ps.at("attn_k1.b").a) x = -3.0;

  std::vector<Edge> pairs = split.test_pos;
  pairs.insert(pairs.end(), split.test_neg.begin(), split.test_neg.end());
  Graph weighted = export_augmented_graph(ig, ps, cfg, pairs);
  std::size_t touched = 0;
  for (EdgeId e = 0; e < weighted.num_edges(); ++e)
    if (weighted.edge_weight(e) < 0.5) ++touched;
  REQUIRE(touched > 0);

  std::vector<TransferReport> reps = transferability(ig, ps, cfg, split, {5}, true);
  REQUIRE(reps.size() == 3);
  // the thresholded graph drops every touched edge, so CN scores can only shrink
  std::vector<Edge> kept;
  for (EdgeId e = 0; e < weighted.num_edges(); ++e)
    if (weighted.edge_weight(e) >= 0.5) kept.push_back(weighted.edge(e));
  Graph pruned(weighted.num_nodes(), kept);
  std::vector<double> want_p = score_batch(pruned, HeuristicKind::CN, split.test_pos);
  std::vector<double> want_n = score_batch(pruned, HeuristicKind::CN, split.test_neg);
  CHECK(reps[0].augmented_hits.at(5) ==
        hits_at_k(want_p, want_n, 5));
}

TEST_CASE("synthetic stand-ins are deterministic and well formed") {
  CHECK(standin_cele() == standin_cele());
  CHECK(standin_usair() == standin_usair());
  CHECK(standin_yeast() == standin_yeast());
  CHECK(standin_router() == standin_router());
  CHECK_THROWS(standin_dataset("atlantis"));

  Graph cele = standin_cele();
  CHECK(cele.num_nodes() == 297);
  CHECK(cele.num_edges() > 1900);
  Graph usair = standin_usair();
  std::size_t maxdeg = 0;
  for (NodeId u = 0; u < usair.num_nodes(); ++u) maxdeg = std::max(maxdeg, usair.degree(u));
  CHECK(maxdeg > 40);  // hub structure

  PlantedGraph p = planted_two_communities(50, 0.2, 0.2, 7);
  CHECK(p.graph.num_nodes() == 100);
  CHECK(p.noise_edges.size() ==
        static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(p.clean_edges.size()))));
  for (const Edge& e : p.noise_edges) CHECK(p.graph.has_edge(e.u, e.v));
}
