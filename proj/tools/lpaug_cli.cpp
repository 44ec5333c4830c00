// Command-line front end: one subcommand per pipeline stage, file formats
// shared with the library loaders.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lpaug/complete.hpp"
#include "lpaug/config.hpp"
#include "lpaug/evalharness.hpp"
#include "lpaug/graph.hpp"
#include "lpaug/heuristics.hpp"
#include "lpaug/reduce.hpp"
#include "lpaug/subgraph.hpp"

namespace {

using namespace lpaug;

Graph read_graph(const std::string& edges, const std::string& features, bool weighted) {
  LoadedGraph lg = weighted ? load_weighted_edge_list(edges) : load_edge_list(edges);
  if (!features.empty()) lg.graph.attach_features(load_features(features));
  return std::move(lg.graph);
}

// Key descriptions for the help footer. Every config key appears here; the
// search ranges are the recommended sweep values for tuning.
struct KeyDoc {
  const char* key;
  const char* text;
};

constexpr KeyDoc kKeyDocs[] = {
    {"dataset.edges", "edge list path, one 'u v' (or 'u v w') line per edge"},
    {"dataset.features", "optional node feature matrix, one row per node"},
    {"dataset.weighted", "read a third weight column from the edge list"},
    {"split.valid_frac", "fraction of edges held out for validation"},
    {"split.test_frac", "fraction of edges held out for testing"},
    {"split.seed", "seed fixing the split and its frozen negatives"},
    {"complete.scorer", "candidate scorer: CN, AA, or RA"},
    {"complete.k", "top-scored candidate edges to add; search 1000-2000 on plain graphs, 16000-32000 on attributed ones"},
    {"reduce.beta", "weight of the compression term; search {1, 0.1, 0.01}"},
    {"reduce.gamma_ori", "keep prior for original edges; search {0.8, 0.5, 0.2}"},
    {"reduce.gamma_ext", "keep prior for added edges; search {0.8, 0.5, 0.2}"},
    {"reduce.tau", "relaxed Bernoulli temperature"},
    {"reduce.hops", "enclosing subgraph radius"},
    {"reduce.hidden", "encoder width"},
    {"reduce.attn_dim", "attention projection width"},
    {"reduce.edge_emb_dim", "origin/bucket embedding width"},
    {"reduce.encoder_layers", "message passing layers"},
    {"reduce.epochs", "training epoch cap"},
    {"reduce.patience", "early stop after this many non-improving checks"},
    {"reduce.lr", "Adam step size"},
    {"reduce.negatives_per_positive", "sampled negatives per positive edge"},
    {"reduce.batch_size", "positive edges per optimizer step"},
    {"reduce.max_nodes", "node cap per enclosing subgraph"},
    {"reduce.sampling", "mask granularity: edgewise or nodewise"},
    {"reduce.eval_every", "epochs between validation checks"},
    {"reduce.valid_hits_k", "K of the validation Hits@K objective"},
    {"reduce.train_cap", "positive edges consumed per epoch, 0 = all"},
    {"eval.ks", "Hits@K cutoffs to report, comma separated"},
    {"eval.seeds", "run seeds, comma separated; metrics average over them"},
    {"eval.perturb_rate", "fraction of train edges flipped before training"},
    {"mode.method", "full, complete_only, reduce_only, backbone, or heuristic"},
    {"mode.heuristic", "scorer used when mode.method = heuristic"},
    {"mode.no_sample", "use keep-probabilities directly, nothing sampled"},
    {"mode.beta_zero", "drop the compression term"},
    {"mode.nodewise", "sample node masks instead of edge masks"},
    {"mode.no_attention", "learned constant query instead of the pooled one"},
    {"mode.no_edge_label", "zero the origin/bucket edge embedding"},
    {"threads", "worker threads; only 1 is supported"},
    {"out_dir", "directory receiving metrics.json"},
};

std::string config_footer() {
  RunConfig defaults = default_config();
  std::ostringstream out;
  out << "Config keys (current defaults; override with --set key=value or env LPAUG_A_B for key a.b):\n";
  for (const auto& [key, value] : config_items(defaults)) {
    const char* text = "";
    for (const KeyDoc& d : kKeyDocs)
      if (key == d.key) text = d.text;
    out << "  " << key << " = " << (value.empty() ? "(unset)" : value) << "\n      " << text << "\n";
  }
  return out.str();
}

void require_single_thread(int threads) {
  if (threads != 1) throw std::runtime_error("threads: only single-threaded execution is supported");
}

RunConfig assemble_config(const std::string& path, const std::vector<std::string>& sets,
                          const std::string& mode) {
  RunConfig cfg = path.empty() ? default_config() : load_config(path);
  if (!mode.empty()) apply_overrides(cfg, {"mode.method=" + mode});
  apply_overrides(cfg, sets);
  return cfg;
}

struct Pipeline {
  Graph graph;
  SplitSpec split;
  InflatedGraph inflated;
  ReduceConfig rcfg;
};

Pipeline build_pipeline(const RunConfig& cfg) {
  validate_config(cfg, true);
  Pipeline p;
  p.graph = read_graph(cfg.dataset.edges, cfg.dataset.features, cfg.dataset.weighted);
  p.split = split_edges(p.graph, cfg.split.valid_frac, cfg.split.test_frac, cfg.split.seed);
  Graph tg = train_graph(p.graph, p.split);
  ScoreFn scorer = heuristic_scorer(parse_heuristic(cfg.complete.scorer));
  p.inflated = inflate(tg, scorer, effective_k(cfg));
  p.rcfg = effective_reduce_config(cfg);
  return p;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

std::string history_json(const TrainResult& tr) {
  nlohmann::ordered_json j;
  j["best_epoch"] = tr.best_epoch;
  j["best_valid"] = tr.best_valid;
  j["diverged"] = tr.diverged;
  j["epochs"] = nlohmann::ordered_json::array();
  for (const EpochStats& e : tr.history) {
    nlohmann::ordered_json je;
    je["epoch"] = e.epoch;
    je["mean_loss"] = e.mean_loss;
    je["mean_bce"] = e.mean_bce;
    je["mean_kl"] = e.mean_kl;
    je["valid_hits"] = e.valid_hits;
    j["epochs"].push_back(je);
  }
  return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage link prediction augmentation: inflate a training graph with"
               " top-scored candidates, then learn per-link edge masks."};
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 1;
  app.add_option("--threads", threads, "worker threads; only 1 is supported");

  std::string footer = config_footer();

  // split
  auto* split_cmd = app.add_subcommand("split", "Partition an edge list into train/valid/test with frozen negatives");
  std::string sp_edges, sp_out;
  bool sp_weighted = false;
  double sp_valid = 0.1, sp_test = 0.2;
  std::uint64_t sp_seed = 1;
  split_cmd->add_option("--edges", sp_edges, "edge list path")->required();
  split_cmd->add_flag("--weighted", sp_weighted, "edge list has a weight column");
  split_cmd->add_option("--valid", sp_valid, "validation fraction")->capture_default_str();
  split_cmd->add_option("--test", sp_test, "test fraction")->capture_default_str();
  split_cmd->add_option("--seed", sp_seed, "split seed")->capture_default_str();
  split_cmd->add_option("--out", sp_out, "output split file")->required();
  split_cmd->callback([&] {
    require_single_thread(threads);
    Graph g = read_graph(sp_edges, "", sp_weighted);
    SplitSpec s = split_edges(g, sp_valid, sp_test, sp_seed);
    save_split(s, sp_out);
    std::cout << "split: train=" << s.train_pos.size() << " valid=" << s.valid_pos.size()
              << " test=" << s.test_pos.size() << " -> " << sp_out << "\n";
  });

  // complete
  auto* complete_cmd = app.add_subcommand("complete", "Add the top-k scored candidate edges to a graph");
  std::string co_edges, co_split, co_scorer = "RA", co_out;
  bool co_weighted = false;
  long long co_k = 0;
  complete_cmd->add_option("--edges", co_edges, "edge list path")->required();
  complete_cmd->add_flag("--weighted", co_weighted, "edge list has a weight column");
  complete_cmd->add_option("--split", co_split, "split file; restricts inflation to the train graph");
  complete_cmd->add_option("--scorer", co_scorer, "candidate scorer: CN, AA, RA")->capture_default_str();
  complete_cmd->add_option("-k,--top-k", co_k, "candidate edges to add")->required();
  complete_cmd->add_option("--out", co_out, "output inflated edge file")->required();
  complete_cmd->callback([&] {
    require_single_thread(threads);
    Graph g = read_graph(co_edges, "", co_weighted);
    if (!co_split.empty()) g = train_graph(g, load_split(co_split));
    InflatedGraph ig = inflate(g, heuristic_scorer(parse_heuristic(co_scorer)), co_k);
    save_inflated(ig, co_out);
    std::cout << "complete: added=" << ig.added << " shortfall=" << ig.shortfall() << " -> "
              << co_out << "\n";
  });

  // heuristic
  auto* heur_cmd = app.add_subcommand("heuristic", "Score a split's test pairs with a neighborhood heuristic");
  std::string he_graph, he_split, he_kind = "RA", he_out;
  bool he_weighted = false;
  std::vector<int> he_ks = {20, 50, 100};
  heur_cmd->add_option("--graph", he_graph, "edge list path")->required();
  heur_cmd->add_flag("--weighted", he_weighted, "edge list has a weight column");
  heur_cmd->add_option("--split", he_split, "split file")->required();
  heur_cmd->add_option("--kind", he_kind, "CN, AA, or RA")->capture_default_str();
  heur_cmd->add_option("--ks", he_ks, "Hits@K cutoffs")->delimiter(',');
  heur_cmd->add_option("--out", he_out, "metrics file; stdout when omitted");
  heur_cmd->callback([&] {
    require_single_thread(threads);
    Graph g = read_graph(he_graph, "", he_weighted);
    SplitSpec s = load_split(he_split);
    Graph tg = train_graph(g, s);
    HeuristicKind kind = parse_heuristic(he_kind);
    std::vector<double> ps = score_batch(tg, kind, s.test_pos);
    std::vector<double> ns = score_batch(tg, kind, s.test_neg);
    nlohmann::ordered_json j;
    j["kind"] = heuristic_name(kind);
    j["num_pos"] = s.test_pos.size();
    j["num_neg"] = s.test_neg.size();
    j["hits_at"] = nlohmann::ordered_json::object();
    for (int k : he_ks)
      if (static_cast<std::size_t>(k) <= ns.size())
        j["hits_at"][std::to_string(k)] = hits_at_k(ps, ns, static_cast<std::size_t>(k));
    std::string body = j.dump(2) + "\n";
    if (he_out.empty())
      std::cout << body;
    else {
      write_text(he_out, body);
      std::cout << "heuristic: " << heuristic_name(kind) << " -> " << he_out << "\n";
    }
  });

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the edge pruner on a config's dataset");
  train_cmd->footer(footer);
  std::string tr_config, tr_mode, tr_checkpoint, tr_history;
  std::vector<std::string> tr_sets;
  std::uint64_t tr_seed = 0;
  train_cmd->add_option("--config", tr_config, "config file")->required();
  train_cmd->add_option("--set", tr_sets, "override, key=value; repeatable");
  train_cmd->add_option("--mode", tr_mode, "shorthand for --set mode.method=...");
  train_cmd->add_option("--seed", tr_seed, "training seed; default first eval.seeds entry");
  train_cmd->add_option("--checkpoint", tr_checkpoint, "output parameter file")->required();
  train_cmd->add_option("--history", tr_history, "optional training history file");
  train_cmd->callback([&] {
    require_single_thread(threads);
    RunConfig cfg = assemble_config(tr_config, tr_sets, tr_mode);
    cfg.threads = threads;
    Pipeline p = build_pipeline(cfg);
    std::uint64_t seed = train_cmd->count("--seed") ? tr_seed : cfg.eval.seeds.front();
    TrainResult tr = train(p.inflated, p.split, p.rcfg, seed);
    save_checkpoint(tr.params, tr_checkpoint);
    if (!tr_history.empty()) write_text(tr_history, history_json(tr));
    std::cout << "train: epochs=" << tr.history.size() << " best_epoch=" << tr.best_epoch
              << " best_valid=" << tr.best_valid << " diverged=" << (tr.diverged ? 1 : 0)
              << " -> " << tr_checkpoint << "\n";
  });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Run the full experiment and write metrics.json");
  eval_cmd->footer(footer);
  std::string ev_config, ev_mode;
  std::vector<std::string> ev_sets;
  eval_cmd->add_option("--config", ev_config, "config file")->required();
  eval_cmd->add_option("--set", ev_sets, "override, key=value; repeatable");
  eval_cmd->add_option("--mode", ev_mode, "shorthand for --set mode.method=...");
  eval_cmd->callback([&] {
    require_single_thread(threads);
    RunConfig cfg = assemble_config(ev_config, ev_sets, ev_mode);
    cfg.threads = threads;
    validate_config(cfg, true);
    ExperimentResult res = run_experiment(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    std::string path = cfg.out_dir + "/metrics.json";
    write_text(path, metrics_json(cfg, res));
    for (const auto& [k, mean] : res.summary.mean)
      std::cout << "hits@" << k << " mean=" << mean << " std=" << res.summary.stddev.at(k) << "\n";
    std::cout << "eval: runs=" << res.summary.runs << " -> " << path << "\n";
  });

  // augment
  auto* aug_cmd = app.add_subcommand("augment", "Export the pruner-weighted augmented graph");
  aug_cmd->footer(footer);
  std::string au_config, au_mode, au_checkpoint, au_out;
  std::vector<std::string> au_sets;
  std::uint64_t au_seed = 0;
  bool au_threshold = false;
  aug_cmd->add_option("--config", au_config, "config file")->required();
  aug_cmd->add_option("--set", au_sets, "override, key=value; repeatable");
  aug_cmd->add_option("--mode", au_mode, "shorthand for --set mode.method=...");
  aug_cmd->add_option("--checkpoint", au_checkpoint, "reuse trained parameters instead of training");
  aug_cmd->add_option("--seed", au_seed, "training seed; default first eval.seeds entry");
  aug_cmd->add_flag("--thresholded", au_threshold, "keep edges with weight >= 0.5 at weight 1, drop the rest");
  aug_cmd->add_option("--out", au_out, "output edge list")->required();
  aug_cmd->callback([&] {
    require_single_thread(threads);
    RunConfig cfg = assemble_config(au_config, au_sets, au_mode);
    cfg.threads = threads;
    Pipeline p = build_pipeline(cfg);
    ModelParams params;
    if (au_checkpoint.empty()) {
      std::uint64_t seed = aug_cmd->count("--seed") ? au_seed : cfg.eval.seeds.front();
      params = train(p.inflated, p.split, p.rcfg, seed).params;
    } else {
      params = load_checkpoint(au_checkpoint);
    }
    std::vector<Edge> pairs = p.split.test_pos;
    pairs.insert(pairs.end(), p.split.test_neg.begin(), p.split.test_neg.end());
    Graph aug = export_augmented_graph(p.inflated, params, p.rcfg, pairs);
    if (au_threshold) {
      std::vector<Edge> kept;
      for (EdgeId e = 0; e < aug.num_edges(); ++e)
        if (aug.edge_weight(e) >= 0.5) kept.push_back(aug.edge(e));
      Graph thresholded(aug.num_nodes(), kept);
      save_edge_list(thresholded, au_out);
      std::cout << "augment: edges=" << thresholded.num_edges() << " of " << aug.num_edges()
                << " kept -> " << au_out << "\n";
    } else {
      save_weighted_edge_list(aug, au_out);
      std::cout << "augment: edges=" << aug.num_edges() << " weighted -> " << au_out << "\n";
    }
  });

  // perturb
  auto* pert_cmd = app.add_subcommand("perturb", "Flip a fraction of a graph's edges at random");
  std::string pe_edges, pe_out;
  bool pe_weighted = false;
  double pe_rate = 0.0;
  std::uint64_t pe_seed = 1;
  pert_cmd->add_option("--edges", pe_edges, "edge list path")->required();
  pert_cmd->add_flag("--weighted", pe_weighted, "edge list has a weight column");
  pert_cmd->add_option("--rate", pe_rate, "fraction of edges to flip")->required();
  pert_cmd->add_option("--seed", pe_seed, "perturbation seed")->capture_default_str();
  pert_cmd->add_option("--out", pe_out, "output edge list")->required();
  pert_cmd->callback([&] {
    require_single_thread(threads);
    Graph g = read_graph(pe_edges, "", pe_weighted);
    PerturbResult r = perturb_edges(g, pe_rate, pe_seed);
    if (r.graph.is_weighted())
      save_weighted_edge_list(r.graph, pe_out);
    else
      save_edge_list(r.graph, pe_out);
    std::cout << "perturb: removed=" << r.removed << " added=" << r.added
              << " shortfall=" << r.shortfall << " -> " << pe_out << "\n";
  });

  // config
  auto* config_cmd = app.add_subcommand("config", "Print or check an experiment config");
  config_cmd->footer(footer);
  std::string cf_config, cf_mode;
  std::vector<std::string> cf_sets;
  bool cf_dump = false, cf_check = false;
  config_cmd->add_option("--config", cf_config, "config file; defaults when omitted");
  config_cmd->add_option("--set", cf_sets, "override, key=value; repeatable");
  config_cmd->add_option("--mode", cf_mode, "shorthand for --set mode.method=...");
  config_cmd->add_flag("--dump", cf_dump, "print the full config body");
  config_cmd->add_flag("--check", cf_check, "validate, including referenced files");
  config_cmd->callback([&] {
    require_single_thread(threads);
    RunConfig cfg = assemble_config(cf_config, cf_sets, cf_mode);
    cfg.threads = threads;
    if (cf_check) {
      validate_config(cfg, true);
      std::cout << "config ok\n";
    }
    if (cf_dump || !cf_check) std::cout << dump_config(cfg);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
