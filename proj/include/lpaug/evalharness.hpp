#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lpaug/complete.hpp"
#include "lpaug/config.hpp"
#include "lpaug/graph.hpp"
#include "lpaug/heuristics.hpp"
#include "lpaug/reduce.hpp"

namespace lpaug {

/// Fraction of positives scored strictly above the k-th largest negative
/// score; a tie with the threshold counts as a miss.
double hits_at_k(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores,
                 std::size_t k);

struct PerturbResult {
  Graph graph;
  std::size_t removed = 0;
  std::size_t added = 0;
  std::size_t shortfall = 0;  // additions that found no free non-edge
};

/// Seeded random structural noise: ceil(rate * |E|) edge slots are flipped,
/// half removals of existing edges and half additions of uniform non-edges
/// (an odd count favors removals). Node count is preserved.
PerturbResult perturb_edges(const Graph& g, double rate, std::uint64_t seed);

struct MetricsReport {
  std::map<int, double> hits_at;
  std::size_t num_pos = 0;
  std::size_t num_neg = 0;
  std::uint64_t seed = 0;
  double wall_time_seconds = 0.0;
};

struct MetricsSummary {
  std::map<int, double> mean;
  std::map<int, double> stddev;  // population std across seeds
  std::size_t runs = 0;
};

MetricsSummary summarize(const std::vector<MetricsReport>& reports);

struct ExperimentResult {
  std::vector<MetricsReport> reports;
  MetricsSummary summary;
};

/// Full pipeline for every seed in the config: frozen split from split.seed,
/// optional perturbation of the train graph, inflation per the method, model
/// training (or direct heuristic scoring), test metrics. Single-threaded
/// runs are bitwise reproducible.
ExperimentResult run_experiment(const RunConfig& cfg);

/// Loads the config file, validates it, runs the experiment, and writes
/// <out_dir>/metrics.json.
ExperimentResult run_experiment_file(const std::string& config_path);

/// JSON report with config echo, per-seed blocks, and the summary. Key order
/// is fixed, so two runs differ only in the wall-time fields.
std::string metrics_json(const RunConfig& cfg, const ExperimentResult& result);

struct TransferReport {
  HeuristicKind kind = HeuristicKind::CN;
  std::map<int, double> raw_hits;        // heuristic on the raw train graph
  std::map<int, double> augmented_hits;  // heuristic on the exported weighted graph
};

/// Scores the split's test pairs with each heuristic on (a) the raw train
/// graph and (b) the pruner-weighted export of the inflated graph. With
/// `thresholded`, export weights >= 0.5 keep the edge at weight 1 and the
/// rest are dropped.
std::vector<TransferReport> transferability(const InflatedGraph& ig, const ModelParams& params,
                                            const ReduceConfig& cfg, const SplitSpec& split,
                                            const std::vector<int>& ks, bool thresholded);

}  // namespace lpaug
