#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpaug/heuristics.hpp"
#include "lpaug/reduce.hpp"

namespace lpaug {

enum class Method { Full, CompleteOnly, ReduceOnly, Backbone, Heuristic };

Method parse_method(const std::string& name);
std::string method_name(Method m);

/// Experiment description: one flat dotted-key file drives the whole
/// pipeline, so a run is reproducible from a single artifact.
struct RunConfig {
  struct Dataset {
    std::string edges;
    std::string features;
    bool weighted = false;
  } dataset;

  struct Split {
    double valid_frac = 0.1;
    double test_frac = 0.2;
    std::uint64_t seed = 1;
  } split;

  struct Complete {
    std::string scorer = "RA";
    long long k = 0;
  } complete;

  ReduceConfig reduce;

  struct Eval {
    std::vector<int> ks = {20, 50, 100};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    double perturb_rate = 0.0;
  } eval;

  struct Mode {
    Method method = Method::Full;
    std::string heuristic = "RA";
    bool no_sample = false;
    bool beta_zero = false;
    bool nodewise = false;
    bool no_attention = false;
    bool no_edge_label = false;
  } mode;

  int threads = 1;
  std::string out_dir = "out";
};

/// Built-in defaults (the values printed by `config --dump`).
RunConfig default_config();

/// Parses "key = value" lines ('#' comments and blank lines skipped), then
/// applies LPAUG_* environment overrides. Unknown keys and unparsable values
/// are reported together in one error line.
RunConfig load_config(const std::string& path);

/// Applies "key=value" strings on top of an existing config.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides);

/// Environment override for key a.b is LPAUG_A_B.
void apply_env_overrides(RunConfig& cfg);

/// Config file body with every key, in canonical order.
std::string dump_config(const RunConfig& cfg);

/// Every (key, value) pair in canonical order.
std::vector<std::pair<std::string, std::string>> config_items(const RunConfig& cfg);

/// Checks ranges, mode consistency, and (optionally) referenced files.
/// Throws one line naming every violated field.
void validate_config(const RunConfig& cfg, bool check_files);

/// Reduce-stage settings with the method and ablation switches folded in:
/// backbone and complete_only pin the mask to 1 and beta to 0; reduce_only
/// and full leave the pruner active; ablations toggle their flags.
ReduceConfig effective_reduce_config(const RunConfig& cfg);

/// Complete-stage k after the method is applied (0 unless the method
/// inflates the graph).
long long effective_k(const RunConfig& cfg);

}  // namespace lpaug
