#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lpaug/autodiff.hpp"
#include "lpaug/complete.hpp"
#include "lpaug/graph.hpp"
#include "lpaug/subgraph.hpp"

namespace lpaug {

/// Raised when a forward pass produces a non-finite loss; the training loop
/// reverts to the last good parameters on it.
struct TrainingFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SamplingMode { Edgewise, Nodewise };

/// Pruner hyperparameters and ablation switches. gamma_ori and gamma_ext are
/// the edge-keep priors for original and added edges; beta weighs the KL term
/// against the prediction loss.
struct ReduceConfig {
  double beta = 0.1;
  double gamma_ori = 0.5;
  double gamma_ext = 0.5;
  double tau = 1.0;
  int hops = 2;
  std::size_t hidden = 32;
  std::size_t attn_dim = 16;
  std::size_t edge_emb_dim = 8;
  int encoder_layers = 2;
  int epochs = 200;
  int patience = 20;
  double lr = 1e-3;
  int negatives_per_positive = 1;
  std::size_t batch_size = 32;
  std::size_t max_nodes = 200;
  SamplingMode sampling = SamplingMode::Edgewise;
  int eval_every = 1;
  int valid_hits_k = 50;
  /// Cap on positive units consumed per epoch (0 = all). A runtime control
  /// for small machines; the capped walk still follows the epoch shuffle.
  std::size_t train_cap = 0;

  bool no_sample = false;      // use keep-probabilities directly as the mask
  bool force_mask_one = false; // backbone: mask pinned to 1, pruner inert
  bool no_attention = false;   // learned constant query replaces Q(h_G)
  bool no_edge_label = false;  // zero the per-edge origin embedding

  void validate() const;
};

/// Per-edge mask distribution of one enclosing subgraph: symmetrized clamped
/// logits, keep-probabilities, and the origin flag selecting the prior.
struct EdgeMaskDistribution {
  std::vector<double> logits;
  std::vector<double> keep_prob;
  std::vector<EdgeOrigin> origin;

  std::size_t size() const { return keep_prob.size(); }
};

/// Fresh parameter store for the pruner-predictor model. in_dim is the node
/// input width: the zero-one label channel plus the feature columns, or plus
/// one constant channel when the graph has no features.
ModelParams make_params(std::size_t in_dim, const ReduceConfig& cfg, std::uint64_t seed);

std::size_t input_dim(const Graph& g);

/// Attention scores of every subgraph edge against the pooled subgraph
/// representation (query from the unmasked encoding; key from the edge
/// representation [h_u ; h_v ; origin embedding]), averaged over both edge
/// directions and clamped to [-15, 15].
EdgeMaskDistribution edge_logits(const EnclosingSubgraph& sub, const ModelParams& params,
                                 const ReduceConfig& cfg);

/// Per-node sampling variant: nodes are scored against the pooled
/// representation and an edge keeps probability p_u * p_v.
EdgeMaskDistribution nodewise_logits(const EnclosingSubgraph& sub, const ModelParams& params,
                                     const ReduceConfig& cfg);

/// Closed-form KL of the mask distribution against the Bernoulli prior,
/// summed over the subgraph's edges: p log(p/g) + (1-p) log((1-p)/(1-g)).
double kl_regularizer_value(const EdgeMaskDistribution& dist, const ReduceConfig& cfg);

struct LossResult {
  double loss = 0.0;
  double bce = 0.0;
  double kl = 0.0;
  double p_hat = 0.0;
  std::vector<double> keep_prob;  // per local edge
  GradMap grads;                  // filled when with_grads
};

/// One stochastic training forward: unmasked encode, edge scoring, relaxed
/// Bernoulli mask, masked re-encode through the same encoder parameters,
/// link prediction, BCE + beta * KL. Noise is keyed by (seed, edge global
/// id), so the loss of a subgraph does not depend on iteration order.
LossResult forward_loss(const EnclosingSubgraph& sub, double label, const ModelParams& params,
                        const ReduceConfig& cfg, std::uint64_t seed, bool with_grads);

struct InferResult {
  double score = 0.0;
  std::vector<double> weights;  // expected keep-probability per local edge
};

/// Deterministic forward: the mask is the expected value p, nothing sampled.
InferResult infer(const EnclosingSubgraph& sub, const ModelParams& params, const ReduceConfig& cfg);

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double mean_bce = 0.0;
  double mean_kl = 0.0;
  double valid_hits = -1.0;  // -1 when not evaluated this epoch

  friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

struct TrainResult {
  ModelParams params;  // best validation checkpoint
  std::vector<EpochStats> history;
  int best_epoch = -1;
  double best_valid = -1.0;
  bool diverged = false;
};

/// Full training loop: cached positive subgraphs, fresh uniform negatives
/// each epoch drawn against the inflated graph (so added edges are never
/// labeled), Adam steps over mini-batches, early stopping on validation
/// hits. Single-threaded and bitwise reproducible per seed. `warm_start`
/// resumes from existing parameters instead of a fresh initialization.
TrainResult train(const InflatedGraph& ig, const SplitSpec& split, const ReduceConfig& cfg,
                  std::uint64_t seed, const ModelParams* warm_start = nullptr);

/// Inflated graph re-weighted by the pruner: each edge's weight is its
/// keep-probability averaged over the evaluation subgraphs that contain it;
/// edges seen by none keep weight 1.
Graph export_augmented_graph(const InflatedGraph& ig, const ModelParams& params,
                             const ReduceConfig& cfg, const std::vector<Edge>& pairs);

struct EdgeDisagreement {
  EdgeId edge = kNoEdge;
  std::size_t appearances = 0;
  double stddev = 0.0;
};

/// Population standard deviation of each edge's keep-probability across the
/// subgraphs in `pairs`; edges appearing fewer than twice are omitted.
std::vector<EdgeDisagreement> mask_disagreement(const InflatedGraph& ig, const ModelParams& params,
                                                const ReduceConfig& cfg,
                                                const std::vector<Edge>& pairs);

}  // namespace lpaug
