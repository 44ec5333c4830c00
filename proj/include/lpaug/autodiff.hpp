#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lpaug/subgraph.hpp"

namespace lpaug {

/// Dense row-major matrix of doubles. Double precision throughout: the
/// gradient checks run at 1e-5 relative tolerance, which single precision
/// cannot hold.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  std::size_t size() const { return a.size(); }

  friend bool operator==(const Mat&, const Mat&) = default;
};

Mat uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in, std::uint64_t seed);

/// Named parameter store. std::map keeps iteration order stable so
/// initialization, optimizer sweeps, and checkpoints are reproducible.
struct ModelParams {
  std::map<std::string, Mat> tensors;
  std::uint64_t init_seed = 0;

  Mat& at(const std::string& name);
  const Mat& at(const std::string& name) const;
};

using GradMap = std::map<std::string, Mat>;

void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

/// Handle to a node in a Tape computation.
using Var = int;

/// Reverse-mode differentiable computation over Mat values. Operations append
/// nodes, so creation order is already topological; backward() walks it in
/// reverse, visiting each node once. One Tape instance is single-threaded.
class Tape {
 public:
  /// Constant leaf; no gradient is tracked into it.
  Var constant(Mat value);
  /// Parameter leaf bound to `params[name]`; repeated requests for the same
  /// name return the same node so both encoder passes share one gradient
  /// accumulator.
  Var param(const ModelParams& params, const std::string& name);

  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var add(Var a, Var b);
  /// [n x c] + broadcast [1 x c].
  Var add_rowvec(Var a, Var b);
  Var scale(Var a, double s);
  Var mul_elem(Var a, Var b);
  Var relu(Var a);
  Var sigmoid(Var a);
  /// Elementwise clamp; gradient passes only strictly inside (lo, hi).
  Var clamp(Var a, double lo, double hi);
  Var concat_cols(const std::vector<Var>& parts);
  Var gather_rows(Var a, std::vector<std::size_t> index);
  /// Column means as a [1 x c] row.
  Var mean_rows(Var a);

  /// Mask-weighted neighbor mean over a subgraph's local CSR:
  /// out_v = sum_{u in N(v)} mask_e(u,v) * h_u / (1 + deg(v)), with mask = 1
  /// when `mask` is kNoVar. deg is the structural degree, so the
  /// normalization does not depend on the sampled mask.
  Var neighbor_mean(const EnclosingSubgraph& sub, Var h, Var mask);

  /// Relaxed Bernoulli sample per edge: sigmoid((logit + noise)/tau) with
  /// noise = ln u - ln(1-u) precomputed outside the tape. Gradient flows
  /// through the sigmoid only.
  Var binary_concrete(Var logits, const std::vector<double>& noise, double tau);

  /// Sum over rows of the Bernoulli KL against per-row prior gamma:
  /// p log(p/g) + (1-p) log((1-p)/(1-g)). Scalar output; per-subgraph sums
  /// are averaged across subgraphs by the caller, never across edges.
  Var bernoulli_kl_sum(Var p, const std::vector<double>& gamma);

  /// Binary cross-entropy on a [1 x 1] logit: softplus(z) - y*z.
  Var bce_with_logit(Var z, double y);

  const Mat& val(Var v) const { return nodes_[v].value; }
  const Mat& grad(Var v) const { return nodes_[v].grad; }

  /// Seeds d(loss)/d(loss) = 1 and accumulates into every node's grad.
  void backward(Var loss);
  /// Gradients of every parameter touched by this tape.
  GradMap param_grads() const;

  static constexpr Var kNoVar = -1;

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void()> back;
    std::string param_name;
  };

  Var push(Mat value, std::function<void()> back = nullptr);
  Node& node(Var v) { return nodes_[v]; }

  std::vector<Node> nodes_;
  std::map<std::string, Var> param_cache_;
};

/// Adam with bias correction; state keyed by parameter name.
class Adam {
 public:
  Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ModelParams& params, const GradMap& grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  long long t_ = 0;
  std::map<std::string, Mat> m_, v_;
};

/// Scalar loss with analytic gradients, for finite-difference verification.
using LossFn = std::function<std::pair<double, GradMap>(const ModelParams&)>;

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::size_t coords_checked = 0;
};

/// Central finite differences against the analytic gradient on up to
/// `coords_per_param` sampled coordinates of each tensor. Relative error is
/// |fd - ad| / max(1, |fd|, |ad|).
GradCheckReport grad_check(const LossFn& f, const ModelParams& params, double eps,
                           std::size_t coords_per_param, std::uint64_t seed);

}  // namespace lpaug
