#include "lpaug/autodiff.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "lpaug/rng.hpp"

namespace lpaug {

Mat uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in, std::uint64_t seed) {
  Mat m(rows, cols);
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in == 0 ? 1 : fan_in));
  Rng rng(seed);
  for (double& x : m.a) x = (2.0 * rng.uniform() - 1.0) * bound;
  return m;
}

Mat& ModelParams::at(const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw std::runtime_error("unknown parameter: " + name);
  return it->second;
}

const Mat& ModelParams::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw std::runtime_error("unknown parameter: " + name);
  return it->second;
}

namespace {
constexpr char kCheckpointMagic[8] = {'L', 'P', 'A', 'U', 'G', 'C', 'K', '1'};

template <class T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void read_raw(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_raw(out, params.init_seed);
  std::uint64_t count = params.tensors.size();
  write_raw(out, count);
  for (const auto& [name, m] : params.tensors) {
    std::uint32_t len = static_cast<std::uint32_t>(name.size());
    write_raw(out, len);
    out.write(name.data(), len);
    std::uint64_t rows = m.rows, cols = m.cols;
    write_raw(out, rows);
    write_raw(out, cols);
    out.write(reinterpret_cast<const char*>(m.a.data()),
              static_cast<std::streamsize>(m.a.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("short write on checkpoint: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw std::runtime_error(path + ": not a checkpoint file");
  }
  ModelParams params;
  read_raw(in, params.init_seed);
  std::uint64_t count = 0;
  read_raw(in, count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t len = 0;
    read_raw(in, len);
    std::string name(len, '\0');
    in.read(name.data(), len);
    std::uint64_t rows = 0, cols = 0;
    read_raw(in, rows);
    read_raw(in, cols);
    Mat m(rows, cols);
    in.read(reinterpret_cast<char*>(m.a.data()),
            static_cast<std::streamsize>(m.a.size() * sizeof(double)));
    if (!in) throw std::runtime_error(path + ": truncated checkpoint");
    params.tensors.emplace(std::move(name), std::move(m));
  }
  return params;
}

Var Tape::push(Mat value, std::function<void()> back) {
  Node n;
  n.value = std::move(value);
  n.grad = Mat(n.value.rows, n.value.cols);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return static_cast<Var>(nodes_.size() - 1);
}

Var Tape::constant(Mat value) { return push(std::move(value)); }

Var Tape::param(const ModelParams& params, const std::string& name) {
  auto it = param_cache_.find(name);
  if (it != param_cache_.end()) return it->second;
  Var v = push(params.at(name));
  nodes_[v].param_name = name;
  param_cache_[name] = v;
  return v;
}

Var Tape::matmul(Var a, Var b) {
  const Mat& A = val(a);
  const Mat& B = val(b);
  if (A.cols != B.rows) throw std::runtime_error("matmul: inner dimensions disagree");
  Mat C(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t k = 0; k < A.cols; ++k) {
      double aik = A.at(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < B.cols; ++j) C.at(i, j) += aik * B.at(k, j);
    }
  }
  Var out = push(std::move(C), nullptr);
  nodes_[out].back = [this, a, b, out] {
    const Mat& A = val(a);
    const Mat& B = val(b);
    const Mat& dC = grad(out);
    Mat& dA = node(a).grad;
    Mat& dB = node(b).grad;
    for (std::size_t i = 0; i < A.rows; ++i) {
      for (std::size_t j = 0; j < B.cols; ++j) {
        double d = dC.at(i, j);
        if (d == 0.0) continue;
        for (std::size_t k = 0; k < A.cols; ++k) {
          dA.at(i, k) += d * B.at(k, j);
          dB.at(k, j) += d * A.at(i, k);
        }
      }
    }
  };
  return out;
}

Var Tape::transpose(Var a) {
  const Mat& A = val(a);
  Mat C(A.cols, A.rows);
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t j = 0; j < A.cols; ++j) C.at(j, i) = A.at(i, j);
  }
  Var out = push(std::move(C));
  nodes_[out].back = [this, a, out] {
    const Mat& dC = grad(out);
    Mat& dA = node(a).grad;
    for (std::size_t i = 0; i < dA.rows; ++i) {
      for (std::size_t j = 0; j < dA.cols; ++j) dA.at(i, j) += dC.at(j, i);
    }
  };
  return out;
}

Var Tape::add(Var a, Var b) {
  const Mat& A = val(a);
  const Mat& B = val(b);
  if (A.rows != B.rows || A.cols != B.cols) throw std::runtime_error("add: shape mismatch");
  Mat C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C.a[i] += B.a[i];
  Var out = push(std::move(C));
  nodes_[out].back = [this, a, b, out] {
    const Mat& dC = grad(out);
    Mat& dA = node(a).grad;
    Mat& dB = node(b).grad;
    for (std::size_t i = 0; i < dC.size(); ++i) {
      dA.a[i] += dC.a[i];
      dB.a[i] += dC.a[i];
    }
  };
  return out;
}

Var Tape::add_rowvec(Var a, Var b) {
  const Mat& A = val(a);
  const Mat& B = val(b);
  if (B.rows != 1 || A.cols != B.cols) throw std::runtime_error("add_rowvec: shape mismatch");
  Mat C = A;
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t j = 0; j < A.cols; ++j) C.at(i, j) += B.at(0, j);
  }
  Var out = push(std::move(C));
  nodes_[out].back = [this, a, b, out] {
    const Mat& dC = grad(out);
    Mat& dA = node(a).grad;
    Mat& dB = node(b).grad;
    for (std::size_t i = 0; i < dC.rows; ++i) {
      for (std::size_t j = 0; j < dC.cols; ++j) {
        dA.at(i, j) += dC.at(i, j);
        dB.at(0, j) += dC.at(i, j);
      }
    }
  };
  return out;
}

Var Tape::scale(Var a, double s) {
  Mat C = val(a);
  for (double& x : C.a) x *= s;
  Var out = push(std::move(C));
  nodes_[out].back = [this, a, s, out] {
    const Mat& dC = grad(out);
    Mat& dA = node(a).grad;
    for (std::size_t i = 0; i < dC.size(); ++i) dA.a[i] += s * dC.a[i];
  };
  return out;
}

Var Tape::mul_elem(Var a, Var b) {
  const Mat& A = val(a);
  const Mat& B = val(b);
  if (A.rows != B.rows || A.cols != B.cols) throw std::runtime_error("mul_elem: shape mismatch");
  Mat C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C.a[i] *= B.a[i];
  Var out = push(std::move(C));
  nodes_[out].back = [this, a, b, out] {
    const Mat& A = val(a);
    const Mat& B = val(b);
    const Mat& dC = grad(out);
    Mat& dA = node(a).grad;
    Mat& dB = node(b).grad;
    for (std::size_t i = 0; i < dC.size(); ++i) {
      dA.a[i] += dC.a[i] * B.a[i];
      dB.a[i] += dC.a[i] * A.a[i];
    }
  };
  return out;
}

Var Tape::relu(Var a) {
  Mat C = val(a);
  for (double& x : C.a) x = x > 0.0 ? x : 0.0;
  Var out = push(std::move(C));
  nodes_[out].back = [this, a, out] {
    const Mat& A = val(a);
    const Mat& dC = grad(out);
    Mat& dA = node(a).grad;
    for (std::size_t i = 0; i < dC.size(); ++i) {
      if (A.a[i] > 0.0) dA.a[i] += dC.a[i];
    }
  };
  return out;
}

Var Tape::sigmoid(Var a) {
  Mat C = val(a);
  for (double& x : C.a) x = 1.0 / (1.0 + std::exp(-x));
  Var out = push(std::move(C));
  nodes_[out].back = [this, a, out] {
    const Mat& S = val(out);
    const Mat& dC = grad(out);
    Mat& dA = node(a).grad;
    for (std::size_t i = 0; i < dC.size(); ++i) dA.a[i] += dC.a[i] * S.a[i] * (1.0 - S.a[i]);
  };
  return out;
}

Var Tape::clamp(Var a, double lo, double hi) {
  Mat C = val(a);
  for (double& x : C.a) x = x < lo ? lo : (x > hi ? hi : x);
  Var out = push(std::move(C));
  nodes_[out].back = [this, a, lo, hi, out] {
    const Mat& A = val(a);
    const Mat& dC = grad(out);
    Mat& dA = node(a).grad;
    for (std::size_t i = 0; i < dC.size(); ++i) {
      if (A.a[i] > lo && A.a[i] < hi) dA.a[i] += dC.a[i];
    }
  };
  return out;
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::runtime_error("concat_cols: no inputs");
  std::size_t rows = val(parts[0]).rows;
  std::size_t cols = 0;
  for (Var p : parts) {
    if (val(p).rows != rows) throw std::runtime_error("concat_cols: row mismatch");
    cols += val(p).cols;
  }
  Mat C(rows, cols);
  std::size_t off = 0;
  for (Var p : parts) {
    const Mat& P = val(p);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < P.cols; ++j) C.at(i, off + j) = P.at(i, j);
    }
    off += P.cols;
  }
  Var out = push(std::move(C));
  nodes_[out].back = [this, parts, out] {
    const Mat& dC = grad(out);
    std::size_t off = 0;
    for (Var p : parts) {
      Mat& dP = node(p).grad;
      for (std::size_t i = 0; i < dP.rows; ++i) {
        for (std::size_t j = 0; j < dP.cols; ++j) dP.at(i, j) += dC.at(i, off + j);
      }
      off += dP.cols;
    }
  };
  return out;
}

Var Tape::gather_rows(Var a, std::vector<std::size_t> index) {
  const Mat& A = val(a);
  for (std::size_t r : index) {
    if (r >= A.rows) throw std::runtime_error("gather_rows: index out of range");
  }
  Mat C(index.size(), A.cols);
  for (std::size_t i = 0; i < index.size(); ++i) {
    for (std::size_t j = 0; j < A.cols; ++j) C.at(i, j) = A.at(index[i], j);
  }
  Var out = push(std::move(C));
  nodes_[out].back = [this, a, index = std::move(index), out] {
    const Mat& dC = grad(out);
    Mat& dA = node(a).grad;
    for (std::size_t i = 0; i < index.size(); ++i) {
      for (std::size_t j = 0; j < dC.cols; ++j) dA.at(index[i], j) += dC.at(i, j);
    }
  };
  return out;
}

Var Tape::mean_rows(Var a) {
  const Mat& A = val(a);
  if (A.rows == 0) throw std::runtime_error("mean_rows: empty input");
  Mat C(1, A.cols);
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t j = 0; j < A.cols; ++j) C.at(0, j) += A.at(i, j);
  }
  for (double& x : C.a) x /= static_cast<double>(A.rows);
  Var out = push(std::move(C));
  nodes_[out].back = [this, a, out] {
    const Mat& dC = grad(out);
    Mat& dA = node(a).grad;
    double inv = 1.0 / static_cast<double>(dA.rows);
    for (std::size_t i = 0; i < dA.rows; ++i) {
      for (std::size_t j = 0; j < dA.cols; ++j) dA.at(i, j) += dC.at(0, j) * inv;
    }
  };
  return out;
}

Var Tape::neighbor_mean(const EnclosingSubgraph& sub, Var h, Var mask) {
  const Mat& H = val(h);
  if (H.rows != sub.num_nodes()) throw std::runtime_error("neighbor_mean: row count mismatch");
  if (mask != kNoVar) {
    const Mat& M = val(mask);
    if (M.rows != sub.num_edges() || M.cols != 1) {
      throw std::runtime_error("neighbor_mean: mask must be one value per edge");
    }
  }
  Mat C(H.rows, H.cols);
  for (std::size_t v = 0; v < sub.num_nodes(); ++v) {
    double inv = 1.0 / (1.0 + static_cast<double>(sub.degree(v)));
    for (std::size_t t = sub.adj_offsets[v]; t < sub.adj_offsets[v + 1]; ++t) {
      NodeId u = sub.adj_nbr[t];
      double w = mask == kNoVar ? 1.0 : val(mask).at(sub.adj_edge[t], 0);
      double wi = w * inv;
      for (std::size_t j = 0; j < H.cols; ++j) C.at(v, j) += wi * H.at(u, j);
    }
  }
  Var out = push(std::move(C));
  nodes_[out].back = [this, &sub, h, mask, out] {
    const Mat& H = val(h);
    const Mat& dC = grad(out);
    Mat& dH = node(h).grad;
    for (std::size_t v = 0; v < sub.num_nodes(); ++v) {
      double inv = 1.0 / (1.0 + static_cast<double>(sub.degree(v)));
      for (std::size_t t = sub.adj_offsets[v]; t < sub.adj_offsets[v + 1]; ++t) {
        NodeId u = sub.adj_nbr[t];
        std::size_t e = sub.adj_edge[t];
        double w = mask == kNoVar ? 1.0 : val(mask).at(e, 0);
        double dot = 0.0;
        for (std::size_t j = 0; j < H.cols; ++j) {
          dH.at(u, j) += dC.at(v, j) * w * inv;
          dot += dC.at(v, j) * H.at(u, j);
        }
        if (mask != kNoVar) node(mask).grad.at(e, 0) += dot * inv;
      }
    }
  };
  return out;
}

Var Tape::binary_concrete(Var logits, const std::vector<double>& noise, double tau) {
  const Mat& L = val(logits);
  if (tau <= 0.0) throw std::runtime_error("binary_concrete: tau must be positive");
  if (L.cols != 1 || L.rows != noise.size()) {
    throw std::runtime_error("binary_concrete: logits and noise sizes disagree");
  }
  Mat C(L.rows, 1);
  for (std::size_t i = 0; i < L.rows; ++i) {
    double s = 1.0 / (1.0 + std::exp(-(L.a[i] + noise[i]) / tau));
    // Keep the sample strictly inside (0,1) even when tau drives the
    // sigmoid into saturation; the gradient factor there is ~0 anyway.
    C.a[i] = std::min(1.0 - 1e-12, std::max(1e-12, s));
  }
  Var out = push(std::move(C));
  nodes_[out].back = [this, logits, tau, out] {
    const Mat& S = val(out);
    const Mat& dC = grad(out);
    Mat& dL = node(logits).grad;
    for (std::size_t i = 0; i < dC.size(); ++i) {
      dL.a[i] += dC.a[i] * S.a[i] * (1.0 - S.a[i]) / tau;
    }
  };
  return out;
}

Var Tape::bernoulli_kl_sum(Var p, const std::vector<double>& gamma) {
  const Mat& P = val(p);
  if (P.cols != 1 || P.rows != gamma.size()) {
    throw std::runtime_error("bernoulli_kl_sum: p and gamma sizes disagree");
  }
  for (double g : gamma) {
    if (g <= 0.0 || g >= 1.0) throw std::runtime_error("bernoulli_kl_sum: gamma outside (0,1)");
  }
  Mat C(1, 1);
  for (std::size_t i = 0; i < P.rows; ++i) {
    double pi = P.a[i];
    C.a[0] += pi * std::log(pi / gamma[i]) + (1.0 - pi) * std::log((1.0 - pi) / (1.0 - gamma[i]));
  }
  Var out = push(std::move(C));
  nodes_[out].back = [this, p, gamma, out] {
    const Mat& P = val(p);
    double d = grad(out).a[0];
    Mat& dP = node(p).grad;
    for (std::size_t i = 0; i < P.rows; ++i) {
      double pi = P.a[i];
      dP.a[i] += d * (std::log(pi / gamma[i]) - std::log((1.0 - pi) / (1.0 - gamma[i])));
    }
  };
  return out;
}

Var Tape::bce_with_logit(Var z, double y) {
  const Mat& Z = val(z);
  if (Z.rows != 1 || Z.cols != 1) throw std::runtime_error("bce_with_logit: logit must be 1x1");
  double zv = Z.a[0];
  double softplus = zv > 0.0 ? zv + std::log1p(std::exp(-zv)) : std::log1p(std::exp(zv));
  Mat C(1, 1);
  C.a[0] = softplus - y * zv;
  Var out = push(std::move(C));
  nodes_[out].back = [this, z, y, out] {
    double zv = val(z).a[0];
    double s = 1.0 / (1.0 + std::exp(-zv));
    node(z).grad.a[0] += grad(out).a[0] * (s - y);
  };
  return out;
}

void Tape::backward(Var loss) {
  Mat& g = nodes_[loss].grad;
  if (g.size() != 1) throw std::runtime_error("backward: loss must be scalar");
  g.a[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (it->back) it->back();
  }
}

GradMap Tape::param_grads() const {
  GradMap out;
  for (const auto& [name, v] : param_cache_) out.emplace(name, nodes_[v].grad);
  return out;
}

void Adam::step(ModelParams& params, const GradMap& grads) {
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (auto& [name, g] : grads) {
    Mat& p = params.at(name);
    if (g.rows != p.rows || g.cols != p.cols) {
      throw std::runtime_error("Adam: gradient shape mismatch for " + name);
    }
    Mat& m = m_.try_emplace(name, Mat(p.rows, p.cols)).first->second;
    Mat& v = v_.try_emplace(name, Mat(p.rows, p.cols)).first->second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m.a[i] = beta1_ * m.a[i] + (1.0 - beta1_) * g.a[i];
      v.a[i] = beta2_ * v.a[i] + (1.0 - beta2_) * g.a[i] * g.a[i];
      double mhat = m.a[i] / bc1;
      double vhat = v.a[i] / bc2;
      p.a[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

GradCheckReport grad_check(const LossFn& f, const ModelParams& params, double eps,
                           std::size_t coords_per_param, std::uint64_t seed) {
  auto [base_value, analytic] = f(params);
  if (!std::isfinite(base_value)) throw std::runtime_error("grad_check: non-finite loss value");
  GradCheckReport report;
  Rng rng(seed);
  for (const auto& [name, grad] : analytic) {
    std::vector<std::size_t> coords;
    if (grad.size() <= coords_per_param) {
      for (std::size_t i = 0; i < grad.size(); ++i) coords.push_back(i);
    } else {
      for (std::size_t c = 0; c < coords_per_param; ++c) coords.push_back(rng.below(grad.size()));
    }
    for (std::size_t i : coords) {
      ModelParams bumped = params;
      bumped.at(name).a[i] += eps;
      double up = f(bumped).first;
      bumped.at(name).a[i] -= 2.0 * eps;
      double down = f(bumped).first;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw std::runtime_error("grad_check: non-finite loss near " + name);
      }
      double fd = (up - down) / (2.0 * eps);
      double ad = grad.a[i];
      double rel = std::abs(fd - ad) / std::max({1.0, std::abs(fd), std::abs(ad)});
      ++report.coords_checked;
      if (rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst_param = name;
      }
    }
  }
  return report;
}

}  // namespace lpaug
