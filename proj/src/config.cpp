#include "lpaug/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace lpaug {

Method parse_method(const std::string& name) {
  if (name == "full") return Method::Full;
  if (name == "complete_only") return Method::CompleteOnly;
  if (name == "reduce_only") return Method::ReduceOnly;
  if (name == "backbone") return Method::Backbone;
  if (name == "heuristic") return Method::Heuristic;
  throw std::invalid_argument("unknown method: " + name);
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Full: return "full";
    case Method::CompleteOnly: return "complete_only";
    case Method::ReduceOnly: return "reduce_only";
    case Method::Backbone: return "backbone";
    case Method::Heuristic: return "heuristic";
  }
  throw std::logic_error("bad method enum");
}

RunConfig default_config() { return RunConfig{}; }

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("not a bool");
}

long long parse_int(const std::string& v) {
  std::size_t used = 0;
  long long x = std::stoll(v, &used);
  if (used != v.size()) throw std::invalid_argument("not an integer");
  return x;
}

std::uint64_t parse_u64(const std::string& v) {
  long long x = parse_int(v);
  if (x < 0) throw std::invalid_argument("negative");
  return static_cast<std::uint64_t>(x);
}

double parse_double(const std::string& v) {
  std::size_t used = 0;
  double x = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("not a number");
  return x;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& v, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse(item));
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

template <typename T>
std::string join_list(const std::vector<T>& xs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ',';
    os << xs[i];
  }
  return os.str();
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

struct Entry {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {"dataset.edges", [](RunConfig& c, const std::string& v) { c.dataset.edges = v; },
       [](const RunConfig& c) { return c.dataset.edges; }},
      {"dataset.features", [](RunConfig& c, const std::string& v) { c.dataset.features = v; },
       [](const RunConfig& c) { return c.dataset.features; }},
      {"dataset.weighted", [](RunConfig& c, const std::string& v) { c.dataset.weighted = parse_bool(v); },
       [](const RunConfig& c) { return c.dataset.weighted ? "true" : "false"; }},
      {"split.valid_frac", [](RunConfig& c, const std::string& v) { c.split.valid_frac = parse_double(v); },
       [](const RunConfig& c) { return fmt_double(c.split.valid_frac); }},
      {"split.test_frac", [](RunConfig& c, const std::string& v) { c.split.test_frac = parse_double(v); },
       [](const RunConfig& c) { return fmt_double(c.split.test_frac); }},
      {"split.seed", [](RunConfig& c, const std::string& v) { c.split.seed = parse_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.split.seed); }},
      {"complete.scorer", [](RunConfig& c, const std::string& v) { parse_heuristic(v); c.complete.scorer = v; },
       [](const RunConfig& c) { return c.complete.scorer; }},
      {"complete.k", [](RunConfig& c, const std::string& v) { c.complete.k = parse_int(v); },
       [](const RunConfig& c) { return std::to_string(c.complete.k); }},
      {"reduce.beta", [](RunConfig& c, const std::string& v) { c.reduce.beta = parse_double(v); },
       [](const RunConfig& c) { return fmt_double(c.reduce.beta); }},
      {"reduce.gamma_ori", [](RunConfig& c, const std::string& v) { c.reduce.gamma_ori = parse_double(v); },
       [](const RunConfig& c) { return fmt_double(c.reduce.gamma_ori); }},
      {"reduce.gamma_ext", [](RunConfig& c, const std::string& v) { c.reduce.gamma_ext = parse_double(v); },
       [](const RunConfig& c) { return fmt_double(c.reduce.gamma_ext); }},
      {"reduce.tau", [](RunConfig& c, const std::string& v) { c.reduce.tau = parse_double(v); },
       [](const RunConfig& c) { return fmt_double(c.reduce.tau); }},
      {"reduce.hops", [](RunConfig& c, const std::string& v) { c.reduce.hops = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.reduce.hops); }},
      {"reduce.hidden", [](RunConfig& c, const std::string& v) { c.reduce.hidden = parse_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.reduce.hidden); }},
      {"reduce.attn_dim", [](RunConfig& c, const std::string& v) { c.reduce.attn_dim = parse_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.reduce.attn_dim); }},
      {"reduce.edge_emb_dim", [](RunConfig& c, const std::string& v) { c.reduce.edge_emb_dim = parse_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.reduce.edge_emb_dim); }},
      {"reduce.encoder_layers", [](RunConfig& c, const std::string& v) { c.reduce.encoder_layers = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.reduce.encoder_layers); }},
      {"reduce.epochs", [](RunConfig& c, const std::string& v) { c.reduce.epochs = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.reduce.epochs); }},
      {"reduce.patience", [](RunConfig& c, const std::string& v) { c.reduce.patience = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.reduce.patience); }},
      {"reduce.lr", [](RunConfig& c, const std::string& v) { c.reduce.lr = parse_double(v); },
       [](const RunConfig& c) { return fmt_double(c.reduce.lr); }},
      {"reduce.negatives_per_positive", [](RunConfig& c, const std::string& v) { c.reduce.negatives_per_positive = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.reduce.negatives_per_positive); }},
      {"reduce.batch_size", [](RunConfig& c, const std::string& v) { c.reduce.batch_size = parse_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.reduce.batch_size); }},
      {"reduce.max_nodes", [](RunConfig& c, const std::string& v) { c.reduce.max_nodes = parse_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.reduce.max_nodes); }},
      {"reduce.sampling", [](RunConfig& c, const std::string& v) {
         if (v == "edgewise") c.reduce.sampling = SamplingMode::Edgewise;
         else if (v == "nodewise") c.reduce.sampling = SamplingMode::Nodewise;
         else throw std::invalid_argument("edgewise or nodewise");
       },
       [](const RunConfig& c) { return c.reduce.sampling == SamplingMode::Edgewise ? "edgewise" : "nodewise"; }},
      {"reduce.eval_every", [](RunConfig& c, const std::string& v) { c.reduce.eval_every = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.reduce.eval_every); }},
      {"reduce.valid_hits_k", [](RunConfig& c, const std::string& v) { c.reduce.valid_hits_k = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.reduce.valid_hits_k); }},
      {"reduce.train_cap", [](RunConfig& c, const std::string& v) { c.reduce.train_cap = parse_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.reduce.train_cap); }},
      {"eval.ks", [](RunConfig& c, const std::string& v) {
         c.eval.ks = parse_list<int>(v, [](const std::string& s) { return static_cast<int>(parse_int(s)); });
       },
       [](const RunConfig& c) { return join_list(c.eval.ks); }},
      {"eval.seeds", [](RunConfig& c, const std::string& v) {
         c.eval.seeds = parse_list<std::uint64_t>(v, parse_u64);
       },
       [](const RunConfig& c) { return join_list(c.eval.seeds); }},
      {"eval.perturb_rate", [](RunConfig& c, const std::string& v) { c.eval.perturb_rate = parse_double(v); },
       [](const RunConfig& c) { return fmt_double(c.eval.perturb_rate); }},
      {"mode.method", [](RunConfig& c, const std::string& v) { c.mode.method = parse_method(v); },
       [](const RunConfig& c) { return method_name(c.mode.method); }},
      {"mode.heuristic", [](RunConfig& c, const std::string& v) { parse_heuristic(v); c.mode.heuristic = v; },
       [](const RunConfig& c) { return c.mode.heuristic; }},
      {"mode.no_sample", [](RunConfig& c, const std::string& v) { c.mode.no_sample = parse_bool(v); },
       [](const RunConfig& c) { return c.mode.no_sample ? "true" : "false"; }},
      {"mode.beta_zero", [](RunConfig& c, const std::string& v) { c.mode.beta_zero = parse_bool(v); },
       [](const RunConfig& c) { return c.mode.beta_zero ? "true" : "false"; }},
      {"mode.nodewise", [](RunConfig& c, const std::string& v) { c.mode.nodewise = parse_bool(v); },
       [](const RunConfig& c) { return c.mode.nodewise ? "true" : "false"; }},
      {"mode.no_attention", [](RunConfig& c, const std::string& v) { c.mode.no_attention = parse_bool(v); },
       [](const RunConfig& c) { return c.mode.no_attention ? "true" : "false"; }},
      {"mode.no_edge_label", [](RunConfig& c, const std::string& v) { c.mode.no_edge_label = parse_bool(v); },
       [](const RunConfig& c) { return c.mode.no_edge_label ? "true" : "false"; }},
      {"threads", [](RunConfig& c, const std::string& v) { c.threads = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.threads); }},
      {"out_dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; },
       [](const RunConfig& c) { return c.out_dir; }},
  };
  return table;
}

const Entry* find_entry(const std::string& key) {
  for (const Entry& e : entries())
    if (e.key == key) return &e;
  return nullptr;
}

void set_or_record(RunConfig& cfg, const std::string& key, const std::string& value,
                   std::vector<std::string>& bad) {
  const Entry* e = find_entry(key);
  if (!e) {
    bad.push_back(key);
    return;
  }
  try {
    e->set(cfg, value);
  } catch (const std::exception&) {
    bad.push_back(key);
  }
}

void throw_if_bad(const std::vector<std::string>& bad, const std::string& what) {
  if (bad.empty()) return;
  std::string msg = what + ":";
  for (const std::string& k : bad) msg += " " + k;
  throw std::runtime_error(msg);
}

std::string env_name(const std::string& key) {
  std::string out = "LPAUG_";
  for (char ch : key) {
    if (ch == '.') out += '_';
    else out += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  return out;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  RunConfig cfg;
  std::vector<std::string> bad;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    set_or_record(cfg, key, value, bad);
  }
  throw_if_bad(bad, "bad config keys in " + path);
  apply_env_overrides(cfg);
  return cfg;
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
  std::vector<std::string> bad;
  for (const std::string& ov : overrides) {
    std::size_t eq = ov.find('=');
    if (eq == std::string::npos) {
      bad.push_back(ov);
      continue;
    }
    set_or_record(cfg, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)), bad);
  }
  throw_if_bad(bad, "bad overrides");
}

void apply_env_overrides(RunConfig& cfg) {
  std::vector<std::string> bad;
  for (const Entry& e : entries()) {
    const char* v = std::getenv(env_name(e.key).c_str());
    if (v) set_or_record(cfg, e.key, v, bad);
  }
  throw_if_bad(bad, "bad environment overrides");
}

std::string dump_config(const RunConfig& cfg) {
  std::ostringstream os;
  for (const Entry& e : entries()) os << e.key << " = " << e.get(cfg) << "\n";
  return os.str();
}

std::vector<std::pair<std::string, std::string>> config_items(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(entries().size());
  for (const Entry& e : entries()) out.emplace_back(e.key, e.get(cfg));
  return out;
}

void validate_config(const RunConfig& cfg, bool check_files) {
  std::vector<std::string> bad;
  if (cfg.split.valid_frac < 0 || cfg.split.test_frac < 0 ||
      cfg.split.valid_frac + cfg.split.test_frac >= 1.0)
    bad.push_back("split.valid_frac/split.test_frac");
  if (cfg.complete.k < 0) bad.push_back("complete.k");
  try {
    effective_reduce_config(cfg).validate();
  } catch (const std::exception& ex) {
    bad.push_back(std::string("reduce (") + ex.what() + ")");
  }
  if (cfg.eval.ks.empty() || std::any_of(cfg.eval.ks.begin(), cfg.eval.ks.end(),
                                         [](int k) { return k <= 0; }))
    bad.push_back("eval.ks");
  if (cfg.eval.seeds.empty()) bad.push_back("eval.seeds");
  if (cfg.eval.perturb_rate < 0 || cfg.eval.perturb_rate > 1)
    bad.push_back("eval.perturb_rate");
  if (cfg.threads != 1) bad.push_back("threads");
  if (check_files) {
    if (cfg.dataset.edges.empty() || !std::filesystem::exists(cfg.dataset.edges))
      bad.push_back("dataset.edges");
    if (!cfg.dataset.features.empty() && !std::filesystem::exists(cfg.dataset.features))
      bad.push_back("dataset.features");
  }
  throw_if_bad(bad, "invalid config fields");
}

ReduceConfig effective_reduce_config(const RunConfig& cfg) {
  ReduceConfig r = cfg.reduce;
  switch (cfg.mode.method) {
    case Method::Backbone:
    case Method::CompleteOnly:
    case Method::Heuristic:
      r.force_mask_one = true;
      r.beta = 0.0;
      break;
    case Method::ReduceOnly:
    case Method::Full:
      break;
  }
  if (cfg.mode.beta_zero) r.beta = 0.0;
  if (cfg.mode.no_sample) r.no_sample = true;
  if (cfg.mode.nodewise) r.sampling = SamplingMode::Nodewise;
  if (cfg.mode.no_attention) r.no_attention = true;
  if (cfg.mode.no_edge_label) r.no_edge_label = true;
  return r;
}

long long effective_k(const RunConfig& cfg) {
  switch (cfg.mode.method) {
    case Method::Full:
    case Method::CompleteOnly:
      return cfg.complete.k;
    case Method::ReduceOnly:
    case Method::Backbone:
    case Method::Heuristic:
      return 0;
  }
  return 0;
}

}  // namespace lpaug
