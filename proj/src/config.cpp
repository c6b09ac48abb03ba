#include "crossgcn/config.hpp"

#include <fstream>
#include <set>

namespace crossgcn::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw DataError(where + ": expected true or false, got '" + v + "'");
}

index_t parse_int(const std::string& v, const std::string& where) {
  std::size_t pos = 0;
  index_t out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw DataError(where + ": expected integer, got '" + v + "'");
  }
  if (pos != v.size()) throw DataError(where + ": trailing junk in integer '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& v, const std::string& where) {
  std::size_t pos = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw DataError(where + ": expected unsigned integer, got '" + v + "'");
  }
  if (pos != v.size()) throw DataError(where + ": trailing junk in integer '" + v + "'");
  return out;
}

real parse_float(const std::string& v, const std::string& where) {
  std::size_t pos = 0;
  real out = 0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw DataError(where + ": expected number, got '" + v + "'");
  }
  if (pos != v.size()) throw DataError(where + ": trailing junk in number '" + v + "'");
  return out;
}

void set_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
             const std::string& where) {
  if (key == "dataset")
    cfg.dataset = unquote(value);
  else if (key == "variant")
    cfg.variant = unquote(value);
  else if (key == "layers")
    cfg.layers = parse_int(value, where);
  else if (key == "hidden")
    cfg.hidden = parse_int(value, where);
  else if (key == "order")
    cfg.order = parse_int(value, where);
  else if (key == "cross_layer1")
    cfg.cross_layer1 = parse_bool(value, where);
  else if (key == "cross_layer2")
    cfg.cross_layer2 = parse_bool(value, where);
  else if (key == "dropout")
    cfg.dropout = parse_float(value, where);
  else if (key == "weight_decay")
    cfg.weight_decay = parse_float(value, where);
  else if (key == "lr")
    cfg.lr = parse_float(value, where);
  else if (key == "epochs")
    cfg.epochs = parse_int(value, where);
  else if (key == "n_splits")
    cfg.n_splits = parse_int(value, where);
  else if (key == "seed")
    cfg.seed = parse_u64(value, where);
  else if (key == "alpha1")
    cfg.alpha1 = parse_float(value, where);
  else if (key == "alpha2")
    cfg.alpha2 = parse_float(value, where);
  else if (key == "gin_hidden")
    cfg.gin_hidden = parse_int(value, where);
  else if (key == "bias_outside")
    cfg.bias_outside = parse_bool(value, where);
  else if (key == "use_fixed_split")
    cfg.use_fixed_split = parse_bool(value, where);
  else if (key == "jobs")
    cfg.jobs = parse_int(value, where);
  else
    throw DataError(where + ": unknown config key '" + key + "'");
}

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing or unreadable config file: " + path);
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw DataError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw DataError(where + ": expected 'key = value'");
    if (!seen.insert(key).second) throw DataError(where + ": duplicate key '" + key + "'");
    set_key(cfg, key, value, where);
  }
  return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw DataError("--set expects key=value, got '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty() || value.empty())
    throw DataError("--set expects key=value, got '" + assignment + "'");
  set_key(cfg, key, value, "--set " + key);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.layers != 1 && cfg.layers != 2) throw DataError("layers must be 1 or 2");
  static const std::set<std::string> variants = {"cross", "cross-fix", "gcn", "gin"};
  if (!variants.count(cfg.variant))
    throw DataError("variant must be one of cross, cross-fix, gcn, gin; got '" + cfg.variant +
                    "'");
  if (cfg.hidden < 1) throw DataError("hidden must be >= 1");
  if (cfg.order < 1) throw DataError("order must be >= 1");
  if (cfg.dropout < 0 || cfg.dropout >= 1) throw DataError("dropout must be in [0, 1)");
  if (cfg.weight_decay < 0) throw DataError("weight_decay must be >= 0");
  if (cfg.lr <= 0) throw DataError("lr must be > 0");
  if (cfg.epochs < 1) throw DataError("epochs must be >= 1");
  if (cfg.n_splits < 1) throw DataError("n_splits must be >= 1");
  if (cfg.gin_hidden < 0) throw DataError("gin_hidden must be >= 0");
  if (cfg.jobs < 1) throw DataError("jobs must be >= 1");
}

namespace {

std::vector<real> alpha_init_for(const ExperimentConfig& cfg, index_t k) {
  std::vector<real> a(k, cfg.alpha2);
  if (k > 0) a[0] = cfg.alpha1;
  return a;
}

}  // namespace

model::ModelConfig build_model_config(const ExperimentConfig& cfg, index_t in_dim,
                                      index_t n_classes) {
  validate(cfg);
  model::ModelConfig mc;
  mc.dropout = cfg.dropout;
  mc.weight_decay = cfg.weight_decay;
  mc.bias_outside = cfg.bias_outside;

  const bool is_cross = cfg.variant == "cross" || cfg.variant == "cross-fix";
  const bool learn_alpha = cfg.variant == "cross";

  for (index_t i = 0; i < cfg.layers; ++i) {
    const bool last = (i == cfg.layers - 1);
    model::LayerSpec l;
    l.in_dim = (i == 0) ? in_dim : cfg.hidden;
    l.out_dim = last ? n_classes : cfg.hidden;
    l.act = last ? model::Activation::SoftmaxRows : model::Activation::Relu;
    if (cfg.variant == "gcn") {
      l.kind = model::LayerKind::Vanilla;
    } else if (cfg.variant == "gin") {
      l.kind = model::LayerKind::Gin;
      l.gin_hidden = cfg.gin_hidden;
    } else if (is_cross) {
      l.kind = model::LayerKind::Cross;
      const bool cross_on = (i == 0) ? cfg.cross_layer1 : cfg.cross_layer2;
      l.order = cross_on ? cfg.order : 1;
      l.learn_alpha = learn_alpha;
      l.alpha_init = alpha_init_for(cfg, l.order);
    }
    mc.layers.push_back(std::move(l));
  }
  return mc;
}

training::TrainOptions build_train_options(const ExperimentConfig& cfg) {
  training::TrainOptions opts;
  opts.epochs = cfg.epochs;
  opts.adam.lr = cfg.lr;
  opts.use_fixed_split = cfg.use_fixed_split;
  return opts;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  return {{"dataset", cfg.dataset},
          {"variant", cfg.variant},
          {"layers", cfg.layers},
          {"hidden", cfg.hidden},
          {"order", cfg.order},
          {"cross_layer1", cfg.cross_layer1},
          {"cross_layer2", cfg.cross_layer2},
          {"dropout", cfg.dropout},
          {"weight_decay", cfg.weight_decay},
          {"lr", cfg.lr},
          {"epochs", cfg.epochs},
          {"n_splits", cfg.n_splits},
          {"seed", cfg.seed},
          {"alpha1", cfg.alpha1},
          {"alpha2", cfg.alpha2},
          {"gin_hidden", cfg.gin_hidden},
          {"bias_outside", cfg.bias_outside},
          {"use_fixed_split", cfg.use_fixed_split},
          {"jobs", cfg.jobs}};
}

}  // namespace crossgcn::config
