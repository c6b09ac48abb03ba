// Command-line surface: dataset preparation, training, sweeps, table
// reproduction, gradient verification, and timing benchmarks.
//
// Exit codes: 0 success, 2 config/validation error, 3 runtime/numeric failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "crossgcn/config.hpp"
#include "crossgcn/graph.hpp"
#include "crossgcn/kernels.hpp"
#include "crossgcn/model.hpp"
#include "crossgcn/oracle.hpp"
#include "crossgcn/ops.hpp"
#include "crossgcn/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace crossgcn;

namespace {

std::string fmt(real v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

graph::GraphDataset load_dataset_verbose(const std::string& dir) {
  std::vector<std::string> warnings;
  graph::GraphDataset ds = graph::load_dataset(dir, &warnings);
  print_warnings(warnings);
  return ds;
}

void write_text_file(const std::string& path, const std::string& content) {
  if (const fs::path parent = fs::path(path).parent_path(); !parent.empty())
    fs::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
}

std::string sibling_csv_path(const std::string& json_path) {
  fs::path p(json_path);
  p.replace_extension(".csv");
  return p.string();
}

std::string curve_csv(const std::vector<training::EpochRecord>& curve) {
  std::ostringstream out;
  out << "epoch,loss,train_acc,val_acc\n";
  for (const auto& r : curve)
    out << r.epoch << "," << fmt(r.loss, 6) << "," << fmt(r.train_acc, 6) << ","
        << fmt(r.val_acc, 6) << "\n";
  return out.str();
}

// ---------------------------------------------------------------- prepare --

struct PrepareArgs {
  std::string name;
  std::string in_dir;
  std::string content_path, cites_path;
  std::string out_dir;
  bool synthesize_cross = false;
  std::string base_dir;
  std::string surrogate;
  std::uint64_t seed = 1;
  index_t val_size = 500, test_size = 1000, train_per_class = 20;
};

int run_prepare(const PrepareArgs& a) {
  if (a.out_dir.empty()) throw DataError("prepare: --out is required");
  const int modes = (a.synthesize_cross ? 1 : 0) + (!a.surrogate.empty() ? 1 : 0) +
                    ((!a.name.empty() || !a.content_path.empty()) ? 1 : 0);
  if (modes != 1)
    throw DataError(
        "prepare: choose exactly one mode: raw conversion (NAME --in DIR), "
        "--synthesize-cross --base DIR, or --surrogate NAME");

  graph::GraphDataset ds;
  if (a.synthesize_cross) {
    if (a.base_dir.empty()) throw DataError("prepare: --synthesize-cross requires --base");
    ds = load_dataset_verbose(a.base_dir);
    ds.features_dense = graph::synthesize_cross_features(ds.labels, ds.n_classes, RngState(a.seed));
    ds.features_sparse = false;
    ds.features_csr = SparseMatrixCSR();
    ds.name = fs::path(a.out_dir).filename().string();
    // Sanity: every node must satisfy the pairwise sign rule.
    for (index_t i = 0; i < ds.n_nodes(); ++i)
      for (index_t pair = 0; pair < 6; ++pair) {
        const real prod = ds.features_dense(i, 2 * pair) * ds.features_dense(i, 2 * pair + 1);
        if ((pair == ds.labels[i]) != (prod > 0))
          throw NumericError("sign rule violated at node " + std::to_string(i));
      }
    std::cout << "sign rule verified: 100% of " << ds.n_nodes() << " nodes\n";
  } else if (!a.surrogate.empty()) {
    const auto spec = graph::surrogate_spec_for(a.surrogate);
    if (!spec)
      throw DataError("prepare: no surrogate recipe for '" + a.surrogate +
                      "' (known: citeseer, cora, pubmed)");
    std::cerr << "note: generating a synthetic stand-in matching published statistics; "
                 "it does not contain the real "
              << a.surrogate << " data\n";
    ds = graph::synthesize_surrogate_citation(*spec, RngState(a.seed));
  } else {
    std::string content = a.content_path, cites = a.cites_path;
    if (content.empty() || cites.empty()) {
      if (a.name.empty() || a.in_dir.empty())
        throw DataError("prepare: raw conversion needs NAME and --in DIR (or --content/--cites)");
      content = (fs::path(a.in_dir) / (a.name + ".content")).string();
      cites = (fs::path(a.in_dir) / (a.name + ".cites")).string();
    }
    std::vector<std::string> warnings;
    ds = graph::convert_citation_raw(content, cites, a.name.empty() ? "dataset" : a.name,
                                     &warnings, a.val_size, a.test_size, a.train_per_class);
    print_warnings(warnings);
  }

  graph::save_dataset(a.out_dir, ds);
  std::cout << "wrote " << a.out_dir << ": N=" << ds.n_nodes() << " edges=" << ds.n_edges()
            << " classes=" << ds.n_classes << " features=" << ds.n_features() << "\n";
  return 0;
}

// ------------------------------------------------------------------ train --

struct TrainArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path = "results.json";
  std::int64_t seed = -1;  // -1: keep config value
  index_t jobs = 0;        // 0: keep config value
};

config::ExperimentConfig resolve_config(const std::string& path,
                                        const std::vector<std::string>& overrides) {
  config::ExperimentConfig cfg;
  if (!path.empty()) cfg = config::parse_config_file(path);
  for (const auto& ov : overrides) config::apply_override(cfg, ov);
  config::validate(cfg);
  if (cfg.dataset.empty()) throw DataError("config is missing 'dataset'");
  return cfg;
}

int run_train(const TrainArgs& a) {
  config::ExperimentConfig cfg = resolve_config(a.config_path, a.overrides);
  if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
  if (a.jobs > 0) cfg.jobs = a.jobs;

  const graph::GraphDataset ds = load_dataset_verbose(cfg.dataset);
  const model::ModelConfig mc = config::build_model_config(cfg, ds.n_features(), ds.n_classes);
  const training::TrainOptions opts = config::build_train_options(cfg);

  const training::ExperimentSummary summary =
      training::run_experiment(ds, mc, opts, cfg.n_splits, cfg.seed, cfg.jobs);

  const json j = training::summary_to_json(summary, ds.name, cfg.variant,
                                           config::config_to_json(cfg));
  write_text_file(a.out_path, j.dump(2) + "\n");
  const std::string csv = sibling_csv_path(a.out_path);
  write_text_file(csv, curve_csv(training::mean_curve(summary)));

  std::cout << "dataset=" << ds.name << " variant=" << cfg.variant << " layers=" << cfg.layers
            << " splits=" << summary.n_splits << " mean_test_acc=" << fmt(summary.mean_test_acc)
            << " std=" << (summary.std_defined ? fmt(summary.std_test_acc) : "n/a") << "\n";
  std::cout << "wrote " << a.out_path << " and " << csv << "\n";
  return 0;
}

// ------------------------------------------------------------------ sweep --

struct SweepArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string axis;
  std::string values;  // optional comma list overriding the default grid
  std::string out_path = "sweep.csv";
  std::int64_t seed = -1;
  index_t jobs = 0;
};

std::vector<real> parse_value_list(const std::string& s) {
  std::vector<real> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw DataError("--values list is empty");
  return out;
}

int run_sweep(const SweepArgs& a) {
  config::ExperimentConfig base = resolve_config(a.config_path, a.overrides);
  if (a.seed >= 0) base.seed = static_cast<std::uint64_t>(a.seed);
  if (a.jobs > 0) base.jobs = a.jobs;

  std::vector<real> grid;
  if (a.axis == "hidden")
    grid = {16, 32, 64, 128};
  else if (a.axis == "alpha2")
    grid = {0, 0.125, 0.25, 0.5, 1, 2, 4, 8, 16, 32};
  else if (a.axis == "dropout")
    grid = {0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  else if (a.axis == "gin-hidden")
    grid = {32, 64, 128, 256};
  else
    throw DataError("unknown sweep axis '" + a.axis +
                    "' (valid: hidden, alpha2, dropout, gin-hidden)");
  if (!a.values.empty()) grid = parse_value_list(a.values);

  if (a.axis == "alpha2" && base.variant != "cross" && base.variant != "cross-fix")
    throw DataError("alpha2 sweep requires a cross variant");
  if (a.axis == "gin-hidden" && base.variant != "gin")
    throw DataError("gin-hidden sweep requires variant gin");

  const graph::GraphDataset ds = load_dataset_verbose(base.dataset);

  std::ostringstream csv;
  csv << "axis,value,mean_test_acc,std_test_acc\n";
  for (real v : grid) {
    config::ExperimentConfig cfg = base;
    if (a.axis == "hidden") {
      cfg.hidden = static_cast<index_t>(v);
    } else if (a.axis == "alpha2") {
      // Figure-5 protocol: single layer, alpha fixed at (1, v).
      cfg.variant = "cross-fix";
      cfg.layers = 1;
      cfg.alpha1 = 1.0;
      cfg.alpha2 = v;
    } else if (a.axis == "dropout") {
      cfg.dropout = v;
    } else {
      cfg.gin_hidden = static_cast<index_t>(v);
    }
    const model::ModelConfig mc = config::build_model_config(cfg, ds.n_features(), ds.n_classes);
    const training::TrainOptions opts = config::build_train_options(cfg);
    const training::ExperimentSummary s =
        training::run_experiment(ds, mc, opts, cfg.n_splits, cfg.seed, cfg.jobs);
    csv << a.axis << "," << fmt(v, 3) << "," << fmt(s.mean_test_acc, 6) << ","
        << fmt(s.std_test_acc, 6) << "\n";
    std::cerr << a.axis << "=" << fmt(v, 3) << " mean_test_acc=" << fmt(s.mean_test_acc)
              << " std=" << fmt(s.std_test_acc) << "\n";
  }
  write_text_file(a.out_path, csv.str());
  std::cout << "wrote " << a.out_path << "\n";
  return 0;
}

// -------------------------------------------------------------- reproduce --

struct ReproduceArgs {
  int table = 0;
  std::string data_root = "data";
  std::string out_dir = "reproduce";
  std::string targets_path;
  std::string datasets;  // comma filter for table 5
  index_t splits = 20;
  std::uint64_t seed = 1;
  index_t jobs = 1;
  index_t epochs = 0;  // 0 = per-table default
};

json load_targets(const std::string& explicit_path) {
  std::vector<std::string> candidates;
  if (!explicit_path.empty()) {
    candidates.push_back(explicit_path);
  } else {
    candidates.push_back("tools/reproduce_targets.json");
    candidates.push_back("reproduce_targets.json");
    candidates.push_back("../tools/reproduce_targets.json");
  }
  for (const auto& c : candidates) {
    std::ifstream in(c);
    if (in) {
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw DataError(c + ": invalid JSON: " + e.what());
      }
      return j;
    }
  }
  throw DataError("cannot find reproduce_targets.json (tried tools/reproduce_targets.json; "
                  "pass --targets PATH)");
}

struct CellResult {
  std::string id;
  real mean = 0, stdev = 0;          // measured, percent
  real paper_mean = 0, paper_std = 0;
  real tol = -1;       // per-cell tolerance if present
  index_t hidden = 0;  // grid-chosen width (0 = not searched)
};

training::ExperimentSummary run_cell_at(const graph::GraphDataset& ds,
                                        const config::ExperimentConfig& cfg) {
  const model::ModelConfig mc = config::build_model_config(cfg, ds.n_features(), ds.n_classes);
  const training::TrainOptions opts = config::build_train_options(cfg);
  return training::run_experiment(ds, mc, opts, cfg.n_splits, cfg.seed, cfg.jobs);
}

real mean_best_val(const training::ExperimentSummary& s) {
  real v = 0;
  for (const auto& r : s.runs) v += r.curve.at(r.best_val_epoch).val_acc;
  return s.runs.empty() ? 0 : v / static_cast<real>(s.runs.size());
}

/// Hidden sizes follow the protocol: grid-search scored by validation
/// accuracy on a few splits, then the winner runs the full experiment.
/// Single-layer GCN/Cross map straight to the class dimension, so only
/// two-layer models and GIN's MLP width have anything to search.
training::ExperimentSummary run_cell(const graph::GraphDataset& ds, config::ExperimentConfig cfg,
                                     bool grid, index_t* chosen = nullptr) {
  const bool grid_gin = grid && cfg.variant == "gin";
  const bool grid_hidden = grid && !grid_gin && cfg.layers == 2;
  if (chosen) *chosen = 0;
  if (grid_gin || grid_hidden) {
    const std::vector<index_t> cand = grid_gin ? std::vector<index_t>{32, 64, 128, 256}
                                               : std::vector<index_t>{16, 32, 64, 128};
    config::ExperimentConfig probe = cfg;
    probe.n_splits = std::min<index_t>(4, cfg.n_splits);
    real best = -1;
    index_t best_v = cand.front();
    for (index_t v : cand) {
      (grid_gin ? probe.gin_hidden : probe.hidden) = v;
      const real val = mean_best_val(run_cell_at(ds, probe));
      if (val > best) {
        best = val;
        best_v = v;
      }
    }
    (grid_gin ? cfg.gin_hidden : cfg.hidden) = best_v;
    if (chosen) *chosen = best_v;
  }
  return run_cell_at(ds, cfg);
}

int run_reproduce(const ReproduceArgs& a) {
  if (a.table != 3 && a.table != 4 && a.table != 5)
    throw DataError("reproduce: table must be 3, 4, or 5");
  const json targets = load_targets(a.targets_path);
  const std::string key = "table" + std::to_string(a.table);
  if (!targets.contains(key)) throw DataError("targets file lacks entry '" + key + "'");
  const json& tspec = targets.at(key);

  // The protocol leaves the epoch budget open; the 12-feature synthetic
  // cells converge slowly (tiny product margins), the bag-of-words runs are
  // done within a few hundred epochs. Best-validation-epoch selection makes
  // a generous budget safe.
  const index_t epochs = a.epochs > 0 ? a.epochs : (a.table == 5 ? 300 : 2000);

  config::ExperimentConfig base;
  base.n_splits = a.splits;
  base.seed = a.seed;
  base.jobs = a.jobs;
  base.epochs = epochs;

  std::map<std::string, CellResult> cells;
  std::vector<std::string> cell_order;
  std::ostringstream report;

  if (a.table == 3 || a.table == 4) {
    const std::string ds_dir =
        (fs::path(a.data_root) / tspec.at("dataset").get<std::string>()).string();
    if (!fs::exists(fs::path(ds_dir) / "meta.json"))
      throw DataError("missing dataset: " + ds_dir + " (run prepare first)");
    const graph::GraphDataset ds = load_dataset_verbose(ds_dir);
    report << "Table " << a.table << " reproduction on " << ds.name << " (" << a.splits
           << " splits, seed " << a.seed << ", epochs " << epochs << ")\n\n";
    for (const json& jc : tspec.at("cells")) {
      config::ExperimentConfig cfg = base;
      cfg.dataset = ds_dir;
      if (a.table == 3) {
        cfg.variant = jc.at("variant").get<std::string>();
        cfg.layers = jc.at("layers").get<index_t>();
      } else {
        cfg.variant = "cross";
        cfg.layers = tspec.at("layers").get<index_t>();
        cfg.cross_layer1 = jc.at("cross_layer1").get<bool>();
        cfg.cross_layer2 = jc.at("cross_layer2").get<bool>();
      }
      CellResult r;
      r.id = jc.at("id").get<std::string>();
      const auto s = run_cell(ds, cfg, true, &r.hidden);
      r.mean = s.mean_test_acc * 100.0;
      r.stdev = s.std_test_acc * 100.0;
      r.paper_mean = jc.at("paper_mean").get<real>();
      r.paper_std = jc.at("paper_std").get<real>();
      cells[r.id] = r;
      cell_order.push_back(r.id);
      std::cerr << "cell " << r.id << ": " << fmt(r.mean, 2) << " +- " << fmt(r.stdev, 2)
                << (r.hidden ? " (width " + std::to_string(r.hidden) + ")" : "") << "\n";
    }
  } else {
    std::vector<std::string> wanted;
    if (!a.datasets.empty()) {
      std::stringstream ss(a.datasets);
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) wanted.push_back(tok);
    } else {
      for (const json& jc : tspec.at("cells")) {
        const std::string d = jc.at("dataset").get<std::string>();
        if (std::find(wanted.begin(), wanted.end(), d) == wanted.end()) wanted.push_back(d);
      }
    }
    report << "Table 5 reproduction (" << a.splits << " splits, seed " << a.seed << ", epochs "
           << epochs << ")\n\n";
    std::map<std::string, graph::GraphDataset> loaded;
    for (const auto& d : wanted) {
      const std::string dir = (fs::path(a.data_root) / d).string();
      if (!fs::exists(fs::path(dir) / "meta.json"))
        throw DataError("missing dataset: " + dir + " (run prepare first)");
      loaded[d] = load_dataset_verbose(dir);
    }
    for (const json& jc : tspec.at("cells")) {
      const std::string d = jc.at("dataset").get<std::string>();
      if (!loaded.count(d)) continue;
      config::ExperimentConfig cfg = base;
      cfg.dataset = (fs::path(a.data_root) / d).string();
      cfg.variant = jc.at("variant").get<std::string>();
      cfg.layers = tspec.at("layers").get<index_t>();
      // Fixed width here: the baseline's published optimum; the stand-in
      // features are calibrated against it.
      const auto s = run_cell(loaded[d], cfg, false);
      CellResult r;
      r.id = jc.at("id").get<std::string>();
      r.mean = s.mean_test_acc * 100.0;
      r.stdev = s.std_test_acc * 100.0;
      r.paper_mean = jc.at("paper_mean").get<real>();
      r.paper_std = jc.at("paper_std").get<real>();
      r.tol = jc.value("tol", -1.0);
      cells[r.id] = r;
      cell_order.push_back(r.id);
      std::cerr << "cell " << r.id << ": " << fmt(r.mean, 2) << " +- " << fmt(r.stdev, 2) << "\n";
    }
  }

  report << "  " << std::left << std::setw(24) << "cell" << std::setw(20) << "measured"
         << std::setw(18) << "paper" << "width\n";
  for (const auto& id : cell_order) {
    const auto& r = cells[id];
    report << "  " << std::left << std::setw(24) << r.id << std::setw(20)
           << (fmt(r.mean, 1) + " +- " + fmt(r.stdev, 1)) << std::setw(18)
           << (fmt(r.paper_mean, 1) + " +- " + fmt(r.paper_std, 1))
           << (r.hidden ? std::to_string(r.hidden) : "-") << "\n";
  }

  json verdicts = json::array();
  bool all_pass = true;
  report << "\ncriteria:\n";
  auto record = [&](const std::string& id, bool pass, const std::string& detail) {
    all_pass = all_pass && pass;
    report << "  [" << (pass ? "PASS" : "FAIL") << "] " << id << ": " << detail << "\n";
    verdicts.push_back({{"id", id}, {"pass", pass}, {"detail", detail}});
  };

  for (const auto& id : cell_order) {
    const auto& r = cells[id];
    if (r.tol >= 0)
      record(id + "_within", std::abs(r.mean - r.paper_mean) <= r.tol,
             "measured " + fmt(r.mean, 1) + " vs paper " + fmt(r.paper_mean, 1) + " (tol " +
                 fmt(r.tol, 1) + ")");
  }
  if (tspec.contains("criteria")) {
    for (const json& jc : tspec.at("criteria")) {
      const std::string id = jc.at("id").get<std::string>();
      const std::string kind = jc.at("kind").get<std::string>();
      auto have = [&](const std::string& c) { return cells.count(c) > 0; };
      if (kind == "floor") {
        const std::string c = jc.at("cell").get<std::string>();
        if (!have(c)) continue;
        const real min = jc.at("min").get<real>();
        record(id, cells[c].mean >= min, "mean " + fmt(cells[c].mean, 1) + " >= " + fmt(min, 1));
      } else if (kind == "gap") {
        const std::string ca = jc.at("a").get<std::string>(), cb = jc.at("b").get<std::string>();
        if (!have(ca) || !have(cb)) continue;
        const real min_gap = jc.at("min_gap").get<real>();
        const real gap = cells[ca].mean - cells[cb].mean;
        record(id, gap >= min_gap,
               ca + " - " + cb + " = " + fmt(gap, 1) + " >= " + fmt(min_gap, 1));
      } else if (kind == "approx") {
        const std::string ca = jc.at("a").get<std::string>(), cb = jc.at("b").get<std::string>();
        if (!have(ca) || !have(cb)) continue;
        const real tol = jc.at("tol").get<real>();
        const real diff = std::abs(cells[ca].mean - cells[cb].mean);
        record(id, diff <= tol, "|" + ca + " - " + cb + "| = " + fmt(diff, 1) + " <= " +
                                    fmt(tol, 1));
      } else {
        throw DataError("unknown criterion kind '" + kind + "' in targets file");
      }
    }
  }
  report << "\noverall: " << (all_pass ? "PASS" : "FAIL") << "\n";

  json out = {{"table", a.table},
              {"splits", a.splits},
              {"seed", a.seed},
              {"epochs", epochs},
              {"overall_pass", all_pass},
              {"criteria", verdicts},
              {"cells", json::array()}};
  for (const auto& id : cell_order) {
    const auto& r = cells[id];
    out["cells"].push_back({{"id", r.id},
                            {"mean", r.mean},
                            {"std", r.stdev},
                            {"paper_mean", r.paper_mean},
                            {"paper_std", r.paper_std},
                            {"hidden", r.hidden}});
  }
  const std::string base_name = (fs::path(a.out_dir) / ("table" + std::to_string(a.table))).string();
  write_text_file(base_name + "_report.txt", report.str());
  write_text_file(base_name + "_verdict.json", out.dump(2) + "\n");
  std::cout << report.str();
  std::cout << "wrote " << base_name << "_report.txt and " << base_name << "_verdict.json\n";
  return 0;
}

// -------------------------------------------------------------- gradcheck --

struct GradcheckArgs {
  index_t d = 4, e = 3, k = 2;
  index_t trials = 20;
  std::uint64_t seed = 1;
  real step = 1e-6;
  bool corrupt = false;  // test hook: perturb one analytic gradient
};

DenseMatrix random_matrix(index_t r, index_t c, RngState& rng, real scale = 1.0) {
  DenseMatrix m(r, c);
  for (index_t i = 0; i < m.size(); ++i) m.data()[i] = rng.next_uniform(-scale, scale);
  return m;
}

/// Analytic-vs-finite-difference error for one transform layer, probing all
/// parameters and the input under the scalar loss sum(h ⊙ R).
real layer_fd_error(const model::LayerSpec& spec, bool bias_outside, RngState& rng, real step,
                    bool corrupt) {
  model::ModelConfig one;
  one.layers = {spec};
  model::Params params = model::init_params(one, rng.child(7));
  // Non-degenerate alpha/bias so every term participates.
  if (spec.kind == model::LayerKind::Cross)
    for (index_t j = 0; j < params.layers[0].alpha.cols(); ++j)
      params.layers[0].alpha(0, j) = rng.next_uniform(0.5, 1.5);
  for (auto& b : params.layers[0].b)
    for (index_t j = 0; j < b.size(); ++j) b.data()[j] = rng.next_uniform(-0.5, 0.5);

  const index_t n = 3;
  DenseMatrix x = random_matrix(n, spec.in_dim, rng);
  const DenseMatrix r_weights = random_matrix(n, spec.out_dim, rng);

  auto [h, cache] = model::transform_forward(x, spec, params.layers[0], bias_outside);
  DenseMatrix grad_x;
  model::LayerGrads g = model::transform_backward(r_weights, spec, params.layers[0], cache,
                                                  bias_outside, false, grad_x);
  if (corrupt && !g.W.empty()) g.W[0](0, 0) += 1e-2;

  std::vector<DenseMatrix*> tensors{&x};
  std::vector<const DenseMatrix*> ctensors{&x};
  std::vector<const DenseMatrix*> gradients{&grad_x};
  for (std::size_t i = 0; i < params.layers[0].W.size(); ++i) {
    tensors.push_back(&params.layers[0].W[i]);
    ctensors.push_back(&params.layers[0].W[i]);
    gradients.push_back(&g.W[i]);
  }
  for (std::size_t i = 0; i < params.layers[0].b.size(); ++i) {
    tensors.push_back(&params.layers[0].b[i]);
    ctensors.push_back(&params.layers[0].b[i]);
    gradients.push_back(&g.b[i]);
  }
  if (spec.kind == model::LayerKind::Cross) {
    tensors.push_back(&params.layers[0].alpha);
    ctensors.push_back(&params.layers[0].alpha);
    gradients.push_back(&g.alpha);
  }

  const std::vector<real> theta0 = oracle::pack_tensors(ctensors);
  auto f = [&](const std::vector<real>& theta) {
    oracle::unpack_tensors(theta, tensors);
    auto [hh, cc] = model::transform_forward(x, spec, params.layers[0], bias_outside);
    (void)cc;
    return ops::dot_all(hh, r_weights);
  };
  const std::vector<real> fd = oracle::finite_difference_gradients(f, theta0, step);
  oracle::unpack_tensors(theta0, tensors);  // restore
  return oracle::max_relative_error(oracle::pack_tensors(gradients), fd);
}

index_t uniform_below(RngState& rng, index_t n) {
  return static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(n));
}

real rank1_equivalence_error(index_t max_d, index_t max_k, index_t trials, RngState rng) {
  real worst = 0;
  for (index_t t = 0; t < trials; ++t) {
    const index_t d = 2 + uniform_below(rng, max_d - 1);
    const index_t k = 1 + uniform_below(rng, max_k);
    std::vector<std::vector<real>> factors(k);
    std::vector<real> x(d);
    for (auto& f : factors) {
      f.resize(d);
      for (auto& v : f) v = rng.next_uniform(-1.5, 1.5);
    }
    for (auto& v : x) v = rng.next_uniform(-1.5, 1.5);

    // Factorized layer: single unit, alpha = e_k, identity activation, b = 0.
    model::LayerSpec spec;
    spec.kind = model::LayerKind::Cross;
    spec.in_dim = d;
    spec.out_dim = 1;
    spec.order = k;
    spec.act = model::Activation::Identity;
    model::LayerParams p;
    for (index_t j = 0; j < k; ++j) p.W.push_back(DenseMatrix(1, d, factors[j]));
    p.b.push_back(DenseMatrix(1, 1));
    p.alpha = DenseMatrix(1, k);
    p.alpha(0, k - 1) = 1.0;
    const auto [h, cache] = model::cross_transform_forward(DenseMatrix(1, d, x), spec, p);
    (void)cache;

    const auto tensor = oracle::rank1_tensor_from_factors(factors);
    const auto brute = oracle::brute_force_cross_transform(x, {tensor}, {0.0});

    real prod = 1.0;
    for (index_t j = 0; j < k; ++j) {
      real dot = 0;
      for (index_t i = 0; i < d; ++i) dot += factors[j][i] * x[i];
      prod *= dot;
    }
    worst = std::max(worst, std::abs(h(0, 0) - brute[0]));
    worst = std::max(worst, std::abs(h(0, 0) - prod));
  }
  return worst;
}

real end_to_end_fd_error(std::uint64_t seed, real step) {
  RngState rng(seed);
  graph::GraphDataset ds = graph::synthesize_bench_graph(12, 18, 5, 3, rng.child(0));
  model::ModelConfig cfg;
  cfg.dropout = 0.0;  // finite differences need a deterministic forward
  cfg.weight_decay = 1e-3;
  model::LayerSpec l1;
  l1.kind = model::LayerKind::Cross;
  l1.in_dim = 5;
  l1.out_dim = 4;
  l1.order = 2;
  l1.act = model::Activation::Relu;
  model::LayerSpec l2 = l1;
  l2.in_dim = 4;
  l2.out_dim = 3;
  l2.act = model::Activation::SoftmaxRows;
  cfg.layers = {l1, l2};

  const training::PreparedData data = training::prepare_data(ds);
  model::Params params = model::init_params(cfg, rng.child(1));
  const std::vector<index_t> mask = ds.fixed_split.train;

  std::vector<DenseMatrix*> tensors;
  std::vector<const DenseMatrix*> ctensors;
  model::for_each_tensor(cfg, params, true, [&](const std::string&, DenseMatrix& m) {
    tensors.push_back(&m);
    ctensors.push_back(&m);
  });
  const std::vector<real> theta0 = oracle::pack_tensors(ctensors);

  auto loss_at = [&](const std::vector<real>& theta) {
    oracle::unpack_tensors(theta, tensors);
    RngState r2(0);
    auto [probs, caches] = model::model_forward(cfg, params, data.a_hat, data.X, r2, false);
    (void)caches;
    return training::masked_loss(probs, data.labels, mask, cfg, params, cfg.weight_decay);
  };
  const std::vector<real> fd = oracle::finite_difference_gradients(loss_at, theta0, step);
  oracle::unpack_tensors(theta0, tensors);

  RngState r2(0);
  auto [probs, caches] = model::model_forward(cfg, params, data.a_hat, data.X, r2, false);
  DenseMatrix grad_z(probs.rows(), probs.cols());
  for (index_t i : mask) {
    for (index_t j = 0; j < probs.cols(); ++j)
      grad_z(i, j) = probs(i, j) - data.Y(i, j);
  }
  model::Grads grads = model::model_backward(cfg, params, data.a_hat, caches, grad_z);
  std::vector<const DenseMatrix*> gts;
  std::size_t gi = 0;
  model::for_each_tensor(cfg, grads, true, [&](const std::string&, DenseMatrix& m) {
    ops::axpy(2.0 * cfg.weight_decay, *ctensors[gi++], m);
    gts.push_back(&m);
  });

  return oracle::max_relative_error(oracle::pack_tensors(gts), fd);
}

int run_gradcheck(const GradcheckArgs& a) {
  if (a.d < 2 || a.e < 1 || a.k < 1) throw DataError("gradcheck: dims must be d>=2, e>=1, k>=1");
  RngState rng(a.seed);
  bool ok = true;
  auto report = [&](const std::string& name, real err, real threshold) {
    const bool pass = err < threshold;
    ok = ok && pass;
    std::cout << "check " << std::left << std::setw(28) << name << " max_err=" << std::scientific
              << err << std::defaultfloat << "  threshold=" << threshold << "  "
              << (pass ? "PASS" : "FAIL") << "\n";
  };

  report("rank1-equivalence", rank1_equivalence_error(std::min<index_t>(a.d + 2, 6),
                                                      std::min<index_t>(a.k + 1, 3), 100,
                                                      rng.child(1)),
         1e-10);

  auto spec_for = [&](model::LayerKind kind, model::Activation act) {
    model::LayerSpec s;
    s.kind = kind;
    s.in_dim = a.d;
    s.out_dim = a.e;
    s.order = a.k;
    s.act = act;
    return s;
  };

  real worst;
  RngState r2 = rng.child(2);
  worst = 0;
  for (index_t t = 0; t < a.trials; ++t)
    worst = std::max(worst, layer_fd_error(spec_for(model::LayerKind::Cross,
                                                    t % 2 ? model::Activation::Relu
                                                          : model::Activation::Identity),
                                           false, r2, a.step, a.corrupt && t == 0));
  report("cross-grad", worst, 1e-5);

  RngState r3 = rng.child(3);
  worst = 0;
  for (index_t t = 0; t < a.trials; ++t)
    worst = std::max(worst, layer_fd_error(spec_for(model::LayerKind::Cross,
                                                    model::Activation::Identity),
                                           true, r3, a.step, false));
  report("cross-grad-bias-outside", worst, 1e-5);

  RngState r4 = rng.child(4);
  worst = 0;
  for (index_t t = 0; t < a.trials; ++t)
    worst = std::max(worst, layer_fd_error(spec_for(model::LayerKind::Vanilla,
                                                    t % 2 ? model::Activation::Relu
                                                          : model::Activation::Identity),
                                           false, r4, a.step, false));
  report("vanilla-grad", worst, 1e-5);

  RngState r5 = rng.child(5);
  worst = 0;
  for (index_t t = 0; t < a.trials; ++t)
    worst = std::max(worst, layer_fd_error(spec_for(model::LayerKind::Gin,
                                                    t % 2 ? model::Activation::Relu
                                                          : model::Activation::Identity),
                                           false, r5, a.step, false));
  report("gin-grad", worst, 1e-5);

  RngState r6 = rng.child(6);
  worst = 0;
  for (index_t t = 0; t < a.trials; ++t)
    worst = std::max(worst,
                     layer_fd_error(spec_for(model::LayerKind::Cross,
                                             model::Activation::SoftmaxRows),
                                    false, r6, a.step, false));
  report("softmax-grad", worst, 1e-5);

  worst = 0;
  for (index_t t = 0; t < std::max<index_t>(3, a.trials / 4); ++t)
    worst = std::max(worst, end_to_end_fd_error(hash_combine(a.seed, 100 + t), a.step));
  report("end-to-end-loss", worst, 1e-4);

  std::cout << (ok ? "all gradient checks passed" : "GRADIENT CHECKS FAILED") << "\n";
  return ok ? 0 : 3;
}

// ------------------------------------------------------------------ bench --

struct BenchArgs {
  index_t nodes = 30000;
  index_t edges = 386742;
  index_t features = 602;
  index_t classes = 41;
  std::string hidden = "32,64,128,256,512,1024";
  std::string variants = "gcn,gin,cross";
  index_t epochs = 50;
  std::uint64_t seed = 1;
  std::string out_path = "bench.csv";
};

real bench_one(const training::PreparedData& data, const graph::SplitSpec& split,
               const model::ModelConfig& mc, index_t epochs, std::uint64_t seed) {
  model::Params params = model::init_params(mc, RngState(seed).child(0));
  const RngState dropout_root = RngState(seed).child(1);
  training::AdamState adam = training::make_adam_state(mc, training::AdamParams{});

  using clock = std::chrono::steady_clock;
  real total = 0;
  for (index_t epoch = 0; epoch < epochs; ++epoch) {
    const auto t0 = clock::now();
    RngState epoch_rng = dropout_root.child(epoch);
    auto [probs, caches] = model::model_forward(mc, params, data.a_hat, data.X, epoch_rng, true);
    DenseMatrix grad_z(probs.rows(), probs.cols());
    for (index_t i : split.train)
      for (index_t j = 0; j < probs.cols(); ++j) grad_z(i, j) = probs(i, j) - data.Y(i, j);
    model::Grads grads = model::model_backward(mc, params, data.a_hat, caches, grad_z);
    std::vector<DenseMatrix*> gt;
    model::for_each_tensor(mc, grads, true,
                           [&](const std::string&, DenseMatrix& m) { gt.push_back(&m); });
    std::vector<const DenseMatrix*> pt;
    model::for_each_tensor(mc, params, true,
                           [&](const std::string&, const DenseMatrix& m) { pt.push_back(&m); });
    for (std::size_t i = 0; i < gt.size(); ++i) ops::axpy(2.0 * mc.weight_decay, *pt[i], *gt[i]);
    training::adam_step(mc, params, grads, adam);
    total += std::chrono::duration<real>(clock::now() - t0).count();
  }
  return total / static_cast<real>(epochs);
}

int run_bench(const BenchArgs& a) {
  std::vector<index_t> hiddens;
  {
    std::stringstream ss(a.hidden);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) hiddens.push_back(std::stoll(tok));
  }
  std::vector<std::string> variants;
  {
    std::stringstream ss(a.variants);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) variants.push_back(tok);
  }
  if (hiddens.empty() || variants.empty()) throw DataError("bench: empty hidden/variant list");

  std::cerr << "generating synthetic graph: " << a.nodes << " nodes, " << a.edges << " edges, "
            << a.features << " features\n";
  const graph::GraphDataset ds =
      graph::synthesize_bench_graph(a.nodes, a.edges, a.features, a.classes, RngState(a.seed));
  const training::PreparedData data = training::prepare_data(ds);

  std::ostringstream csv;
  csv << "variant,hidden,epochs,avg_epoch_seconds\n";
  std::map<std::pair<std::string, index_t>, real> times;
  for (const auto& variant : variants) {
    for (index_t e : hiddens) {
      config::ExperimentConfig cfg;
      cfg.variant = variant;
      cfg.layers = 2;
      cfg.hidden = e;
      cfg.gin_hidden = e;  // matched widths
      cfg.dataset = "bench";
      const model::ModelConfig mc = config::build_model_config(cfg, ds.n_features(), ds.n_classes);
      const real avg = bench_one(data, ds.fixed_split, mc, a.epochs, a.seed);
      times[{variant, e}] = avg;
      csv << variant << "," << e << "," << a.epochs << "," << fmt(avg, 6) << "\n";
      std::cerr << variant << " E=" << e << ": " << fmt(avg, 4) << " s/epoch\n";
    }
  }
  write_text_file(a.out_path, csv.str());
  std::cout << "wrote " << a.out_path << "\n";

  const bool have_all = std::find(variants.begin(), variants.end(), "cross") != variants.end();
  if (have_all) {
    for (index_t e : hiddens) {
      std::ostringstream line;
      line << "E=" << e << ":";
      if (times.count({"gcn", e}))
        line << " cross/gcn=" << fmt(times[{"cross", e}] / times[{"gcn", e}], 3);
      if (times.count({"gin", e}))
        line << " cross/gin=" << fmt(times[{"cross", e}] / times[{"gin", e}], 3);
      std::cout << line.str() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-feature graph convolution: training and reproduction toolkit"};
  app.require_subcommand(1);

  PrepareArgs pa;
  auto* prep = app.add_subcommand("prepare", "Convert or synthesize a dataset directory");
  prep->add_option("name", pa.name, "dataset name for raw conversion (expects NAME.content/.cites)");
  prep->add_option("--in", pa.in_dir, "directory holding raw citation files");
  prep->add_option("--content", pa.content_path, "explicit path to the .content file");
  prep->add_option("--cites", pa.cites_path, "explicit path to the .cites file");
  prep->add_option("--out", pa.out_dir, "output dataset directory")->required();
  prep->add_flag("--synthesize-cross", pa.synthesize_cross,
                 "derive 12-dim sign-rule features from a 6-class base dataset");
  prep->add_option("--base", pa.base_dir, "base dataset for --synthesize-cross");
  prep->add_option("--surrogate", pa.surrogate,
                   "generate a synthetic stand-in shaped like a known dataset");
  prep->add_option("--seed", pa.seed, "generation seed");
  prep->add_option("--val-size", pa.val_size, "fixed validation set size (raw conversion)");
  prep->add_option("--test-size", pa.test_size, "fixed test set size (raw conversion)");
  prep->add_option("--train-per-class", pa.train_per_class,
                   "fixed train nodes per class (raw conversion)");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a model over stratified splits");
  train->add_option("-c,--config", ta.config_path, "config file (key = value lines)");
  train->add_option("--set", ta.overrides, "override a config key (key=value, repeatable)");
  train->add_option("--out", ta.out_path, "output JSON path (CSV written alongside)");
  train->add_option("--seed", ta.seed, "override the base seed");
  train->add_option("--jobs", ta.jobs, "parallel runs across splits");

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "Run an experiment per value on one axis");
  sweep->add_option("-c,--config", sa.config_path, "config file");
  sweep->add_option("--set", sa.overrides, "override a config key (repeatable)");
  sweep->add_option("--axis", sa.axis, "hidden | alpha2 | dropout | gin-hidden")->required();
  sweep->add_option("--values", sa.values, "comma list overriding the default grid");
  sweep->add_option("--out", sa.out_path, "output CSV path");
  sweep->add_option("--seed", sa.seed, "override the base seed");
  sweep->add_option("--jobs", sa.jobs, "parallel runs across splits");

  ReproduceArgs ra;
  auto* rep = app.add_subcommand("reproduce", "Re-run a published table and compare");
  rep->add_option("table", ra.table, "table number: 3, 4, or 5")->required();
  rep->add_option("--data-root", ra.data_root, "directory containing prepared datasets");
  rep->add_option("--out", ra.out_dir, "output directory for report + verdict");
  rep->add_option("--targets", ra.targets_path, "targets JSON (default tools/reproduce_targets.json)");
  rep->add_option("--datasets", ra.datasets, "comma filter of datasets (table 5)");
  rep->add_option("--splits", ra.splits, "splits per cell");
  rep->add_option("--seed", ra.seed, "base seed");
  rep->add_option("--jobs", ra.jobs, "parallel runs across splits");
  rep->add_option("--epochs", ra.epochs, "epochs per run (0 = per-table default)");

  GradcheckArgs ga;
  auto* gc = app.add_subcommand("gradcheck", "Oracle equivalence and finite-difference suites");
  gc->add_option("--d", ga.d, "input dimension");
  gc->add_option("--e", ga.e, "output dimension");
  gc->add_option("--k", ga.k, "cross order");
  gc->add_option("--trials", ga.trials, "random instances per check");
  gc->add_option("--seed", ga.seed, "seed");
  gc->add_option("--step", ga.step, "finite-difference step");
  gc->add_flag("--corrupt", ga.corrupt, "deliberately corrupt one gradient (self-test)");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Per-epoch training time on a synthetic graph");
  bench->add_option("--nodes", ba.nodes, "node count");
  bench->add_option("--edges", ba.edges, "edge count");
  bench->add_option("--features", ba.features, "feature dimension");
  bench->add_option("--classes", ba.classes, "class count");
  bench->add_option("--hidden", ba.hidden, "comma list of hidden sizes");
  bench->add_option("--variants", ba.variants, "comma list of variants");
  bench->add_option("--epochs", ba.epochs, "epochs per (variant, hidden) cell");
  bench->add_option("--seed", ba.seed, "seed");
  bench->add_option("--out", ba.out_path, "output CSV path");

  try {
    app.parse(argc, argv);
    if (*prep) return run_prepare(pa);
    if (*train) return run_train(ta);
    if (*sweep) return run_sweep(sa);
    if (*rep) return run_reproduce(ra);
    if (*gc) return run_gradcheck(ga);
    if (*bench) return run_bench(ba);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
