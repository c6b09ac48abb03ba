#include "crossgcn/graph.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "crossgcn/ops.hpp"

namespace crossgcn::graph {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing or unreadable file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_on(const std::string& s, char delim) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == delim) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

index_t parse_index(const std::string& tok, const std::string& path, std::size_t lineno) {
  std::size_t pos = 0;
  index_t v = 0;
  try {
    v = std::stoll(tok, &pos);
  } catch (const std::exception&) {
    throw DataError(path + ":" + std::to_string(lineno) + ": expected integer, got '" + tok + "'");
  }
  if (pos != tok.size())
    throw DataError(path + ":" + std::to_string(lineno) + ": trailing junk in integer '" + tok +
                    "'");
  return v;
}

real parse_real(const std::string& tok, const std::string& path, std::size_t lineno) {
  std::size_t pos = 0;
  real v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw DataError(path + ":" + std::to_string(lineno) + ": expected number, got '" + tok + "'");
  }
  if (pos != tok.size())
    throw DataError(path + ":" + std::to_string(lineno) + ": trailing junk in number '" + tok +
                    "'");
  return v;
}

std::string fmt_real(real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void warn(std::vector<std::string>* warnings, const std::string& msg) {
  if (warnings) warnings->push_back(msg);
}

index_t uniform_below(RngState& rng, index_t n) {
  return static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(n));
}

/// First k elements of a partial Fisher-Yates shuffle of `pool` (consumed).
std::vector<index_t> sample_without_replacement(std::vector<index_t> pool, index_t k,
                                                RngState& rng) {
  const index_t n = static_cast<index_t>(pool.size());
  for (index_t i = 0; i < k; ++i) {
    const index_t j = i + uniform_below(rng, n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

/// Deduplicated symmetric binary adjacency from undirected (u, v) pairs.
SparseMatrixCSR adjacency_from_pairs(index_t n, const std::set<std::pair<index_t, index_t>>& edges) {
  std::vector<std::tuple<index_t, index_t, real>> coo;
  coo.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    coo.emplace_back(u, v, 1.0);
    coo.emplace_back(v, u, 1.0);
  }
  return SparseMatrixCSR::from_coo(n, n, std::move(coo));
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing or unreadable file: " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
}

void check_ids(const std::vector<index_t>& ids, index_t n, const std::string& what) {
  for (index_t id : ids)
    if (id < 0 || id >= n)
      throw DataError(what + " id " + std::to_string(id) + " out of range [0, " +
                      std::to_string(n) + ")");
}

void check_disjoint(const std::vector<index_t>& a, const std::vector<index_t>& b,
                    const std::string& what) {
  std::unordered_set<index_t> sa(a.begin(), a.end());
  for (index_t id : b)
    if (sa.count(id)) throw DataError("splits overlap (" + what + "): node " + std::to_string(id));
}

real draw_nonzero_normal(RngState& rng) {
  real v = rng.next_normal();
  while (v == 0.0) v = rng.next_normal();
  return v;
}

}  // namespace

DenseMatrix GraphDataset::features_as_dense() const {
  return features_sparse ? features_csr.to_dense() : features_dense;
}

SparseMatrixCSR read_matrix_market(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0].rfind("%%MatrixMarket", 0) != 0)
    throw DataError(path + ":1: missing MatrixMarket header");
  {
    std::istringstream hs(lines[0]);
    std::string tag, object, format, field, symmetry;
    hs >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "coordinate" || field != "real" || symmetry != "general")
      throw DataError(path + ":1: unsupported MatrixMarket type '" + lines[0] +
                      "' (need: matrix coordinate real general)");
  }
  std::size_t ln = 1;
  while (ln < lines.size() && (lines[ln].empty() || lines[ln][0] == '%')) ++ln;
  if (ln >= lines.size()) throw DataError(path + ": missing size line");
  index_t rows = 0, cols = 0, nnz = 0;
  {
    const auto toks = split_on(lines[ln], ' ');
    std::vector<std::string> t;
    for (const auto& s : toks)
      if (!s.empty()) t.push_back(s);
    if (t.size() != 3) throw DataError(path + ":" + std::to_string(ln + 1) + ": bad size line");
    rows = parse_index(t[0], path, ln + 1);
    cols = parse_index(t[1], path, ln + 1);
    nnz = parse_index(t[2], path, ln + 1);
  }
  std::vector<std::tuple<index_t, index_t, real>> coo;
  coo.reserve(nnz);
  index_t seen = 0;
  for (std::size_t i = ln + 1; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i][0] == '%') continue;
    const auto toks = split_on(lines[i], ' ');
    std::vector<std::string> t;
    for (const auto& s : toks)
      if (!s.empty()) t.push_back(s);
    if (t.size() != 3)
      throw DataError(path + ":" + std::to_string(i + 1) + ": expected 'row col value'");
    const index_t r = parse_index(t[0], path, i + 1) - 1;  // 1-based on disk
    const index_t c = parse_index(t[1], path, i + 1) - 1;
    const real v = parse_real(t[2], path, i + 1);
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw DataError(path + ":" + std::to_string(i + 1) + ": index out of bounds");
    coo.emplace_back(r, c, v);
    ++seen;
  }
  if (seen != nnz)
    throw DataError(path + ": header declares " + std::to_string(nnz) + " entries, found " +
                    std::to_string(seen));
  return SparseMatrixCSR::from_coo(rows, cols, std::move(coo));
}

void write_matrix_market(const std::string& path, const SparseMatrixCSR& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
  for (index_t i = 0; i < m.rows(); ++i)
    for (index_t p = m.indptr()[i]; p < m.indptr()[i + 1]; ++p)
      out << (i + 1) << " " << (m.indices()[p] + 1) << " " << fmt_real(m.values()[p]) << "\n";
}

GraphDataset load_dataset(const std::string& dir, std::vector<std::string>* warnings) {
  const fs::path root(dir);
  const json meta = load_json_file((root / "meta.json").string());
  if (!meta.contains("v") || meta.at("v").get<int>() != 1)
    throw DataError(dir + "/meta.json: unsupported or missing schema version");
  const index_t n = meta.at("n_nodes").get<index_t>();
  const index_t d = meta.at("n_features").get<index_t>();
  const index_t l = meta.at("n_classes").get<index_t>();
  if (n < 1 || d < 1 || l < 1) throw DataError(dir + "/meta.json: non-positive dimensions");

  GraphDataset ds;
  ds.name = root.filename().string();
  ds.n_classes = l;

  // edges.tsv
  {
    const std::string path = (root / "edges.tsv").string();
    const auto lines = read_lines(path);
    std::set<std::pair<index_t, index_t>> edges;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto toks = split_on(lines[i], '\t');
      if (toks.size() != 2)
        throw DataError(path + ":" + std::to_string(i + 1) + ": expected 'src<TAB>dst'");
      const index_t u = parse_index(toks[0], path, i + 1);
      const index_t v = parse_index(toks[1], path, i + 1);
      if (u < 0 || u >= n || v < 0 || v >= n)
        throw DataError(path + ":" + std::to_string(i + 1) + ": node id out of range [0, " +
                        std::to_string(n) + ")");
      if (u == v) {
        warn(warnings, path + ":" + std::to_string(i + 1) + ": self-loop dropped");
        continue;
      }
      const auto e = std::minmax(u, v);
      if (!edges.emplace(e.first, e.second).second)
        warn(warnings, path + ":" + std::to_string(i + 1) + ": duplicate edge " +
                           std::to_string(u) + "-" + std::to_string(v) + " deduplicated");
    }
    ds.adjacency = adjacency_from_pairs(n, edges);
  }

  // features
  {
    const fs::path mtx = root / "features.mtx";
    const fs::path csv = root / "features.dense.csv";
    if (fs::exists(mtx)) {
      ds.features_sparse = true;
      ds.features_csr = read_matrix_market(mtx.string());
      if (ds.features_csr.rows() != n || ds.features_csr.cols() != d)
        throw DataError(mtx.string() + ": shape [" + std::to_string(ds.features_csr.rows()) +
                        " x " + std::to_string(ds.features_csr.cols()) +
                        "] contradicts meta.json [" + std::to_string(n) + " x " +
                        std::to_string(d) + "]");
    } else if (fs::exists(csv)) {
      ds.features_sparse = false;
      const auto lines = read_lines(csv.string());
      std::vector<std::string> nonempty;
      for (const auto& s : lines)
        if (!s.empty()) nonempty.push_back(s);
      if (static_cast<index_t>(nonempty.size()) != n)
        throw DataError(csv.string() + ": " + std::to_string(nonempty.size()) + " rows, meta says " +
                        std::to_string(n));
      DenseMatrix f(n, d);
      for (index_t i = 0; i < n; ++i) {
        const auto toks = split_on(nonempty[i], ',');
        if (static_cast<index_t>(toks.size()) != d)
          throw DataError(csv.string() + ":" + std::to_string(i + 1) + ": " +
                          std::to_string(toks.size()) + " columns, meta says " + std::to_string(d));
        for (index_t j = 0; j < d; ++j) f(i, j) = parse_real(toks[j], csv.string(), i + 1);
      }
      ds.features_dense = std::move(f);
    } else {
      throw DataError(dir + ": neither features.mtx nor features.dense.csv found");
    }
  }

  // labels.csv
  {
    const std::string path = (root / "labels.csv").string();
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != "node,label")
      throw DataError(path + ":1: expected header 'node,label'");
    ds.labels.assign(n, -1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto toks = split_on(lines[i], ',');
      if (toks.size() != 2)
        throw DataError(path + ":" + std::to_string(i + 1) + ": expected 'node,label'");
      const index_t node = parse_index(toks[0], path, i + 1);
      const index_t lab = parse_index(toks[1], path, i + 1);
      if (node < 0 || node >= n)
        throw DataError(path + ":" + std::to_string(i + 1) + ": node id out of range");
      if (lab < 0 || lab >= l)
        throw DataError(path + ":" + std::to_string(i + 1) + ": label " + std::to_string(lab) +
                        " outside declared class count " + std::to_string(l));
      if (ds.labels[node] != -1)
        throw DataError(path + ":" + std::to_string(i + 1) + ": node " + std::to_string(node) +
                        " labeled twice");
      ds.labels[node] = lab;
    }
    for (index_t i = 0; i < n; ++i)
      if (ds.labels[i] == -1) throw DataError(path + ": node " + std::to_string(i) + " unlabeled");
  }

  // splits.json
  {
    const std::string path = (root / "splits.json").string();
    const json j = load_json_file(path);
    if (!j.contains("v") || j.at("v").get<int>() != 1)
      throw DataError(path + ": unsupported or missing schema version");
    ds.fixed_split.val = j.at("val").get<std::vector<index_t>>();
    ds.fixed_split.test = j.at("test").get<std::vector<index_t>>();
    if (j.contains("train")) ds.fixed_split.train = j.at("train").get<std::vector<index_t>>();
    check_ids(ds.fixed_split.val, n, "val");
    check_ids(ds.fixed_split.test, n, "test");
    check_ids(ds.fixed_split.train, n, "train");
    check_disjoint(ds.fixed_split.val, ds.fixed_split.test, "val/test");
    check_disjoint(ds.fixed_split.train, ds.fixed_split.val, "train/val");
    check_disjoint(ds.fixed_split.train, ds.fixed_split.test, "train/test");
  }

  return ds;
}

void save_dataset(const std::string& dir, const GraphDataset& ds) {
  const fs::path root(dir);
  fs::create_directories(root);
  const index_t n = ds.n_nodes();

  {
    std::ofstream out(root / "edges.tsv");
    if (!out) throw DataError("cannot write " + (root / "edges.tsv").string());
    for (index_t i = 0; i < ds.adjacency.rows(); ++i)
      for (index_t p = ds.adjacency.indptr()[i]; p < ds.adjacency.indptr()[i + 1]; ++p) {
        const index_t j = ds.adjacency.indices()[p];
        if (i < j) out << i << "\t" << j << "\n";
      }
  }

  if (ds.features_sparse) {
    write_matrix_market((root / "features.mtx").string(), ds.features_csr);
  } else {
    std::ofstream out(root / "features.dense.csv");
    if (!out) throw DataError("cannot write " + (root / "features.dense.csv").string());
    for (index_t i = 0; i < ds.features_dense.rows(); ++i) {
      for (index_t j = 0; j < ds.features_dense.cols(); ++j) {
        if (j) out << ",";
        out << fmt_real(ds.features_dense(i, j));
      }
      out << "\n";
    }
  }

  {
    std::ofstream out(root / "labels.csv");
    if (!out) throw DataError("cannot write " + (root / "labels.csv").string());
    out << "node,label\n";
    for (index_t i = 0; i < n; ++i) out << i << "," << ds.labels[i] << "\n";
  }

  {
    json j = {{"v", 1}, {"val", ds.fixed_split.val}, {"test", ds.fixed_split.test}};
    if (!ds.fixed_split.train.empty()) j["train"] = ds.fixed_split.train;
    std::ofstream out(root / "splits.json");
    if (!out) throw DataError("cannot write " + (root / "splits.json").string());
    out << j.dump(2) << "\n";
  }

  {
    const json j = {
        {"v", 1}, {"n_nodes", n}, {"n_features", ds.n_features()}, {"n_classes", ds.n_classes}};
    std::ofstream out(root / "meta.json");
    if (!out) throw DataError("cannot write " + (root / "meta.json").string());
    out << j.dump(2) << "\n";
  }
}

SparseMatrixCSR normalize_adjacency(const SparseMatrixCSR& a) {
  if (a.rows() != a.cols())
    throw ShapeError("normalize_adjacency: non-square adjacency [" + std::to_string(a.rows()) +
                     " x " + std::to_string(a.cols()) + "]");
  for (index_t i = 0; i < a.rows(); ++i)
    for (index_t p = a.indptr()[i]; p < a.indptr()[i + 1]; ++p) {
      if (a.indices()[p] == i)
        throw DataError("normalize_adjacency: adjacency has a stored self-loop at node " +
                        std::to_string(i));
      if (a.values()[p] != 1.0)
        throw DataError("normalize_adjacency: adjacency must be binary, found " +
                        std::to_string(a.values()[p]));
    }
  if (!a.is_symmetric()) throw DataError("normalize_adjacency: adjacency not symmetric");

  // Degrees of A + I.
  std::vector<real> deg(a.rows());
  for (index_t i = 0; i < a.rows(); ++i)
    deg[i] = static_cast<real>(a.indptr()[i + 1] - a.indptr()[i] + 1);

  std::vector<std::tuple<index_t, index_t, real>> coo;
  coo.reserve(a.nnz() + a.rows());
  for (index_t i = 0; i < a.rows(); ++i) {
    coo.emplace_back(i, i, 1.0 / deg[i]);
    for (index_t p = a.indptr()[i]; p < a.indptr()[i + 1]; ++p) {
      const index_t j = a.indices()[p];
      coo.emplace_back(i, j, 1.0 / std::sqrt(deg[i] * deg[j]));
    }
  }
  return SparseMatrixCSR::from_coo(a.rows(), a.cols(), std::move(coo));
}

DenseMatrix synthesize_cross_features(const std::vector<index_t>& labels, index_t n_classes,
                                      RngState rng) {
  if (n_classes != 6)
    throw DataError("cross-feature synthesis requires exactly 6 classes, got " +
                    std::to_string(n_classes));
  const index_t n = static_cast<index_t>(labels.size());
  DenseMatrix x(n, 12);
  for (index_t i = 0; i < n; ++i) {
    const index_t c = labels[i];
    if (c < 0 || c >= 6) throw DataError("label out of range at node " + std::to_string(i));
    for (index_t pair = 0; pair < 6; ++pair) {
      real a = draw_nonzero_normal(rng);
      real b = draw_nonzero_normal(rng);
      const bool want_positive = (pair == c);
      if ((a * b > 0) != want_positive) b = -b;  // flip the even-indexed (second) element
      x(i, 2 * pair) = a;
      x(i, 2 * pair + 1) = b;
    }
  }
  return x;
}

SplitSpec make_random_split(const std::vector<index_t>& labels, index_t n_classes,
                            const SplitSpec& fixed, index_t per_class, RngState rng) {
  const index_t n = static_cast<index_t>(labels.size());
  std::unordered_set<index_t> excluded;
  excluded.insert(fixed.val.begin(), fixed.val.end());
  excluded.insert(fixed.test.begin(), fixed.test.end());

  std::vector<std::vector<index_t>> pools(n_classes);
  for (index_t i = 0; i < n; ++i)
    if (!excluded.count(i)) pools[labels[i]].push_back(i);

  SplitSpec split;
  split.val = fixed.val;
  split.test = fixed.test;
  for (index_t c = 0; c < n_classes; ++c) {
    if (static_cast<index_t>(pools[c].size()) < per_class)
      throw DataError("class " + std::to_string(c) + " has only " +
                      std::to_string(pools[c].size()) + " nodes outside val/test, need " +
                      std::to_string(per_class));
    const auto picked = sample_without_replacement(std::move(pools[c]), per_class, rng);
    split.train.insert(split.train.end(), picked.begin(), picked.end());
  }
  std::sort(split.train.begin(), split.train.end());
  return split;
}

DenseMatrix one_hot_labels(const std::vector<index_t>& labels, index_t n_classes) {
  DenseMatrix y(static_cast<index_t>(labels.size()), n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes)
      throw DataError("label " + std::to_string(labels[i]) + " outside [0, " +
                      std::to_string(n_classes) + ") at node " + std::to_string(i));
    y(static_cast<index_t>(i), labels[i]) = 1.0;
  }
  return y;
}

GraphDataset convert_citation_raw(const std::string& content_path, const std::string& cites_path,
                                  const std::string& name, std::vector<std::string>* warnings,
                                  index_t n_val, index_t n_test, index_t per_class_train) {
  const auto content = read_lines(content_path);
  std::unordered_map<std::string, index_t> id_of;
  std::vector<std::string> label_strings;
  std::vector<std::tuple<index_t, index_t, real>> feat_coo;
  index_t d = -1;
  index_t n = 0;

  for (std::size_t li = 0; li < content.size(); ++li) {
    if (content[li].empty()) continue;
    const auto toks = split_on(content[li], '\t');
    if (toks.size() < 3)
      throw DataError(content_path + ":" + std::to_string(li + 1) +
                      ": expected 'id<TAB>features...<TAB>label'");
    const index_t row_d = static_cast<index_t>(toks.size()) - 2;
    if (d == -1)
      d = row_d;
    else if (row_d != d)
      throw DataError(content_path + ":" + std::to_string(li + 1) + ": row has " +
                      std::to_string(row_d) + " features, earlier rows " + std::to_string(d));
    if (!id_of.emplace(toks[0], n).second)
      throw DataError(content_path + ":" + std::to_string(li + 1) + ": duplicate id '" + toks[0] +
                      "'");
    for (index_t j = 0; j < d; ++j) {
      const real v = parse_real(toks[j + 1], content_path, li + 1);
      if (v != 0.0) feat_coo.emplace_back(n, j, v);
    }
    label_strings.push_back(toks.back());
    ++n;
  }
  if (n == 0) throw DataError(content_path + ": no rows");

  // Class ids assigned to label strings in sorted order (stable across runs).
  std::vector<std::string> classes(label_strings);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  std::map<std::string, index_t> class_of;
  for (std::size_t c = 0; c < classes.size(); ++c) class_of[classes[c]] = static_cast<index_t>(c);

  GraphDataset ds;
  ds.name = name;
  ds.n_classes = static_cast<index_t>(classes.size());
  ds.labels.resize(n);
  for (index_t i = 0; i < n; ++i) ds.labels[i] = class_of[label_strings[i]];
  ds.features_sparse = true;
  ds.features_csr =
      ops::row_normalize_sparse(SparseMatrixCSR::from_coo(n, d, std::move(feat_coo)));

  const auto cites = read_lines(cites_path);
  std::set<std::pair<index_t, index_t>> edges;
  for (std::size_t li = 0; li < cites.size(); ++li) {
    if (cites[li].empty()) continue;
    const auto toks = split_on(cites[li], '\t');
    if (toks.size() != 2)
      throw DataError(cites_path + ":" + std::to_string(li + 1) + ": expected 'id<TAB>id'");
    const auto a = id_of.find(toks[0]);
    const auto b = id_of.find(toks[1]);
    if (a == id_of.end() || b == id_of.end()) {
      warn(warnings, cites_path + ":" + std::to_string(li + 1) + ": unknown id, edge skipped");
      continue;
    }
    if (a->second == b->second) {
      warn(warnings, cites_path + ":" + std::to_string(li + 1) + ": self-citation dropped");
      continue;
    }
    const auto e = std::minmax(a->second, b->second);
    edges.emplace(e.first, e.second);
  }
  ds.adjacency = adjacency_from_pairs(n, edges);

  // The raw files carry no split; fix one deterministically.
  if (n < n_val + n_test + per_class_train * ds.n_classes)
    throw DataError("dataset too small for requested split sizes (" + std::to_string(n) +
                    " nodes)");
  RngState split_rng(0);
  std::vector<index_t> order(n);
  for (index_t i = 0; i < n; ++i) order[i] = i;
  order = sample_without_replacement(std::move(order), n, split_rng);
  ds.fixed_split.val.assign(order.begin(), order.begin() + n_val);
  ds.fixed_split.test.assign(order.begin() + n_val, order.begin() + n_val + n_test);
  std::sort(ds.fixed_split.val.begin(), ds.fixed_split.val.end());
  std::sort(ds.fixed_split.test.begin(), ds.fixed_split.test.end());
  {
    std::unordered_set<index_t> used(ds.fixed_split.val.begin(), ds.fixed_split.val.end());
    used.insert(ds.fixed_split.test.begin(), ds.fixed_split.test.end());
    std::vector<index_t> taken(ds.n_classes, 0);
    for (index_t i = 0; i < n && static_cast<index_t>(ds.fixed_split.train.size()) <
                                     per_class_train * ds.n_classes;
         ++i) {
      if (used.count(i) || taken[ds.labels[i]] >= per_class_train) continue;
      ds.fixed_split.train.push_back(i);
      ++taken[ds.labels[i]];
    }
    for (index_t c = 0; c < ds.n_classes; ++c)
      if (taken[c] < per_class_train)
        throw DataError("class " + std::to_string(c) + " has only " + std::to_string(taken[c]) +
                        " nodes left for the fixed train split, need " +
                        std::to_string(per_class_train));
  }
  return ds;
}

std::optional<SurrogateSpec> surrogate_spec_for(const std::string& name) {
  // Graph shape constants beyond the headline counts follow the commonly
  // reported component statistics for these corpora (Citeseer: 438
  // components with a giant of 2110; Cora: 78 components, giant 2485;
  // Pubmed: connected). topic_mix is calibrated so a two-layer GCN lands
  // near its published accuracy.
  if (name == "citeseer")
    return SurrogateSpec{"citeseer", 3312, 4732, 6, 3703, 0.74, 32, 0.33, 2110, 437, 240, 140};
  if (name == "cora")
    return SurrogateSpec{"cora", 2708, 5429, 7, 1433, 0.81, 18, 0.55, 2485, 77, 50, 160};
  if (name == "pubmed")
    return SurrogateSpec{"pubmed", 19717, 44338, 3, 500, 0.80, 50, 0.50, 19717, 0, 0, 1200};
  return std::nullopt;
}

GraphDataset synthesize_surrogate_citation(const SurrogateSpec& spec, RngState rng) {
  const index_t n = spec.n_nodes;
  const index_t l = spec.n_classes;
  if (spec.lcc_size > n || spec.n_isolated > spec.n_small_components ||
      spec.n_hubs < 1 || spec.n_hubs > spec.lcc_size)
    throw DataError("inconsistent surrogate shape for " + spec.name);
  GraphDataset ds;
  ds.name = spec.name;
  ds.n_classes = l;
  ds.labels.assign(n, -1);

  // Class budgets keep the label distribution balanced while letting small
  // components stay topically pure.
  std::vector<index_t> budget(l, 0);
  for (index_t i = 0; i < n; ++i) ++budget[i % l];
  auto take_class = [&](index_t preferred, real purity) {
    if (preferred >= 0 && budget[preferred] > 0 && rng.next_uniform() < purity) {
      --budget[preferred];
      return preferred;
    }
    index_t left = 0;
    for (index_t c = 0; c < l; ++c) left += budget[c];
    index_t pick = uniform_below(rng, left);
    for (index_t c = 0; c < l; ++c) {
      if (pick < budget[c]) {
        --budget[c];
        return c;
      }
      pick -= budget[c];
    }
    throw DataError("class budget exhausted");
  };

  // --- component plan: singletons, small trees, one giant ---------------
  const index_t small_nodes = n - spec.lcc_size;
  const index_t n_multi = spec.n_small_components - spec.n_isolated;
  std::vector<index_t> sizes(spec.n_small_components, 1);
  if (n_multi > 0) {
    index_t leftover = small_nodes - spec.n_isolated - 2 * n_multi;
    if (leftover < 0) throw DataError("component plan infeasible for " + spec.name);
    for (index_t i = spec.n_isolated; i < spec.n_small_components; ++i) sizes[i] = 2;
    while (leftover-- > 0) ++sizes[spec.n_isolated + uniform_below(rng, n_multi)];
  }

  std::set<std::pair<index_t, index_t>> edges;
  auto add_edge = [&](index_t u, index_t v) {
    if (u == v) return false;
    const auto e = std::minmax(u, v);
    return edges.emplace(e.first, e.second).second;
  };

  index_t node = 0;
  for (index_t s : sizes) {
    const index_t base = node;
    const index_t comp_class = take_class(uniform_below(rng, l), 1.0);
    ds.labels[base] = comp_class;
    for (index_t i = 1; i < s; ++i) {
      ds.labels[base + i] = take_class(comp_class, 0.9);
      add_edge(base + i, base + uniform_below(rng, i));  // random tree
    }
    node += s;
  }

  // --- giant component: hub backbone plus degree-1 spokes ---------------
  const index_t hub0 = node;
  std::vector<std::vector<index_t>> hubs_by_class(l);
  for (index_t i = 0; i < spec.n_hubs; ++i) {
    ds.labels[hub0 + i] = take_class(i % l, 1.0);
    hubs_by_class[ds.labels[hub0 + i]].push_back(hub0 + i);
    if (i > 0) add_edge(hub0 + i, hub0 + uniform_below(rng, i));
  }
  auto pick_hub = [&](index_t cls, real p_same) {
    const auto& pool = hubs_by_class[cls];
    if (!pool.empty() && rng.next_uniform() < p_same)
      return pool[uniform_below(rng, static_cast<index_t>(pool.size()))];
    return hub0 + uniform_below(rng, spec.n_hubs);
  };
  for (index_t u = hub0 + spec.n_hubs; u < n; ++u) {
    ds.labels[u] = take_class(uniform_below(rng, l), 1.0);
    add_edge(u, pick_hub(ds.labels[u], spec.homophily + 0.06));
  }
  // Surplus edges densify the core; a lower same-class bias keeps overall
  // homophily near the target once the pure islands are counted in.
  index_t guard = spec.n_edges * 200;
  while (static_cast<index_t>(edges.size()) < spec.n_edges) {
    if (--guard < 0) throw DataError("edge sampling failed to reach target count");
    const index_t u = hub0 + uniform_below(rng, spec.n_hubs);
    add_edge(u, pick_hub(ds.labels[u], spec.homophily - 0.14));
  }
  ds.adjacency = adjacency_from_pairs(n, edges);

  // Splits are drawn before feature synthesis so content knobs (topic_mix)
  // cannot perturb the structure or the evaluation sets.
  std::vector<index_t> order(n);
  for (index_t i = 0; i < n; ++i) order[i] = i;
  order = sample_without_replacement(std::move(order), n, rng);
  ds.fixed_split.val.assign(order.begin(), order.begin() + 500);
  ds.fixed_split.test.assign(order.begin() + 500, order.begin() + 1500);
  std::sort(ds.fixed_split.val.begin(), ds.fixed_split.val.end());
  std::sort(ds.fixed_split.test.begin(), ds.fixed_split.test.end());
  ds.fixed_split.train =
      make_random_split(ds.labels, l, ds.fixed_split, 20, rng.child(1)).train;

  // Class-correlated bag-of-words: a `topic_mix` share of each document's
  // tokens falls in its class's word block, the rest spread uniformly.
  const index_t block = std::max<index_t>(1, spec.n_features / l);
  std::vector<std::tuple<index_t, index_t, real>> coo;
  for (index_t i = 0; i < n; ++i) {
    std::set<index_t> cols;
    const index_t lo = std::min(ds.labels[i] * block, spec.n_features - 1);
    const index_t hi = std::min(lo + block, spec.n_features);
    while (static_cast<index_t>(cols.size()) < std::min(spec.nnz_per_row, spec.n_features)) {
      const index_t j = rng.next_uniform() < spec.topic_mix
                            ? lo + uniform_below(rng, hi - lo)
                            : uniform_below(rng, spec.n_features);
      cols.insert(j);
    }
    for (index_t j : cols) coo.emplace_back(i, j, 1.0);
  }
  ds.features_sparse = true;
  ds.features_csr =
      ops::row_normalize_sparse(SparseMatrixCSR::from_coo(n, spec.n_features, std::move(coo)));
  return ds;
}

GraphDataset synthesize_bench_graph(index_t n_nodes, index_t n_edges, index_t n_features,
                                    index_t n_classes, RngState rng) {
  GraphDataset ds;
  ds.name = "bench";
  ds.n_classes = n_classes;
  ds.labels.resize(n_nodes);
  for (index_t i = 0; i < n_nodes; ++i) ds.labels[i] = uniform_below(rng, n_classes);

  std::set<std::pair<index_t, index_t>> edges;
  index_t guard = n_edges * 200;
  while (static_cast<index_t>(edges.size()) < n_edges) {
    if (--guard < 0) throw DataError("edge sampling failed to reach target count");
    const index_t u = uniform_below(rng, n_nodes);
    const index_t v = uniform_below(rng, n_nodes);
    if (u == v) continue;
    const auto e = std::minmax(u, v);
    edges.emplace(e.first, e.second);
  }
  ds.adjacency = adjacency_from_pairs(n_nodes, edges);

  ds.features_sparse = false;
  ds.features_dense = DenseMatrix(n_nodes, n_features, standard_normal(rng, n_nodes * n_features));

  std::vector<index_t> order(n_nodes);
  for (index_t i = 0; i < n_nodes; ++i) order[i] = i;
  order = sample_without_replacement(std::move(order), n_nodes, rng);
  const index_t nv = std::min<index_t>(500, n_nodes / 4);
  const index_t nt = std::min<index_t>(1000, n_nodes / 4);
  ds.fixed_split.val.assign(order.begin(), order.begin() + nv);
  ds.fixed_split.test.assign(order.begin() + nv, order.begin() + nv + nt);
  std::sort(ds.fixed_split.val.begin(), ds.fixed_split.val.end());
  std::sort(ds.fixed_split.test.begin(), ds.fixed_split.test.end());

  // Timing graphs can be arbitrarily small; shrink the per-class budget to
  // what the leftover pool supports, or train on the whole pool if a class
  // ended up empty.
  std::unordered_set<index_t> excluded(ds.fixed_split.val.begin(), ds.fixed_split.val.end());
  excluded.insert(ds.fixed_split.test.begin(), ds.fixed_split.test.end());
  std::vector<index_t> avail(n_classes, 0);
  for (index_t i = 0; i < n_nodes; ++i)
    if (!excluded.count(i)) ++avail[ds.labels[i]];
  index_t per_class = 20;
  for (index_t c = 0; c < n_classes; ++c) per_class = std::min(per_class, avail[c]);
  if (per_class >= 1) {
    ds.fixed_split.train =
        make_random_split(ds.labels, n_classes, ds.fixed_split, per_class, rng.child(1)).train;
  } else {
    for (index_t i = 0; i < n_nodes; ++i)
      if (!excluded.count(i)) ds.fixed_split.train.push_back(i);
  }
  return ds;
}

}  // namespace crossgcn::graph
