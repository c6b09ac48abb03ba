#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crossgcn/csr.hpp"
#include "crossgcn/dense.hpp"
#include "crossgcn/rng.hpp"

namespace crossgcn::graph {

struct SplitSpec {
  std::vector<index_t> train;
  std::vector<index_t> val;
  std::vector<index_t> test;
};

/// A loaded node-classification dataset. Adjacency is binary, symmetric, with
/// zero diagonal as stored; self-loops enter only via normalize_adjacency.
struct GraphDataset {
  std::string name;
  SparseMatrixCSR adjacency;
  bool features_sparse = true;
  SparseMatrixCSR features_csr;
  DenseMatrix features_dense;
  std::vector<index_t> labels;
  index_t n_classes = 0;
  SplitSpec fixed_split;  // val/test always populated; train only for fixed public splits

  index_t n_nodes() const { return static_cast<index_t>(labels.size()); }
  index_t n_features() const {
    return features_sparse ? features_csr.cols() : features_dense.cols();
  }
  /// Undirected edge count (each edge stored in both directions).
  index_t n_edges() const { return adjacency.nnz() / 2; }
  DenseMatrix features_as_dense() const;
};

/// Reads the on-disk layout (edges.tsv, features.mtx or features.dense.csv,
/// labels.csv, splits.json, meta.json). Malformed files raise DataError with
/// the offending line number; recoverable oddities (duplicate edges,
/// self-loops) are dropped and reported through `warnings`.
GraphDataset load_dataset(const std::string& dir, std::vector<std::string>* warnings = nullptr);
void save_dataset(const std::string& dir, const GraphDataset& ds);

/// Â = D̃^{-1/2} (A + I) D̃^{-1/2} with D̃ the degree matrix of A + I.
/// Requires a square, symmetric, binary, zero-diagonal adjacency.
SparseMatrixCSR normalize_adjacency(const SparseMatrixCSR& a);

/// N x 12 standard-Gaussian features whose pairwise product signs encode the
/// class: pair i (of 6) has positive product iff i equals the node's class.
/// Sign repair flips the second element of an offending pair; exact zeros are
/// resampled. Requires exactly 6 classes.
DenseMatrix synthesize_cross_features(const std::vector<index_t>& labels, index_t n_classes,
                                      RngState rng);

/// Stratified train split: per_class nodes per class sampled uniformly from
/// outside the fixed val/test sets, which are reused verbatim.
SplitSpec make_random_split(const std::vector<index_t>& labels, index_t n_classes,
                            const SplitSpec& fixed, index_t per_class, RngState rng);

DenseMatrix one_hot_labels(const std::vector<index_t>& labels, index_t n_classes);

// MatrixMarket coordinate real general, 1-based indices. Values are written
// with 17 significant digits so read(write(m)) == m bit-for-bit.
SparseMatrixCSR read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const SparseMatrixCSR& m);

/// One-time converter from raw citation files: `.content` rows are
/// `id<TAB>feat...<TAB>label`, `.cites` rows are `id<TAB>id`. Class ids are
/// assigned to label strings in sorted order; the fixed val/test split is
/// drawn deterministically (seed 0) since the raw files carry none.
GraphDataset convert_citation_raw(const std::string& content_path, const std::string& cites_path,
                                  const std::string& name,
                                  std::vector<std::string>* warnings = nullptr, index_t n_val = 500,
                                  index_t n_test = 1000, index_t per_class_train = 20);

/// Shape parameters for the synthetic stand-in datasets (real citation data
/// must be converted from source files; these match only the published
/// statistics, not the content).
struct SurrogateSpec {
  std::string name;
  index_t n_nodes;
  index_t n_edges;
  index_t n_classes;
  index_t n_features;
  real homophily;        // same-class attachment probability
  index_t nnz_per_row;   // sparse feature fill
  real topic_mix;        // P(token drawn from the class's own word block)
  index_t lcc_size;      // nodes in the giant component
  index_t n_small_components;  // component count outside the giant
  index_t n_isolated;          // singletons among the small components
  index_t n_hubs;              // hub nodes inside the giant
};
std::optional<SurrogateSpec> surrogate_spec_for(const std::string& name);

/// Citation-shaped graph with class-correlated sparse bag-of-words features,
/// fixed val/test sampled once. Deterministic per seed. The topology mirrors
/// real citation networks: a hub-and-spoke giant component (most papers cite
/// a few highly-cited ones, so typical degrees are 1-2 with heavy-tailed
/// hubs) plus many tiny islands — isolated nodes, pairs, small trees.
GraphDataset synthesize_surrogate_citation(const SurrogateSpec& spec, RngState rng);

/// Erdős–Rényi-style graph with dense Gaussian features, for timing runs.
GraphDataset synthesize_bench_graph(index_t n_nodes, index_t n_edges, index_t n_features,
                                    index_t n_classes, RngState rng);

}  // namespace crossgcn::graph
