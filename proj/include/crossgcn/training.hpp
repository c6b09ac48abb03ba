#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossgcn/graph.hpp"
#include "crossgcn/model.hpp"

namespace crossgcn::training {

struct AdamParams {
  real lr = 0.01;
  real beta1 = 0.9;
  real beta2 = 0.999;
  real eps = 1e-8;
};

/// Moment estimates mirror the trainable parameter layout exactly.
struct AdamState {
  AdamParams hp;
  model::Params m;
  model::Params v;
  index_t t = 0;
};

AdamState make_adam_state(const model::ModelConfig& cfg, const AdamParams& hp);

/// One bias-corrected Adam update in place. Throws NumericError on any
/// non-finite gradient (aborting the run beats corrupting it).
void adam_step(const model::ModelConfig& cfg, model::Params& params, const model::Grads& grads,
               AdamState& state);

/// Γ = Σ_{i∈mask} −log p_i[y_i] + λ Σ ‖Θ‖²_F over all trainable tensors.
real masked_loss(const DenseMatrix& probs, const std::vector<index_t>& labels,
                 const std::vector<index_t>& mask, const model::ModelConfig& cfg,
                 const model::Params& params, real lambda);

/// Fraction of ids whose argmax prediction matches the label; argmax ties
/// break toward the lowest class index.
real evaluate_accuracy(const DenseMatrix& probs, const std::vector<index_t>& labels,
                       const std::vector<index_t>& ids);

struct EpochRecord {
  index_t epoch;
  real loss;
  real train_acc;
  real val_acc;
};

struct RunResult {
  std::uint64_t seed = 0;
  index_t best_val_epoch = 0;
  real test_acc = 0;  // measured at best_val_epoch only
  std::vector<EpochRecord> curve;
};

struct TrainOptions {
  index_t epochs = 200;
  AdamParams adam;
  bool use_fixed_split = false;  // reuse the dataset's fixed train split every run
};

/// One entry of the first-layer aggregation plan: the product A_hat (mask ⊙ X)
/// lives on the fixed support of A_hat X, and each stored output value is a
/// sum of a · x over these (position, position) pairs. Replaying the plan per
/// epoch touches only the feature nonzeros, never the n x d dense grid.
struct AggTerm {
  index_t out_pos;  // index into the output values()
  index_t x_pos;    // index into X_csr.values()
  real a;           // A_hat coefficient
};

/// Dataset pieces shared across runs (features densified, adjacency
/// normalized, labels one-hot). Read-only once built.
struct PreparedData {
  DenseMatrix X;
  SparseMatrixCSR a_hat;
  std::vector<index_t> labels;
  DenseMatrix Y;
  index_t n_classes = 0;
  // Sparse first-layer fast path, populated when the dataset stores its
  // features sparse. Dropping a zero feature entry is a no-op, so masking the
  // stored nonzeros reproduces input dropout exactly.
  bool sparse_input = false;
  SparseMatrixCSR X_csr;
  SparseMatrixCSR x0_eval;  // A_hat X: fixed pattern, unmasked values
  std::vector<AggTerm> agg_terms;
};

PreparedData prepare_data(const graph::GraphDataset& ds);

/// Full-batch training for opts.epochs epochs; per-epoch metrics recorded,
/// test accuracy reported at the best-validation epoch (earliest on ties).
/// The optimized objective is mean cross-entropy over the training mask plus
/// λ‖Θ‖²; the curve's loss column records that value.
/// Bit-deterministic given (data, split, cfg, opts, seed).
RunResult train_run(const PreparedData& data, const graph::SplitSpec& split,
                    const model::ModelConfig& cfg, const TrainOptions& opts, std::uint64_t seed);
RunResult train_run(const graph::GraphDataset& ds, const graph::SplitSpec& split,
                    const model::ModelConfig& cfg, const TrainOptions& opts, std::uint64_t seed);

struct ExperimentSummary {
  index_t n_splits = 0;
  real mean_test_acc = 0;
  real std_test_acc = 0;    // sample std, n−1 denominator
  bool std_defined = false; // false when n_splits == 1
  std::vector<RunResult> runs;
};

/// n_splits stratified random splits (fixed val/test), one run per split with
/// seed = hash(base_seed, split index). `jobs` > 1 runs splits concurrently;
/// results are identical to the serial order.
ExperimentSummary run_experiment(const graph::GraphDataset& ds, const model::ModelConfig& cfg,
                                 const TrainOptions& opts, index_t n_splits,
                                 std::uint64_t base_seed, index_t jobs = 1);

/// Per-epoch curve averaged across an experiment's runs.
std::vector<EpochRecord> mean_curve(const ExperimentSummary& summary);

nlohmann::json summary_to_json(const ExperimentSummary& summary, const std::string& dataset,
                               const std::string& variant, const nlohmann::json& config);

}  // namespace crossgcn::training
