#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "crossgcn/csr.hpp"
#include "crossgcn/dense.hpp"
#include "crossgcn/rng.hpp"

namespace crossgcn::model {

enum class LayerKind { Cross, Vanilla, Gin };
enum class Activation { Relu, Identity, SoftmaxRows };

struct LayerSpec {
  LayerKind kind = LayerKind::Cross;
  index_t in_dim = 0;
  index_t out_dim = 0;
  index_t order = 2;        // K; cross layers only
  bool learn_alpha = true;  // cross layers only
  index_t gin_hidden = 0;   // gin layers only; 0 means out_dim
  std::vector<real> alpha_init;  // cross layers; empty means all ones
  Activation act = Activation::Relu;

  index_t gin_hidden_dim() const { return gin_hidden > 0 ? gin_hidden : out_dim; }
};

struct ModelConfig {
  std::vector<LayerSpec> layers;
  real dropout = 0.5;
  real weight_decay = 5e-4;
  // Keeps the bias outside the activation in cross layers: h = act(sum_k a_k f^k) + b
  // instead of the default h = act(sum_k a_k f^k + b).
  bool bias_outside = false;
};

/// Parameters of one layer. Cross: W[0..K-1] (E x D), b[0] (1 x E), alpha (1 x K).
/// Vanilla: W[0] (E x D), b[0] (1 x E). Gin: W[0] (H x D), W[1] (E x H),
/// b[0] (1 x H), b[1] (1 x E).
struct LayerParams {
  std::vector<DenseMatrix> W;
  std::vector<DenseMatrix> b;
  DenseMatrix alpha;
};

struct Params {
  std::vector<LayerParams> layers;
};

/// Intermediates one layer forward stores for its exact analytic backward.
struct LayerCache {
  DenseMatrix x;               // transform input (after aggregation)
  SparseMatrixCSR x_sp;        // same, CSR form (sparse first-layer path)
  bool x_is_sparse = false;    // which of x / x_sp holds the input
  std::vector<DenseMatrix> p;  // cross: p^k = x W^kT
  std::vector<DenseMatrix> f;  // cross: running prefix products f^k
  DenseMatrix z;               // pre-activation
  DenseMatrix h;               // layer output
  DenseMatrix z1, a1;          // gin first level
  DenseMatrix mask;            // dropout mask on the layer input (scaled)
};

/// Gradients mirror the parameter layout exactly.
using LayerGrads = LayerParams;
using Grads = Params;

// ---- transforms (input already aggregated) --------------------------------

std::pair<DenseMatrix, LayerCache> cross_transform_forward(const DenseMatrix& x,
                                                           const LayerSpec& spec,
                                                           const LayerParams& p,
                                                           bool bias_outside = false);
std::pair<DenseMatrix, LayerCache> vanilla_transform_forward(const DenseMatrix& x,
                                                             const LayerSpec& spec,
                                                             const LayerParams& p);
std::pair<DenseMatrix, LayerCache> gin_transform_forward(const DenseMatrix& x,
                                                         const LayerSpec& spec,
                                                         const LayerParams& p);
/// Dispatch on spec.kind.
std::pair<DenseMatrix, LayerCache> transform_forward(const DenseMatrix& x, const LayerSpec& spec,
                                                     const LayerParams& p,
                                                     bool bias_outside = false);

/// Same transforms on a CSR input (the sparse first-layer path). The input
/// stays sparse through the x W^kT products; the backward of such a layer
/// produces weight gradients but no input gradient (features are constants).
std::pair<DenseMatrix, LayerCache> transform_forward(const SparseMatrixCSR& x,
                                                     const LayerSpec& spec, const LayerParams& p,
                                                     bool bias_outside = false);

/// Backward through one transform. `grad_out` is d(loss)/d(h), or d(loss)/d(z)
/// when `wrt_preact` (the fused softmax+cross-entropy path). Fills `grad_x`
/// with d(loss)/d(x).
LayerGrads transform_backward(const DenseMatrix& grad_out, const LayerSpec& spec,
                              const LayerParams& p, const LayerCache& cache, bool bias_outside,
                              bool wrt_preact, DenseMatrix& grad_x);

/// Aggregation-then-transform: H = transform(A_hat * X).
std::pair<DenseMatrix, LayerCache> graph_conv_forward(const DenseMatrix& X,
                                                      const SparseMatrixCSR& a_hat,
                                                      const LayerSpec& spec, const LayerParams& p,
                                                      bool bias_outside = false);

/// Inverted dropout. Returns (y, mask) with mask entries in {0, 1/(1-rate)}
/// and y = x ⊙ mask; inference or rate 0 gives y = x and an all-ones mask
/// without consuming randomness.
std::pair<DenseMatrix, DenseMatrix> dropout_apply(const DenseMatrix& x, real rate, RngState& rng,
                                                  bool training);

/// Full stack: per layer, dropout on the input, aggregate, transform.
/// Output rows are class probabilities (final activation must be softmax).
std::pair<DenseMatrix, std::vector<LayerCache>> model_forward(const ModelConfig& cfg,
                                                              const Params& params,
                                                              const SparseMatrixCSR& a_hat,
                                                              const DenseMatrix& X, RngState& rng,
                                                              bool training);

/// Variant taking the first layer's input pre-aggregated and sparse: the
/// caller has already applied input dropout and the A_hat product to the
/// feature matrix (cheap when features are sparse, since the result lives on
/// the fixed support of A_hat X). Dropout streams stay per-layer: the caller
/// masks features with rng.child(0); layers past the first draw child(i) here
/// exactly as in the dense overload.
std::pair<DenseMatrix, std::vector<LayerCache>> model_forward(const ModelConfig& cfg,
                                                              const Params& params,
                                                              const SparseMatrixCSR& a_hat,
                                                              const SparseMatrixCSR& x0_agg,
                                                              RngState& rng, bool training);

/// Backward through the full stack. `grad_z_final` is the gradient w.r.t. the
/// final layer's pre-activation (softmax+CE fuse to P - Y on masked rows).
Grads model_backward(const ModelConfig& cfg, const Params& params, const SparseMatrixCSR& a_hat,
                     const std::vector<LayerCache>& caches, const DenseMatrix& grad_z_final);

index_t param_count(const ModelConfig& cfg);

/// Glorot-uniform W, zero b, alpha all ones. Deterministic per rng seed.
Params init_params(const ModelConfig& cfg, const RngState& rng);

/// Zero-filled gradient container matching cfg's layout.
Grads zero_grads(const ModelConfig& cfg);

/// Visits every parameter tensor as ("layer0.W1", matrix). With
/// trainable_only, fixed alpha vectors are skipped.
void for_each_tensor(const ModelConfig& cfg, Params& params, bool trainable_only,
                     const std::function<void(const std::string&, DenseMatrix&)>& fn);
void for_each_tensor(const ModelConfig& cfg, const Params& params, bool trainable_only,
                     const std::function<void(const std::string&, const DenseMatrix&)>& fn);

/// JSON checkpoint (config + named tensors); round-trips bit-exactly.
void save_checkpoint(const std::string& path, const ModelConfig& cfg, const Params& params);
std::pair<ModelConfig, Params> load_checkpoint(const std::string& path);

const char* layer_kind_name(LayerKind k);
LayerKind layer_kind_from_name(const std::string& s);
const char* activation_name(Activation a);
Activation activation_from_name(const std::string& s);

}  // namespace crossgcn::model
