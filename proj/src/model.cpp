#include "crossgcn/model.hpp"

#include <fstream>

#include <json.hpp>

#include "crossgcn/ops.hpp"

namespace crossgcn::model {

using nlohmann::json;

namespace {

void add_row_inplace(DenseMatrix& m, const DenseMatrix& row) {
  if (row.rows() != 1 || row.cols() != m.cols())
    throw ShapeError("bias broadcast: " + shape_str(row) + " onto " + shape_str(m));
  for (index_t i = 0; i < m.rows(); ++i) {
    real* mr = m.row(i);
    const real* br = row.row(0);
    for (index_t j = 0; j < m.cols(); ++j) mr[j] += br[j];
  }
}

DenseMatrix apply_activation(const DenseMatrix& z, Activation act) {
  switch (act) {
    case Activation::Relu:
      return ops::relu(z);
    case Activation::Identity:
      return z;
    case Activation::SoftmaxRows:
      return ops::softmax_rows(z);
  }
  throw std::logic_error("unreachable activation");
}

/// d(loss)/d(z) from d(loss)/d(h); for softmax the full row Jacobian.
DenseMatrix activation_backward(const DenseMatrix& grad_h, const DenseMatrix& z, Activation act) {
  switch (act) {
    case Activation::Relu:
      return ops::relu_backward(grad_h, z);
    case Activation::Identity:
      return grad_h;
    case Activation::SoftmaxRows: {
      const DenseMatrix p = ops::softmax_rows(z);
      DenseMatrix gz(z.rows(), z.cols());
      for (index_t i = 0; i < z.rows(); ++i) {
        const real* gr = grad_h.row(i);
        const real* pr = p.row(i);
        real dot = 0;
        for (index_t j = 0; j < z.cols(); ++j) dot += gr[j] * pr[j];
        real* or_ = gz.row(i);
        for (index_t j = 0; j < z.cols(); ++j) or_[j] = pr[j] * (gr[j] - dot);
      }
      return gz;
    }
  }
  throw std::logic_error("unreachable activation");
}

void check_input(index_t width, const LayerSpec& spec, const char* who) {
  if (width != spec.in_dim)
    throw ShapeError(std::string(who) + ": input width " + std::to_string(width) +
                     " != layer in_dim " + std::to_string(spec.in_dim));
}

// The transform math never looks at the input representation beyond the
// x W^kT products and the weight gradients, so dense and sparse inputs share
// one implementation through these three accessors.
index_t input_rows(const LayerCache& c) { return c.x_is_sparse ? c.x_sp.rows() : c.x.rows(); }

DenseMatrix input_times_wt(const LayerCache& c, const DenseMatrix& w) {
  return c.x_is_sparse ? ops::spmm(c.x_sp, ops::transpose(w)) : ops::matmul_nt(c.x, w);
}

/// dL/dW = g^T x, computed as (x^T g)^T when x is sparse.
DenseMatrix weight_grad(const DenseMatrix& g, const LayerCache& c) {
  return c.x_is_sparse ? ops::transpose(ops::spmm_tn(c.x_sp, g)) : ops::matmul_tn(g, c.x);
}

void check_cross_params(const LayerSpec& spec, const LayerParams& p) {
  if (static_cast<index_t>(p.W.size()) != spec.order)
    throw ShapeError("cross layer: " + std::to_string(p.W.size()) + " weight matrices for order " +
                     std::to_string(spec.order));
  for (const auto& w : p.W)
    if (w.rows() != spec.out_dim || w.cols() != spec.in_dim)
      throw ShapeError("cross layer: W shape " + shape_str(w) + ", want [" +
                       std::to_string(spec.out_dim) + " x " + std::to_string(spec.in_dim) + "]");
  if (p.alpha.rows() != 1 || p.alpha.cols() != spec.order)
    throw ShapeError("cross layer: alpha shape " + shape_str(p.alpha) + ", want [1 x " +
                     std::to_string(spec.order) + "]");
}

std::pair<DenseMatrix, LayerCache> cross_forward_impl(LayerCache cache, const LayerSpec& spec,
                                                      const LayerParams& p, bool bias_outside) {
  check_cross_params(spec, p);
  const index_t K = spec.order;

  cache.p.reserve(K);
  cache.f.reserve(K);
  for (index_t k = 0; k < K; ++k) {
    cache.p.push_back(input_times_wt(cache, p.W[k]));
    cache.f.push_back(k == 0 ? cache.p[0] : ops::hadamard(cache.p[k], cache.f[k - 1]));
  }

  // The literal outside-bias form cannot feed a softmax output (the result
  // would not be a distribution), so it only applies to relu/identity layers.
  const bool outside = bias_outside && spec.act != Activation::SoftmaxRows;
  DenseMatrix z(input_rows(cache), spec.out_dim);
  for (index_t k = 0; k < K; ++k) ops::axpy(p.alpha(0, k), cache.f[k], z);
  if (!outside) add_row_inplace(z, p.b[0]);
  cache.z = z;
  DenseMatrix h = apply_activation(z, spec.act);
  if (outside) add_row_inplace(h, p.b[0]);
  cache.h = h;
  return {std::move(h), std::move(cache)};
}

std::pair<DenseMatrix, LayerCache> vanilla_forward_impl(LayerCache cache, const LayerSpec& spec,
                                                        const LayerParams& p) {
  DenseMatrix z = input_times_wt(cache, p.W[0]);
  add_row_inplace(z, p.b[0]);
  cache.z = z;
  DenseMatrix h = apply_activation(z, spec.act);
  cache.h = h;
  return {std::move(h), std::move(cache)};
}

std::pair<DenseMatrix, LayerCache> gin_forward_impl(LayerCache cache, const LayerSpec& spec,
                                                    const LayerParams& p) {
  DenseMatrix z1 = input_times_wt(cache, p.W[0]);
  add_row_inplace(z1, p.b[0]);
  cache.z1 = z1;
  cache.a1 = ops::relu(z1);
  DenseMatrix z = ops::matmul_nt(cache.a1, p.W[1]);
  add_row_inplace(z, p.b[1]);
  cache.z = z;
  DenseMatrix h = apply_activation(z, spec.act);
  cache.h = h;
  return {std::move(h), std::move(cache)};
}

std::pair<DenseMatrix, LayerCache> dispatch_forward(LayerCache cache, const LayerSpec& spec,
                                                    const LayerParams& p, bool bias_outside) {
  switch (spec.kind) {
    case LayerKind::Cross:
      return cross_forward_impl(std::move(cache), spec, p, bias_outside);
    case LayerKind::Vanilla:
      return vanilla_forward_impl(std::move(cache), spec, p);
    case LayerKind::Gin:
      return gin_forward_impl(std::move(cache), spec, p);
  }
  throw std::logic_error("unreachable layer kind");
}

}  // namespace

std::pair<DenseMatrix, LayerCache> cross_transform_forward(const DenseMatrix& x,
                                                           const LayerSpec& spec,
                                                           const LayerParams& p,
                                                           bool bias_outside) {
  check_input(x.cols(), spec, "cross_transform_forward");
  LayerCache cache;
  cache.x = x;
  return cross_forward_impl(std::move(cache), spec, p, bias_outside);
}

std::pair<DenseMatrix, LayerCache> vanilla_transform_forward(const DenseMatrix& x,
                                                             const LayerSpec& spec,
                                                             const LayerParams& p) {
  check_input(x.cols(), spec, "vanilla_transform_forward");
  LayerCache cache;
  cache.x = x;
  return vanilla_forward_impl(std::move(cache), spec, p);
}

std::pair<DenseMatrix, LayerCache> gin_transform_forward(const DenseMatrix& x,
                                                         const LayerSpec& spec,
                                                         const LayerParams& p) {
  check_input(x.cols(), spec, "gin_transform_forward");
  LayerCache cache;
  cache.x = x;
  return gin_forward_impl(std::move(cache), spec, p);
}

std::pair<DenseMatrix, LayerCache> transform_forward(const DenseMatrix& x, const LayerSpec& spec,
                                                     const LayerParams& p, bool bias_outside) {
  check_input(x.cols(), spec, "transform_forward");
  LayerCache cache;
  cache.x = x;
  return dispatch_forward(std::move(cache), spec, p, bias_outside);
}

std::pair<DenseMatrix, LayerCache> transform_forward(const SparseMatrixCSR& x,
                                                     const LayerSpec& spec, const LayerParams& p,
                                                     bool bias_outside) {
  check_input(x.cols(), spec, "transform_forward");
  LayerCache cache;
  cache.x_sp = x;
  cache.x_is_sparse = true;
  return dispatch_forward(std::move(cache), spec, p, bias_outside);
}

LayerGrads transform_backward(const DenseMatrix& grad_out, const LayerSpec& spec,
                              const LayerParams& p, const LayerCache& cache, bool bias_outside,
                              bool wrt_preact, DenseMatrix& grad_x) {
  if (!grad_out.same_shape(cache.z))
    throw ShapeError("transform_backward: grad shape " + shape_str(grad_out) +
                     " vs cached pre-activation " + shape_str(cache.z));

  LayerGrads g;
  const index_t n = input_rows(cache);

  // Gradient w.r.t. the pre-activation z (plus the bias gradient, whose
  // placement depends on where the bias sits relative to the activation).
  DenseMatrix gz;
  DenseMatrix grad_b;
  const bool outside =
      bias_outside && spec.kind == LayerKind::Cross && spec.act != Activation::SoftmaxRows;
  if (wrt_preact) {
    gz = grad_out;
    grad_b = ops::colsum(gz);  // outside-bias models never use the fused path
  } else if (outside) {
    grad_b = ops::colsum(grad_out);
    gz = activation_backward(grad_out, cache.z, spec.act);
  } else {
    gz = activation_backward(grad_out, cache.z, spec.act);
    grad_b = ops::colsum(gz);
  }

  switch (spec.kind) {
    case LayerKind::Cross: {
      check_cross_params(spec, p);
      const index_t K = spec.order;
      g.alpha = DenseMatrix(1, K);
      for (index_t k = 0; k < K; ++k) g.alpha(0, k) = ops::dot_all(gz, cache.f[k]);

      // U^k = dL/df^k accumulated from z (direct) and f^{k+1} (recursive).
      std::vector<DenseMatrix> gp(K);
      DenseMatrix u = ops::scale(gz, p.alpha(0, K - 1));
      for (index_t k = K - 1; k >= 1; --k) {
        gp[k] = ops::hadamard(u, cache.f[k - 1]);
        DenseMatrix next = ops::scale(gz, p.alpha(0, k - 1));
        ops::hadamard_acc(u, cache.p[k], next);
        u = std::move(next);
      }
      gp[0] = std::move(u);

      g.W.resize(K);
      for (index_t k = 0; k < K; ++k) g.W[k] = weight_grad(gp[k], cache);
      // Sparse inputs only occur at the bottom of the stack, where the
      // features are constants: no input gradient is needed (or produced).
      if (cache.x_is_sparse) {
        grad_x = DenseMatrix();
      } else {
        grad_x = DenseMatrix(n, spec.in_dim);
        for (index_t k = 0; k < K; ++k) {
          const DenseMatrix gxk = ops::matmul(gp[k], p.W[k]);
          ops::axpy(1.0, gxk, grad_x);
        }
      }
      g.b.push_back(std::move(grad_b));
      return g;
    }
    case LayerKind::Vanilla: {
      g.W.push_back(weight_grad(gz, cache));
      g.b.push_back(std::move(grad_b));
      grad_x = cache.x_is_sparse ? DenseMatrix() : ops::matmul(gz, p.W[0]);
      return g;
    }
    case LayerKind::Gin: {
      g.W.resize(2);
      g.b.resize(2);
      g.W[1] = ops::matmul_tn(gz, cache.a1);
      g.b[1] = std::move(grad_b);
      const DenseMatrix ga1 = ops::matmul(gz, p.W[1]);
      const DenseMatrix gz1 = ops::relu_backward(ga1, cache.z1);
      g.W[0] = weight_grad(gz1, cache);
      g.b[0] = ops::colsum(gz1);
      grad_x = cache.x_is_sparse ? DenseMatrix() : ops::matmul(gz1, p.W[0]);
      return g;
    }
  }
  throw std::logic_error("unreachable layer kind");
}

std::pair<DenseMatrix, LayerCache> graph_conv_forward(const DenseMatrix& X,
                                                      const SparseMatrixCSR& a_hat,
                                                      const LayerSpec& spec, const LayerParams& p,
                                                      bool bias_outside) {
  if (a_hat.rows() != a_hat.cols() || a_hat.cols() != X.rows())
    throw ShapeError("graph_conv_forward: adjacency [" + std::to_string(a_hat.rows()) + " x " +
                     std::to_string(a_hat.cols()) + "] vs features " + shape_str(X));
  return transform_forward(ops::spmm(a_hat, X), spec, p, bias_outside);
}

std::pair<DenseMatrix, DenseMatrix> dropout_apply(const DenseMatrix& x, real rate, RngState& rng,
                                                  bool training) {
  if (rate < 0 || rate >= 1)
    throw DataError("dropout rate must be in [0, 1), got " + std::to_string(rate));
  if (!training || rate == 0) return {x, DenseMatrix::ones(x.rows(), x.cols())};

  const real keep_scale = 1.0 / (1.0 - rate);
  DenseMatrix mask(x.rows(), x.cols());
  real* mp = mask.data();
  for (index_t i = 0; i < mask.size(); ++i) mp[i] = rng.next_uniform() < rate ? 0.0 : keep_scale;
  return {ops::hadamard(x, mask), std::move(mask)};
}

std::pair<DenseMatrix, std::vector<LayerCache>> model_forward(const ModelConfig& cfg,
                                                              const Params& params,
                                                              const SparseMatrixCSR& a_hat,
                                                              const DenseMatrix& X, RngState& rng,
                                                              bool training) {
  if (cfg.layers.size() != params.layers.size())
    throw ShapeError("model_forward: config has " + std::to_string(cfg.layers.size()) +
                     " layers, params " + std::to_string(params.layers.size()));
  std::vector<LayerCache> caches;
  caches.reserve(cfg.layers.size());
  DenseMatrix h = X;
  for (std::size_t i = 0; i < cfg.layers.size(); ++i) {
    RngState layer_rng = rng.child(i);
    auto [dropped, mask] = dropout_apply(h, cfg.dropout, layer_rng, training);
    auto [out, cache] =
        transform_forward(ops::spmm(a_hat, dropped), cfg.layers[i], params.layers[i],
                          cfg.bias_outside);
    cache.mask = std::move(mask);
    caches.push_back(std::move(cache));
    h = std::move(out);
  }
  return {std::move(h), std::move(caches)};
}

std::pair<DenseMatrix, std::vector<LayerCache>> model_forward(const ModelConfig& cfg,
                                                              const Params& params,
                                                              const SparseMatrixCSR& a_hat,
                                                              const SparseMatrixCSR& x0_agg,
                                                              RngState& rng, bool training) {
  if (cfg.layers.empty())
    throw ShapeError("model_forward: model has no layers");
  if (cfg.layers.size() != params.layers.size())
    throw ShapeError("model_forward: config has " + std::to_string(cfg.layers.size()) +
                     " layers, params " + std::to_string(params.layers.size()));
  std::vector<LayerCache> caches;
  caches.reserve(cfg.layers.size());
  // First layer: dropout and aggregation already applied by the caller. Its
  // cache carries no dropout mask; the backward pass never propagates below
  // the first transform, so the mask is never read there.
  auto [h, cache0] = transform_forward(x0_agg, cfg.layers[0], params.layers[0], cfg.bias_outside);
  caches.push_back(std::move(cache0));
  for (std::size_t i = 1; i < cfg.layers.size(); ++i) {
    RngState layer_rng = rng.child(i);
    auto [dropped, mask] = dropout_apply(h, cfg.dropout, layer_rng, training);
    auto [out, cache] =
        transform_forward(ops::spmm(a_hat, dropped), cfg.layers[i], params.layers[i],
                          cfg.bias_outside);
    cache.mask = std::move(mask);
    caches.push_back(std::move(cache));
    h = std::move(out);
  }
  return {std::move(h), std::move(caches)};
}

Grads model_backward(const ModelConfig& cfg, const Params& params, const SparseMatrixCSR& a_hat,
                     const std::vector<LayerCache>& caches, const DenseMatrix& grad_z_final) {
  if (caches.size() != cfg.layers.size())
    throw ShapeError("model_backward: cache count " + std::to_string(caches.size()) +
                     " != layer count " + std::to_string(cfg.layers.size()));
  Grads grads;
  grads.layers.resize(cfg.layers.size());

  DenseMatrix grad = grad_z_final;
  bool wrt_preact = true;
  for (index_t i = static_cast<index_t>(cfg.layers.size()) - 1; i >= 0; --i) {
    DenseMatrix grad_x;
    grads.layers[i] = transform_backward(grad, cfg.layers[i], params.layers[i], caches[i],
                                         cfg.bias_outside, wrt_preact, grad_x);
    if (i > 0) {
      // Through aggregation (A_hat symmetric) and the input dropout mask.
      grad = ops::hadamard(ops::spmm(a_hat, grad_x), caches[i].mask);
      wrt_preact = false;
    }
  }
  return grads;
}

index_t param_count(const ModelConfig& cfg) {
  index_t total = 0;
  for (const auto& l : cfg.layers) {
    switch (l.kind) {
      case LayerKind::Cross:
        total += l.order * l.out_dim * l.in_dim + l.out_dim + (l.learn_alpha ? l.order : 0);
        break;
      case LayerKind::Vanilla:
        total += l.out_dim * l.in_dim + l.out_dim;
        break;
      case LayerKind::Gin: {
        const index_t h = l.gin_hidden_dim();
        total += h * l.in_dim + h + l.out_dim * h + l.out_dim;
        break;
      }
    }
  }
  return total;
}

Params init_params(const ModelConfig& cfg, const RngState& rng) {
  Params params;
  params.layers.resize(cfg.layers.size());
  for (std::size_t i = 0; i < cfg.layers.size(); ++i) {
    const LayerSpec& l = cfg.layers[i];
    LayerParams& p = params.layers[i];
    RngState lrng = rng.child(i);
    switch (l.kind) {
      case LayerKind::Cross:
        for (index_t k = 0; k < l.order; ++k)
          p.W.push_back(glorot_init(l.out_dim, l.in_dim, lrng));
        p.b.push_back(DenseMatrix(1, l.out_dim));
        p.alpha = DenseMatrix::ones(1, l.order);
        if (!l.alpha_init.empty()) {
          if (static_cast<index_t>(l.alpha_init.size()) != l.order)
            throw ShapeError("alpha_init has " + std::to_string(l.alpha_init.size()) +
                             " values for order " + std::to_string(l.order));
          for (index_t k = 0; k < l.order; ++k) p.alpha(0, k) = l.alpha_init[k];
        }
        break;
      case LayerKind::Vanilla:
        p.W.push_back(glorot_init(l.out_dim, l.in_dim, lrng));
        p.b.push_back(DenseMatrix(1, l.out_dim));
        break;
      case LayerKind::Gin: {
        const index_t h = l.gin_hidden_dim();
        p.W.push_back(glorot_init(h, l.in_dim, lrng));
        p.W.push_back(glorot_init(l.out_dim, h, lrng));
        p.b.push_back(DenseMatrix(1, h));
        p.b.push_back(DenseMatrix(1, l.out_dim));
        break;
      }
    }
  }
  return params;
}

Grads zero_grads(const ModelConfig& cfg) {
  Grads g;
  g.layers.resize(cfg.layers.size());
  for (std::size_t i = 0; i < cfg.layers.size(); ++i) {
    const LayerSpec& l = cfg.layers[i];
    LayerParams& p = g.layers[i];
    switch (l.kind) {
      case LayerKind::Cross:
        for (index_t k = 0; k < l.order; ++k) p.W.push_back(DenseMatrix(l.out_dim, l.in_dim));
        p.b.push_back(DenseMatrix(1, l.out_dim));
        p.alpha = DenseMatrix(1, l.order);
        break;
      case LayerKind::Vanilla:
        p.W.push_back(DenseMatrix(l.out_dim, l.in_dim));
        p.b.push_back(DenseMatrix(1, l.out_dim));
        break;
      case LayerKind::Gin: {
        const index_t h = l.gin_hidden_dim();
        p.W.push_back(DenseMatrix(h, l.in_dim));
        p.W.push_back(DenseMatrix(l.out_dim, h));
        p.b.push_back(DenseMatrix(1, h));
        p.b.push_back(DenseMatrix(1, l.out_dim));
        break;
      }
    }
  }
  return g;
}

namespace {

template <class ParamsT, class Fn>
void for_each_tensor_impl(const ModelConfig& cfg, ParamsT& params, bool trainable_only, Fn&& fn) {
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const LayerSpec& l = cfg.layers[i];
    auto& p = params.layers[i];
    const std::string prefix = "layer" + std::to_string(i) + ".";
    for (std::size_t k = 0; k < p.W.size(); ++k)
      fn(prefix + "W" + std::to_string(k + 1), p.W[k]);
    if (l.kind == LayerKind::Gin) {
      fn(prefix + "b1", p.b[0]);
      fn(prefix + "b2", p.b[1]);
    } else {
      fn(prefix + "b", p.b[0]);
    }
    if (l.kind == LayerKind::Cross && (!trainable_only || l.learn_alpha))
      fn(prefix + "alpha", p.alpha);
  }
}

}  // namespace

void for_each_tensor(const ModelConfig& cfg, Params& params, bool trainable_only,
                     const std::function<void(const std::string&, DenseMatrix&)>& fn) {
  for_each_tensor_impl(cfg, params, trainable_only, fn);
}

void for_each_tensor(const ModelConfig& cfg, const Params& params, bool trainable_only,
                     const std::function<void(const std::string&, const DenseMatrix&)>& fn) {
  for_each_tensor_impl(cfg, params, trainable_only, fn);
}

const char* layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::Cross:
      return "cross";
    case LayerKind::Vanilla:
      return "vanilla";
    case LayerKind::Gin:
      return "gin";
  }
  return "?";
}

LayerKind layer_kind_from_name(const std::string& s) {
  if (s == "cross") return LayerKind::Cross;
  if (s == "vanilla") return LayerKind::Vanilla;
  if (s == "gin") return LayerKind::Gin;
  throw DataError("unknown layer kind: " + s);
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Relu:
      return "relu";
    case Activation::Identity:
      return "identity";
    case Activation::SoftmaxRows:
      return "softmax";
  }
  return "?";
}

Activation activation_from_name(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "identity") return Activation::Identity;
  if (s == "softmax") return Activation::SoftmaxRows;
  throw DataError("unknown activation: " + s);
}

namespace {

json config_to_json(const ModelConfig& cfg) {
  json layers = json::array();
  for (const auto& l : cfg.layers) {
    layers.push_back({{"kind", layer_kind_name(l.kind)},
                      {"in_dim", l.in_dim},
                      {"out_dim", l.out_dim},
                      {"order", l.order},
                      {"learn_alpha", l.learn_alpha},
                      {"gin_hidden", l.gin_hidden},
                      {"alpha_init", l.alpha_init},
                      {"act", activation_name(l.act)}});
  }
  return {{"layers", layers},
          {"dropout", cfg.dropout},
          {"weight_decay", cfg.weight_decay},
          {"bias_outside", cfg.bias_outside}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig cfg;
  for (const auto& jl : j.at("layers")) {
    LayerSpec l;
    l.kind = layer_kind_from_name(jl.at("kind").get<std::string>());
    l.in_dim = jl.at("in_dim").get<index_t>();
    l.out_dim = jl.at("out_dim").get<index_t>();
    l.order = jl.at("order").get<index_t>();
    l.learn_alpha = jl.at("learn_alpha").get<bool>();
    l.gin_hidden = jl.at("gin_hidden").get<index_t>();
    l.alpha_init = jl.value("alpha_init", std::vector<real>{});
    l.act = activation_from_name(jl.at("act").get<std::string>());
    cfg.layers.push_back(l);
  }
  cfg.dropout = j.at("dropout").get<real>();
  cfg.weight_decay = j.at("weight_decay").get<real>();
  cfg.bias_outside = j.at("bias_outside").get<bool>();
  return cfg;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelConfig& cfg, const Params& params) {
  json tensors = json::object();
  for_each_tensor(cfg, params, false, [&](const std::string& name, const DenseMatrix& m) {
    if (!m.all_finite()) throw NumericError("checkpoint tensor " + name + " has non-finite values");
    tensors[name] = {{"shape", {m.rows(), m.cols()}}, {"data", m.values()}};
  });
  const json j = {{"v", 1}, {"config", config_to_json(cfg)}, {"tensors", tensors}};
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out << j.dump(2) << "\n";
}

std::pair<ModelConfig, Params> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read checkpoint: " + path);
  json j;
  in >> j;
  ModelConfig cfg = config_from_json(j.at("config"));
  Params params = zero_grads(cfg);  // correct layout, then overwrite values
  for_each_tensor(cfg, params, false, [&](const std::string& name, DenseMatrix& m) {
    const json& t = j.at("tensors").at(name);
    const index_t r = t.at("shape").at(0).get<index_t>();
    const index_t c = t.at("shape").at(1).get<index_t>();
    if (r != m.rows() || c != m.cols())
      throw DataError("checkpoint tensor " + name + " shape [" + std::to_string(r) + " x " +
                      std::to_string(c) + "] does not match config " + shape_str(m));
    m = DenseMatrix(r, c, t.at("data").get<std::vector<real>>());
  });
  return {std::move(cfg), std::move(params)};
}

}  // namespace crossgcn::model
