#include "crossgcn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crossgcn::oracle {

namespace {

index_t checked_size(index_t dim, index_t order) {
  if (dim < 1 || order < 1)
    throw ShapeError("tensor dims must be positive, got D=" + std::to_string(dim) +
                     " k=" + std::to_string(order));
  index_t total = 1;
  for (index_t i = 0; i < order; ++i) {
    if (total > kTensorCap / dim)
      throw ShapeError("tensor size D^k exceeds cap: D=" + std::to_string(dim) +
                       " k=" + std::to_string(order) + " cap=" + std::to_string(kTensorCap));
    total *= dim;
  }
  return total;
}

}  // namespace

real DenseTensor::at(const std::vector<index_t>& idx) const {
  if (static_cast<index_t>(idx.size()) != order)
    throw ShapeError("tensor index order " + std::to_string(idx.size()) + " != " +
                     std::to_string(order));
  index_t flat = 0;
  for (index_t a = 0; a < order; ++a) {
    if (idx[a] < 0 || idx[a] >= dim)
      throw ShapeError("tensor index out of range on axis " + std::to_string(a));
    flat = flat * dim + idx[a];
  }
  return values[flat];
}

DenseTensor rank1_tensor_from_factors(const std::vector<std::vector<real>>& factors) {
  if (factors.empty()) throw ShapeError("rank1_tensor_from_factors: no factors given");
  const index_t k = static_cast<index_t>(factors.size());
  const index_t d = static_cast<index_t>(factors[0].size());
  for (const auto& f : factors)
    if (static_cast<index_t>(f.size()) != d)
      throw ShapeError("rank1_tensor_from_factors: factor lengths differ, " +
                       std::to_string(f.size()) + " vs " + std::to_string(d));
  const index_t total = checked_size(d, k);

  DenseTensor t;
  t.order = k;
  t.dim = d;
  t.values.assign(total, real(1));
  // Lexicographic order: axis a has stride d^(k-1-a); factor a indexes axis a.
  std::vector<index_t> idx(k, 0);
  for (index_t flat = 0; flat < total; ++flat) {
    real v = 1;
    for (index_t a = 0; a < k; ++a) v *= factors[a][idx[a]];
    t.values[flat] = v;
    for (index_t a = k - 1; a >= 0; --a) {
      if (++idx[a] < d) break;
      idx[a] = 0;
    }
  }
  return t;
}

DenseTensor enumerate_cross_tensor(const std::vector<real>& x, index_t k) {
  return rank1_tensor_from_factors(std::vector<std::vector<real>>(k, x));
}

std::vector<real> brute_force_cross_transform(const std::vector<real>& x,
                                              const std::vector<DenseTensor>& w_tensors,
                                              const std::vector<real>& b) {
  if (w_tensors.empty()) throw ShapeError("brute_force_cross_transform: no weight tensors");
  if (b.size() != w_tensors.size())
    throw ShapeError("brute_force_cross_transform: bias length " + std::to_string(b.size()) +
                     " != unit count " + std::to_string(w_tensors.size()));
  const index_t k = w_tensors[0].order;
  const index_t d = static_cast<index_t>(x.size());
  for (const auto& w : w_tensors)
    if (w.order != k || w.dim != d)
      throw ShapeError("brute_force_cross_transform: tensor shape mismatch (order " +
                       std::to_string(w.order) + ", dim " + std::to_string(w.dim) +
                       " vs order " + std::to_string(k) + ", dim " + std::to_string(d) + ")");

  const DenseTensor xk = enumerate_cross_tensor(x, k);
  std::vector<real> h(w_tensors.size(), 0);
  for (std::size_t e = 0; e < w_tensors.size(); ++e) {
    real acc = 0;
    for (index_t i = 0; i < xk.size(); ++i) acc += xk.values[i] * w_tensors[e].values[i];
    h[e] = acc + b[e];
  }
  return h;
}

std::vector<real> finite_difference_gradients(
    const std::function<real(const std::vector<real>&)>& f, const std::vector<real>& theta,
    real step) {
  if (!(step > 0)) throw NumericError("finite differences need a positive step");
  std::vector<real> grad(theta.size(), 0);
  std::vector<real> probe = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + step;
    const real fp = f(probe);
    probe[i] = theta[i] - step;
    const real fm = f(probe);
    probe[i] = theta[i];
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw NumericError("non-finite function value during finite differences at coordinate " +
                         std::to_string(i));
    grad[i] = (fp - fm) / (2 * step);
  }
  return grad;
}

std::vector<real> pack_tensors(const std::vector<const DenseMatrix*>& tensors) {
  std::vector<real> theta;
  for (const DenseMatrix* t : tensors)
    theta.insert(theta.end(), t->values().begin(), t->values().end());
  return theta;
}

void unpack_tensors(const std::vector<real>& theta, const std::vector<DenseMatrix*>& tensors) {
  std::size_t off = 0;
  for (DenseMatrix* t : tensors) {
    const std::size_t n = t->values().size();
    if (off + n > theta.size())
      throw ShapeError("unpack_tensors: vector too short (" + std::to_string(theta.size()) +
                       " values)");
    std::copy(theta.begin() + off, theta.begin() + off + n, t->values().begin());
    off += n;
  }
  if (off != theta.size())
    throw ShapeError("unpack_tensors: " + std::to_string(theta.size() - off) +
                     " values left over");
}

real max_relative_error(const std::vector<real>& a, const std::vector<real>& b, real floor) {
  if (a.size() != b.size())
    throw ShapeError("max_relative_error: length mismatch " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  real worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const real denom = std::max({floor, std::abs(a[i]), std::abs(b[i])});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace crossgcn::oracle
