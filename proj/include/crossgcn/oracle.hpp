#pragma once

#include <functional>
#include <vector>

#include "crossgcn/dense.hpp"
#include "crossgcn/types.hpp"

namespace crossgcn::oracle {

/// Dense k-order tensor with every mode of the same dimension D, values stored
/// in lexicographic index order (last index fastest). Exists purely as a
/// brute-force reference for the factorized operator, hence the hard size cap.
struct DenseTensor {
  index_t order = 0;
  index_t dim = 0;
  std::vector<real> values;

  index_t size() const { return static_cast<index_t>(values.size()); }
  /// Element at multi-index (idx[0], ..., idx[k-1]).
  real at(const std::vector<index_t>& idx) const;
};

/// Guard: D^k must not exceed this many entries.
inline constexpr index_t kTensorCap = 1000000;

/// k-fold outer product of x with itself: entry (i1..ik) = prod_j x[i_j].
DenseTensor enumerate_cross_tensor(const std::vector<real>& x, index_t k);

/// Rank-1 tensor from k factor vectors of equal length D:
/// entry (i1..ik) = prod_j factors[j][i_j] (factors[0] indexes the first axis).
DenseTensor rank1_tensor_from_factors(const std::vector<std::vector<real>>& factors);

/// h_e = sum(X^k ⊙ W_e) + b_e over all tensor entries, activation omitted.
std::vector<real> brute_force_cross_transform(const std::vector<real>& x,
                                              const std::vector<DenseTensor>& w_tensors,
                                              const std::vector<real>& b);

/// Central differences (f(θ+δe_i) − f(θ−δe_i)) / 2δ per coordinate.
std::vector<real> finite_difference_gradients(
    const std::function<real(const std::vector<real>&)>& f, const std::vector<real>& theta,
    real step);

/// Flatten a set of matrices into one coordinate vector (and back), so
/// heterogeneous parameter sets can be probed by finite differences.
std::vector<real> pack_tensors(const std::vector<const DenseMatrix*>& tensors);
void unpack_tensors(const std::vector<real>& theta, const std::vector<DenseMatrix*>& tensors);

/// max_i |a_i − b_i| / max(floor, |a_i|, |b_i|), the comparison metric for
/// analytic-vs-numeric gradient checks.
real max_relative_error(const std::vector<real>& a, const std::vector<real>& b,
                        real floor = 1e-8);

}  // namespace crossgcn::oracle
