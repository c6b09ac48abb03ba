#pragma once

#include "crossgcn/dense.hpp"
#include "crossgcn/types.hpp"

#include <cstdint>
#include <vector>

namespace crossgcn {

/// Splittable deterministic generator (splitmix64 core). A state is a
/// (seed, counter) pair; child(stream_id) derives an independent stream from
/// the seed alone, so stream layout does not depend on draw order. Identical
/// seed and call sequence give an identical value stream, which is what makes
/// multi-split experiments reproducible under parallel execution.
class RngState {
public:
    explicit RngState(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    /// Independent stream keyed by (seed, stream_id).
    RngState child(std::uint64_t stream_id) const;

    std::uint64_t next_u64();
    /// Uniform in [0, 1).
    real next_uniform();
    /// Uniform in [lo, hi).
    real next_uniform(real lo, real hi);
    /// Standard normal via Box-Muller (second draw cached).
    real next_normal();

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    real spare_ = 0.0;
    bool has_spare_ = false;
};

/// Stable 64-bit combiner for deriving run seeds from (base_seed, index, ...).
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

/// Glorot/Xavier uniform init: entries in [-s, s], s = sqrt(6 / (rows + cols)).
DenseMatrix glorot_init(index_t rows, index_t cols, RngState& rng);

/// n i.i.d. draws from N(0, 1).
std::vector<real> standard_normal(RngState& rng, index_t n);

}  // namespace crossgcn
