#include "crossgcn/rng.hpp"

#include <cmath>

namespace crossgcn {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngState::RngState(std::uint64_t seed) : seed_(seed), state_(seed) {}

RngState RngState::child(std::uint64_t stream_id) const {
    return RngState(hash_combine(seed_, stream_id));
}

std::uint64_t RngState::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

real RngState::next_uniform() {
    return static_cast<real>(next_u64() >> 11) * 0x1.0p-53;
}

real RngState::next_uniform(real lo, real hi) {
    return lo + (hi - lo) * next_uniform();
}

real RngState::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0,1] so log stays finite.
    const real u1 = static_cast<real>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const real u2 = next_uniform();
    const real r = std::sqrt(-2.0 * std::log(u1));
    const real theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ (mix64(b) + kGolden + (a << 6) + (a >> 2)));
}

DenseMatrix glorot_init(index_t rows, index_t cols, RngState& rng) {
    if (rows < 1 || cols < 1) throw ShapeError("glorot_init needs positive dims");
    const real s = std::sqrt(6.0 / static_cast<real>(rows + cols));
    DenseMatrix m(rows, cols);
    for (index_t i = 0; i < m.size(); ++i) m.data()[i] = rng.next_uniform(-s, s);
    return m;
}

std::vector<real> standard_normal(RngState& rng, index_t n) {
    if (n < 1) throw ShapeError("standard_normal needs n >= 1");
    std::vector<real> v(static_cast<size_t>(n));
    for (auto& x : v) x = rng.next_normal();
    return v;
}

}  // namespace crossgcn
