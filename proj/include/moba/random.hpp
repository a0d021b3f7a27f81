#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace moba {

/// Seeded pseudo-random stream. Every stochastic routine in the library takes
/// one of these by reference so that a run is reproducible from its seed.
class RandomStream {
public:
    using engine_type = std::mt19937_64;

    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw in [0, 1) at 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n). n must be positive.
    std::size_t index(std::size_t n);

    std::uint64_t next_seed() { return engine_(); }

    engine_type& engine() { return engine_; }

private:
    engine_type engine_;
};

/// Source of u ~ U[0,1) for the genetic operators. Tests substitute scripted
/// sequences; production code binds a RandomStream.
using UniformDraw = std::function<double()>;

inline UniformDraw bind_uniform(RandomStream& rng) {
    return [&rng] { return rng.uniform(); };
}

/// Child seed for sub-stream `index` of `master`. Distinct indices give
/// independent streams; the mapping is fixed across runs and platforms.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t index);

} // namespace moba
