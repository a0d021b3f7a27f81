#include "moba/random.hpp"

#include <array>
#include <stdexcept>

namespace moba {

std::size_t RandomStream::index(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("RandomStream::index: empty range");
    }
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(master),
        static_cast<std::uint32_t>(master >> 32),
        static_cast<std::uint32_t>(index),
        static_cast<std::uint32_t>(index >> 32),
    };
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

} // namespace moba
