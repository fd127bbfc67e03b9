#pragma once

#include <cstdint>

namespace eulsolve {

// Stream handle: identical (seed, stream) produce identical draw sequences
// regardless of scheduling. Call sites derive sub-streams per row so that
// per-row sampling could run in parallel without changing output.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    RngStream derive(std::uint64_t salt) const;
};

// splitmix64-based counter generator.
class Rng {
public:
    explicit Rng(RngStream s);

    std::uint64_t next_u64();
    // Uniform in [0, 1).
    double next_double();
    // Uniform integer in [0, bound).
    std::uint64_t next_below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

}  // namespace eulsolve
