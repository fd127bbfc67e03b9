#pragma once

#include "eulsolve/laplacian.hpp"
#include "eulsolve/rng.hpp"

namespace eulsolve {

// Finds F with |F| >= n / (16 (1 + alpha)) such that L_FF is alpha-RCDD.
// Samples vertices with probability 1 / (4 (1 + alpha)), then discards any
// sampled vertex whose in-F row or column off-diagonal sum exceeds
// d_i / (1 + alpha) (single pass, index order, no cascading). Whole rounds
// repeat until both postconditions hold; both are verified before return.
std::vector<int> find_rcdd(const DirectedLaplacian& l, double alpha, RngStream rng,
                           int max_rounds = 64);

}  // namespace eulsolve
