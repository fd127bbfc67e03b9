#pragma once

#include "eulsolve/laplacian.hpp"
#include "eulsolve/rng.hpp"

namespace eulsolve {

// Eulerian instance families. Every generator returns a strongly connected
// Eulerian Laplacian (sums of directed cycles are Eulerian by construction).
DirectedLaplacian gen_cycle(int n, double weight = 1.0);

// De Bruijn graph on 2^k vertices, edges u -> (2u + b) mod 2^k; the two
// self-loops cancel in the Laplacian and are dropped.
DirectedLaplacian gen_debruijn(int k);

// Superposed random directed cycles of length in [3, 20] with log-uniform
// weights, on top of a global base cycle for strong connectivity; edges are
// added until the merged count reaches m.
DirectedLaplacian gen_random_eulerian(int n, int m, RngStream rng);

// Two families of cycles around a torus: each grid row and each grid column
// is a directed cycle with its own random weight.
DirectedLaplacian gen_torus_flow(int n, RngStream rng);

DirectedLaplacian gen_family(const std::string& family, int n, int m, RngStream rng);

}  // namespace eulsolve
