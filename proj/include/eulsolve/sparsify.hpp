#pragma once

#include "eulsolve/laplacian.hpp"
#include "eulsolve/rng.hpp"
#include "eulsolve/sparse.hpp"
#include "eulsolve/types.hpp"

namespace eulsolve {

enum class SparsifierBackend { passthrough, sample_patch };

struct SparsifierConfig {
    SparsifierBackend backend = SparsifierBackend::sample_patch;
    double delta = 0.1;        // target error in (0, 1)
    double oversample = 16.0;  // c_s
    double failure_exponent = 3.0;  // nominal failure budget p = n^{-exponent}

    void check() const {
        if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("sparsifier delta must be in (0,1)");
        if (oversample < 1.0) throw InvalidInput("oversample constant must be >= 1");
    }
};

// Sample budget for a biclique product with m = nnz(x) + nnz(y) mass points.
double sparp_budget(int m, int n, double eps, const SparsifierConfig& cfg = {});

// Sparsifier output budget N_S(n, delta); used by the nnz guard in the
// Schur sparsifier.
double sparsifier_output_budget(int n, double delta, const SparsifierConfig& cfg = {});

// Biclique product sparsification: nonnegative A approximating x y^T with
// exact row sums (and column sums restored by mass moves within rows).
// Falls back to the exact product when the sample budget covers it.
SparseMatrix spar_p(std::span<const double> x, std::span<const double> y, double eps,
                    RngStream rng, const SparsifierConfig& cfg = {});

// Four-way split of spar_p along (F, C): block row and column sums preserved
// exactly per block, so the F-block degree vectors survive.
SparseMatrix sp(std::span<const double> x, std::span<const double> y, double eps,
                const Partition& part, RngStream rng, const SparsifierConfig& cfg = {});

// Eulerian Laplacian sparsifier: identical diagonal and row/column sums.
// passthrough returns the input; sample_patch keeps edge u->v with
// probability min(1, c_s w (1/d_out(u) + 1/d_in(v)) log(n) / delta^2),
// reweights kept edges by 1/p, and patches degree residuals back through the
// max-degree vertex.
DirectedLaplacian spar_e(const DirectedLaplacian& l, double delta, const SparsifierConfig& cfg,
                         RngStream rng);

// Partition-aware variant: additionally preserves the in/out degree vectors
// of the subgraph supported on (F, F), by sparsifying the four (F,C)-split
// subgraphs independently.
DirectedLaplacian se(const DirectedLaplacian& l, double eps, const Partition& part,
                     const SparsifierConfig& cfg, RngStream rng);

// Exposed for tests: expected kept weight of the sampler before patching.
struct SampledEdge {
    int src, dst;
    double weight;
};
std::vector<SampledEdge> sample_adjacency_pre_patch(const DirectedLaplacian& l, double delta,
                                                    const SparsifierConfig& cfg, RngStream rng);

}  // namespace eulsolve
