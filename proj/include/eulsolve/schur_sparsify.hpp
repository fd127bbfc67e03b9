#pragma once

#include "eulsolve/dense.hpp"
#include "eulsolve/laplacian.hpp"
#include "eulsolve/rng.hpp"
#include "eulsolve/sparsify.hpp"

namespace eulsolve {

// Number of partial-block-elimination rounds for a given problem size and
// target error: ceil(log2 log2 (n / delta)) + 2, at least 1.
int schur_rounds(int n, double delta);

// Patching matrix supported on the first row and column of its index space;
// adding it to S0 restores exact zero row and column sums.
struct PatchMatrix {
    int n = 0;
    double corner = 0.0;            // entry (0, 0)
    std::vector<double> first_col;  // entries (j, 0), j >= 1
    std::vector<double> first_row;  // entries (0, j), j >= 1

    SparseMatrix to_sparse() const;
    void apply(DenseMatrix& s0) const;
    double max_abs() const;
};

PatchMatrix patch_matrix(const DenseMatrix& s0, const Tolerances& tol = {});
PatchMatrix patch_matrix(const SparseMatrix& s0, const Tolerances& tol = {});

// Per-run record of the internal invariants; every quantity here is measured
// during the run, never recomputed after the fact. Setting capture_rounds
// before the call additionally stores each round's eliminated Laplacian
// (test use; dense row-major, n x n per round).
struct SchurSparsifyDiagnostics {
    int rounds = 0;
    double eps = 0.0;
    double alpha = 0.0;  // measured RCDD margin of L_FF at entry
    std::vector<double> att_ff_norm;        // ||D_FF^{-1} Att^(k)_FF||_inf, k = 0..K
    std::vector<double> att_ff_bound;       // (1/(1+alpha))^{2^k}
    double max_eulerian_drift = 0.0;        // relative to max degree
    double patch_bound = 0.0;               // closed-form bound of eq-(R) kind
    double patch_norm = 0.0;                // ||R||_max surrogate recorded from the run
    double s0_min_row_sum = 0.0, s0_min_col_sum = 0.0;
    bool output_strongly_connected = true;
    bool input_strongly_connected = true;
    bool capture_rounds = false;
    std::vector<std::vector<double>> ltt_rounds;  // Ltt^(k) for k = 1..K when captured
};

// Algorithm: K rounds of approximate partial block elimination with biclique
// sampling (SP), Eulerian resparsification (SE), a final biclique pass on the
// C blocks, degree patching, and one last sparsification at delta/8.
// Returns an Eulerian Laplacian on C (local indices, ordered like part.c()).
DirectedLaplacian sparse_schur(const DirectedLaplacian& l, const Partition& part, double delta,
                               const SparsifierConfig& cfg, RngStream rng,
                               SchurSparsifyDiagnostics* diag = nullptr);

}  // namespace eulsolve
