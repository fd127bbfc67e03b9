#pragma once

#include <optional>

#include "eulsolve/sparse.hpp"
#include "eulsolve/types.hpp"

namespace eulsolve {

struct Edge {
    int src = 0;
    int dst = 0;
    double weight = 0.0;
};

// Directed Laplacian: square, non-positive off-diagonals, zero column sums
// (diagonal holds weighted out-degrees). The eulerian flag additionally
// certifies zero row sums; it is validated at construction, not enforced on
// intermediate arithmetic. Immutable after construction.
class DirectedLaplacian {
public:
    DirectedLaplacian() = default;

    // L_{ij} = -w(j -> i); diagonal = weighted out-degrees. Duplicate edges
    // merge by weight summation. Column sums are zero by construction.
    static DirectedLaplacian build(std::span<const Edge> edges, int n);

    // Validates an existing matrix as a directed Laplacian.
    static DirectedLaplacian from_matrix(SparseMatrix mat, const Tolerances& tol = {});

    const SparseMatrix& matrix() const { return mat_; }
    int order() const { return mat_.rows(); }
    const std::vector<double>& diag() const { return diag_; }
    const std::vector<double>& row_sum_cache() const { return row_sum_; }
    const std::vector<double>& col_sum_cache() const { return col_sum_; }
    bool eulerian_flag() const { return eulerian_; }
    double max_degree() const;

private:
    SparseMatrix mat_;
    std::vector<double> diag_, row_sum_, col_sum_;
    bool eulerian_ = false;
};

// U_G(L) = (L + L^T - Diag((L + L^T) 1)) / 2. For Eulerian L this equals the
// plain symmetrization (L + L^T) / 2.
SparseMatrix undirectify(const DirectedLaplacian& l);
SparseMatrix undirectify(const SparseMatrix& l);

// Plain matrix symmetrization (A + A^T) / 2.
SparseMatrix symmetrize(const SparseMatrix& a);

bool is_eulerian(const DirectedLaplacian& l, double tol);
bool is_eulerian(const SparseMatrix& l, double tol);

// Largest alpha such that A is alpha-RCDD. Returns nullopt when some row or
// column violates plain (0-)RCDD; +infinity when every off-diagonal sum is
// zero.
std::optional<double> rcdd_margin(const SparseMatrix& a);

// Number of strongly connected components of the off-diagonal pattern.
int strongly_connected_components(const SparseMatrix& a);
bool is_strongly_connected(const SparseMatrix& a);

}  // namespace eulsolve
