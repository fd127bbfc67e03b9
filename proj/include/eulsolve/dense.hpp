#pragma once

#include <span>
#include <utility>
#include <vector>

#include "eulsolve/laplacian.hpp"
#include "eulsolve/sparse.hpp"
#include "eulsolve/types.hpp"

namespace eulsolve {

// Hard cap for dense oracle computations; everything beyond errors out.
inline constexpr int kOracleDimensionCap = 2000;

// Small dense matrix, row-major. Used only by the oracle layer and the final
// chain level; never on the large-scale solve path.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols, 0.0) {}
    DenseMatrix(int rows, int cols, std::vector<double> data);

    static DenseMatrix identity(int n);
    static DenseMatrix from_sparse(const SparseMatrix& s);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }
    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    DenseMatrix transpose() const;
    DenseMatrix multiply(const DenseMatrix& b) const;
    std::vector<double> multiply(std::span<const double> x) const;
    DenseMatrix restrict(std::span<const int> rows, std::span<const int> cols) const;
    static DenseMatrix add(const DenseMatrix& a, double alpha, const DenseMatrix& b, double beta);
    DenseMatrix scaled(double s) const;

    double frobenius_norm() const;
    double max_abs() const;
    bool finite() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

// Symmetric eigendecomposition (Householder tridiagonalization + implicit QL).
// Eigenvalues ascending; vectors.column(k) pairs with values[k].
struct SymEig {
    std::vector<double> values;
    DenseMatrix vectors;
};
SymEig sym_eig(const DenseMatrix& a);
// Eigenvalues only (ascending); skips the transform accumulation.
std::vector<double> sym_eigenvalues(const DenseMatrix& a);

// Prefactored U^{+/2} with its kernel basis, for repeated asym_measure calls
// against one reference matrix.
struct PsdRoot {
    DenseMatrix root;    // U^{+/2}
    DenseMatrix kernel;  // columns spanning ker(U); may have zero columns
    double lambda_max = 0.0;
};
PsdRoot make_psd_root(const DenseMatrix& u, const Tolerances& tol = {});

// Singular value decomposition by one-sided Jacobi: A = U diag(s) V^T.
struct Svd {
    DenseMatrix u;
    std::vector<double> s;  // descending
    DenseMatrix v;
};
Svd svd(const DenseMatrix& a);

// LU with partial pivoting.
class DenseLu {
public:
    explicit DenseLu(DenseMatrix a);
    std::vector<double> solve(std::span<const double> b) const;
    // Smallest and largest absolute pivot, for conditioning checks.
    double min_pivot() const { return min_pivot_; }
    double max_pivot() const { return max_pivot_; }

private:
    DenseMatrix lu_;
    std::vector<int> perm_;
    double min_pivot_ = 0.0, max_pivot_ = 0.0;
};

// Moore-Penrose pseudoinverse; singular values below rel_cutoff * sigma_max
// are treated as zero.
DenseMatrix pinv(const DenseMatrix& a, double rel_cutoff = 1e-12);

double spectral_norm(const DenseMatrix& a);

// sc(A, F) = A_CC - A_CF A_FF^{-1} A_FC. Throws SingularBlock when the
// smallest singular value of A_FF is below 1e-12 * ||A_FF||.
DenseMatrix exact_schur(const DenseMatrix& a, const Partition& part);

// Exact k-th partially-block-eliminated Laplacian and its nonnegative
// complement: L^(0) = L, A^(k) = [D_FF, 0; 0, Diag(L^(k))] - L^(k),
// L^(k) = [D_FF, -A_FC; -A_CF, 2 L_CC] - A_{:,F} D_FF^{-1} A_{F,:}.
// Matrices live on the original index space (no permutation materialized).
struct PbePair {
    DenseMatrix l;  // L^(k)
    DenseMatrix a;  // A^(k)
};
PbePair exact_pbe(const DirectedLaplacian& l, const Partition& part, int k);

struct AsymMeasureReport {
    double value = 0.0;  // ||U^{+/2} A U^{+/2}||_2
    bool kernel_ok = true;
};
AsymMeasureReport asym_measure(const DenseMatrix& a, const DenseMatrix& u,
                               const Tolerances& tol = {});
AsymMeasureReport asym_measure(const DenseMatrix& a, const PsdRoot& root,
                               const Tolerances& tol = {});

double lambda2(const DenseMatrix& u);
double min_eigenvalue(const DenseMatrix& sym);

double u_norm(const DenseMatrix& u, std::span<const double> x);
double u_norm(const SparseMatrix& u, std::span<const double> x);

// x = L^+ b for a strongly connected Laplacian with ker(L) = ker(L^T) = 1,
// via dense LU of L + (1 1^T)/n; exact for b orthogonal to 1. This is the
// oracle solve path (cheaper than a full pseudoinverse at n up to the cap).
std::vector<double> laplacian_pinv_apply(const DenseMatrix& l, std::span<const double> b);

}  // namespace eulsolve
