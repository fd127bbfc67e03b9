#pragma once

#include <span>
#include <vector>

#include "eulsolve/types.hpp"

namespace eulsolve {

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

// Sparse matrix with compressed row-major storage and a mirrored
// column-major index. The CSC view stores positions into the CSR value
// array, so both views always describe the identical entry set.
// Duplicate coordinates are merged at construction; explicit zeros are
// legal only transiently and are purged by compact().
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols);

    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> entries);
    static SparseMatrix identity(int n);
    static SparseMatrix from_dense(int rows, int cols, std::span<const double> row_major,
                                   double drop_tol = 0.0);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int nnz() const { return static_cast<int>(val_.size()); }

    // Row-major view.
    std::span<const int> row_ptr() const { return row_ptr_; }
    std::span<const int> row_cols(int i) const;
    std::span<const double> row_vals(int i) const;

    // Column-major view (positions index into the CSR value array).
    std::span<const int> col_ptr() const { return col_ptr_; }
    std::span<const int> col_rows(int j) const;
    // Entry value at the k-th position of column j.
    double col_val(int j, int k) const { return val_[csc_pos_[col_ptr_[j] + k]]; }

    double at(int i, int j) const;  // 0 if absent

    SparseMatrix transpose() const;
    SparseMatrix restrict(std::span<const int> rows, std::span<const int> cols) const;
    SparseMatrix compact(double drop_tol = 0.0) const;

    std::vector<double> multiply(std::span<const double> x) const;            // A x
    std::vector<double> multiply_transpose(std::span<const double> x) const;  // A^T x

    // alpha*A + beta*B
    static SparseMatrix add(const SparseMatrix& a, double alpha, const SparseMatrix& b,
                            double beta);
    SparseMatrix scaled(double s) const;

    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
    std::vector<double> diagonal() const;
    double max_abs() const;

    std::vector<Triplet> triplets() const;
    std::vector<double> to_dense() const;  // row-major, rows*cols

    // Verifies the CSR/CSC round trip; throws NumericError on mismatch.
    void check_mirror() const;

private:
    void build_csc();

    int rows_ = 0, cols_ = 0;
    std::vector<int> row_ptr_, col_idx_;
    std::vector<double> val_;
    std::vector<int> col_ptr_, row_idx_, csc_pos_;
};

}  // namespace eulsolve
