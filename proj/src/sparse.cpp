#include "eulsolve/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace eulsolve {

SparseMatrix::SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw InvalidInput("negative matrix dimension");
    row_ptr_.assign(rows + 1, 0);
    col_ptr_.assign(cols + 1, 0);
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> entries) {
    SparseMatrix m(rows, cols);
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw IndexError("triplet index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    // Merge duplicates by summation.
    std::size_t out = 0;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (out > 0 && entries[out - 1].row == entries[k].row &&
            entries[out - 1].col == entries[k].col) {
            entries[out - 1].value += entries[k].value;
        } else {
            entries[out++] = entries[k];
        }
    }
    entries.resize(out);

    m.col_idx_.resize(out);
    m.val_.resize(out);
    for (std::size_t k = 0; k < out; ++k) {
        m.row_ptr_[entries[k].row + 1]++;
        m.col_idx_[k] = entries[k].col;
        m.val_[k] = entries[k].value;
    }
    for (int i = 0; i < rows; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
    m.build_csc();
    return m;
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<Triplet> t(n);
    for (int i = 0; i < n; ++i) t[i] = {i, i, 1.0};
    return from_triplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::from_dense(int rows, int cols, std::span<const double> a,
                                      double drop_tol) {
    if (static_cast<int>(a.size()) != rows * cols)
        throw InvalidInput("dense buffer size mismatch");
    std::vector<Triplet> t;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            double v = a[static_cast<std::size_t>(i) * cols + j];
            if (std::abs(v) > drop_tol) t.push_back({i, j, v});
        }
    return from_triplets(rows, cols, std::move(t));
}

void SparseMatrix::build_csc() {
    col_ptr_.assign(cols_ + 1, 0);
    row_idx_.resize(val_.size());
    csc_pos_.resize(val_.size());
    for (int c : col_idx_) col_ptr_[c + 1]++;
    for (int j = 0; j < cols_; ++j) col_ptr_[j + 1] += col_ptr_[j];
    std::vector<int> next(col_ptr_.begin(), col_ptr_.end() - 1);
    for (int i = 0; i < rows_; ++i) {
        for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            int j = col_idx_[p];
            int q = next[j]++;
            row_idx_[q] = i;
            csc_pos_[q] = p;
        }
    }
}

std::span<const int> SparseMatrix::row_cols(int i) const {
    return {col_idx_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
}

std::span<const double> SparseMatrix::row_vals(int i) const {
    return {val_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
}

std::span<const int> SparseMatrix::col_rows(int j) const {
    return {row_idx_.data() + col_ptr_[j], static_cast<std::size_t>(col_ptr_[j + 1] - col_ptr_[j])};
}

double SparseMatrix::at(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw IndexError("at(): index out of range");
    auto cols = row_cols(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return val_[row_ptr_[i] + (it - cols.begin())];
}

SparseMatrix SparseMatrix::transpose() const {
    SparseMatrix m(cols_, rows_);
    m.col_idx_.resize(val_.size());
    m.val_.resize(val_.size());
    for (int j = 0; j < cols_; ++j) m.row_ptr_[j + 1] = col_ptr_[j + 1] - col_ptr_[j];
    for (int j = 0; j < cols_; ++j) m.row_ptr_[j + 1] += m.row_ptr_[j];
    for (int j = 0; j < cols_; ++j) {
        int base = m.row_ptr_[j];
        for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
            m.col_idx_[base + (p - col_ptr_[j])] = row_idx_[p];
            m.val_[base + (p - col_ptr_[j])] = val_[csc_pos_[p]];
        }
    }
    m.build_csc();
    return m;
}

SparseMatrix SparseMatrix::restrict(std::span<const int> rows, std::span<const int> cols) const {
    std::vector<int> col_map(cols_, -1);
    for (std::size_t k = 0; k < cols.size(); ++k) {
        int j = cols[k];
        if (j < 0 || j >= cols_) throw IndexError("restrict(): column out of range");
        col_map[j] = static_cast<int>(k);
    }
    std::vector<Triplet> t;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        int i = rows[r];
        if (i < 0 || i >= rows_) throw IndexError("restrict(): row out of range");
        auto cs = row_cols(i);
        auto vs = row_vals(i);
        for (std::size_t p = 0; p < cs.size(); ++p) {
            int jm = col_map[cs[p]];
            if (jm >= 0) t.push_back({static_cast<int>(r), jm, vs[p]});
        }
    }
    return from_triplets(static_cast<int>(rows.size()), static_cast<int>(cols.size()),
                         std::move(t));
}

SparseMatrix SparseMatrix::compact(double drop_tol) const {
    std::vector<Triplet> t;
    t.reserve(val_.size());
    for (int i = 0; i < rows_; ++i) {
        auto cs = row_cols(i);
        auto vs = row_vals(i);
        for (std::size_t p = 0; p < cs.size(); ++p)
            if (std::abs(vs[p]) > drop_tol) t.push_back({i, cs[p], vs[p]});
    }
    return from_triplets(rows_, cols_, std::move(t));
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != cols_) throw InvalidInput("spmv: size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        double acc = 0.0;
        for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) acc += val_[p] * x[col_idx_[p]];
        y[i] = acc;
    }
    return y;
}

std::vector<double> SparseMatrix::multiply_transpose(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != rows_) throw InvalidInput("spmv_t: size mismatch");
    std::vector<double> y(cols_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        double xi = x[i];
        if (xi == 0.0) continue;
        for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) y[col_idx_[p]] += val_[p] * xi;
    }
    return y;
}

SparseMatrix SparseMatrix::add(const SparseMatrix& a, double alpha, const SparseMatrix& b,
                               double beta) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidInput("add: shape mismatch");
    SparseMatrix m(a.rows_, a.cols_);
    m.col_idx_.reserve(a.val_.size() + b.val_.size());
    m.val_.reserve(a.val_.size() + b.val_.size());
    for (int i = 0; i < a.rows_; ++i) {
        auto ca = a.row_cols(i);
        auto va = a.row_vals(i);
        auto cb = b.row_cols(i);
        auto vb = b.row_vals(i);
        std::size_t pa = 0, pb = 0;
        while (pa < ca.size() || pb < cb.size()) {
            int ja = pa < ca.size() ? ca[pa] : a.cols_;
            int jb = pb < cb.size() ? cb[pb] : a.cols_;
            if (ja < jb) {
                m.col_idx_.push_back(ja);
                m.val_.push_back(alpha * va[pa++]);
            } else if (jb < ja) {
                m.col_idx_.push_back(jb);
                m.val_.push_back(beta * vb[pb++]);
            } else {
                m.col_idx_.push_back(ja);
                m.val_.push_back(alpha * va[pa++] + beta * vb[pb++]);
            }
        }
        m.row_ptr_[i + 1] = static_cast<int>(m.val_.size());
    }
    m.build_csc();
    return m;
}

SparseMatrix SparseMatrix::scaled(double s) const {
    SparseMatrix m = *this;
    for (double& v : m.val_) v *= s;
    return m;
}

std::vector<double> SparseMatrix::row_sums() const {
    std::vector<double> s(rows_, 0.0);
    for (int i = 0; i < rows_; ++i)
        for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s[i] += val_[p];
    return s;
}

std::vector<double> SparseMatrix::col_sums() const {
    std::vector<double> s(cols_, 0.0);
    for (int i = 0; i < rows_; ++i)
        for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s[col_idx_[p]] += val_[p];
    return s;
}

std::vector<double> SparseMatrix::diagonal() const {
    int n = std::min(rows_, cols_);
    std::vector<double> d(n, 0.0);
    for (int i = 0; i < n; ++i) d[i] = at(i, i);
    return d;
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : val_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<Triplet> SparseMatrix::triplets() const {
    std::vector<Triplet> t;
    t.reserve(val_.size());
    for (int i = 0; i < rows_; ++i) {
        auto cs = row_cols(i);
        auto vs = row_vals(i);
        for (std::size_t p = 0; p < cs.size(); ++p) t.push_back({i, cs[p], vs[p]});
    }
    return t;
}

std::vector<double> SparseMatrix::to_dense() const {
    std::vector<double> a(static_cast<std::size_t>(rows_) * cols_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        auto cs = row_cols(i);
        auto vs = row_vals(i);
        for (std::size_t p = 0; p < cs.size(); ++p)
            a[static_cast<std::size_t>(i) * cols_ + cs[p]] = vs[p];
    }
    return a;
}

void SparseMatrix::check_mirror() const {
    std::size_t count = 0;
    for (int j = 0; j < cols_; ++j) {
        for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
            int i = row_idx_[p];
            int q = csc_pos_[p];
            if (q < row_ptr_[i] || q >= row_ptr_[i + 1] || col_idx_[q] != j)
                throw NumericError("CSR/CSC mirror mismatch");
            ++count;
        }
    }
    if (count != val_.size()) throw NumericError("CSR/CSC mirror entry count mismatch");
}

Partition Partition::from_f(std::vector<int> f, int n) {
    Partition p;
    p.n_ = n;
    std::sort(f.begin(), f.end());
    std::vector<bool> mask(n, false);
    for (int i : f) {
        if (i < 0 || i >= n) throw IndexError("partition index out of range");
        if (mask[i]) throw InvalidInput("duplicate index in partition");
        mask[i] = true;
    }
    p.f_ = std::move(f);
    p.c_.reserve(n - p.f_.size());
    for (int i = 0; i < n; ++i)
        if (!mask[i]) p.c_.push_back(i);
    return p;
}

Partition Partition::from_mask(const std::vector<bool>& in_f) {
    std::vector<int> f;
    for (std::size_t i = 0; i < in_f.size(); ++i)
        if (in_f[i]) f.push_back(static_cast<int>(i));
    return from_f(std::move(f), static_cast<int>(in_f.size()));
}

}  // namespace eulsolve
