#include "eulsolve/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace eulsolve {

namespace {

void check_cap(int n) {
    if (n > kOracleDimensionCap) throw TooLarge("dense oracle capped at 2000");
}

double hypot2(double a, double b) { return std::hypot(a, b); }

}  // namespace

DenseMatrix::DenseMatrix(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), a_(std::move(data)) {
    if (a_.size() != std::size_t(rows) * cols) throw InvalidInput("dense data size mismatch");
}

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& s) {
    check_cap(std::max(s.rows(), s.cols()));
    return DenseMatrix(s.rows(), s.cols(), s.to_dense());
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

DenseMatrix DenseMatrix::multiply(const DenseMatrix& b) const {
    if (cols_ != b.rows_) throw InvalidInput("dense multiply: shape mismatch");
    DenseMatrix c(rows_, b.cols_);
    // ikj loop order keeps the inner loop contiguous.
    for (int i = 0; i < rows_; ++i) {
        const double* ai = a_.data() + std::size_t(i) * cols_;
        double* ci = c.a_.data() + std::size_t(i) * b.cols_;
        for (int k = 0; k < cols_; ++k) {
            double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.a_.data() + std::size_t(k) * b.cols_;
            for (int j = 0; j < b.cols_; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != cols_) throw InvalidInput("dense gemv: size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        const double* ai = a_.data() + std::size_t(i) * cols_;
        double acc = 0.0;
        for (int j = 0; j < cols_; ++j) acc += ai[j] * x[j];
        y[i] = acc;
    }
    return y;
}

DenseMatrix DenseMatrix::restrict(std::span<const int> rows, std::span<const int> cols) const {
    DenseMatrix m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= rows_) throw IndexError("restrict: row out of range");
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j] < 0 || cols[j] >= cols_) throw IndexError("restrict: col out of range");
            m(static_cast<int>(i), static_cast<int>(j)) = (*this)(rows[i], cols[j]);
        }
    }
    return m;
}

DenseMatrix DenseMatrix::add(const DenseMatrix& a, double alpha, const DenseMatrix& b,
                             double beta) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidInput("dense add: shape mismatch");
    DenseMatrix c(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.a_.size(); ++k) c.a_[k] = alpha * a.a_[k] + beta * b.a_[k];
    return c;
}

DenseMatrix DenseMatrix::scaled(double s) const {
    DenseMatrix c = *this;
    for (double& v : c.a_) v *= s;
    return c;
}

double DenseMatrix::frobenius_norm() const {
    double acc = 0.0;
    for (double v : a_) acc += v * v;
    return std::sqrt(acc);
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

bool DenseMatrix::finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

// Householder reduction to tridiagonal form followed by implicit-shift QL,
// after the classical tred2/tql2 routines. With want_vectors false the
// transform accumulation is skipped (tred1/tql1 behavior).
void tridiag_ql(DenseMatrix& z, std::vector<double>& d, bool want_vectors) {
    int n = z.rows();
    if (n == 0) return;
    std::vector<double> e(n, 0.0);

    for (int i = n - 1; i > 0; --i) {
        int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(z(i, k));
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    if (want_vectors) z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    if (want_vectors) {
        for (int i = 0; i < n; ++i) {
            int l = i - 1;
            if (d[i] != 0.0) {
                for (int j = 0; j <= l; ++j) {
                    double g = 0.0;
                    for (int k = 0; k <= l; ++k) g += z(i, k) * z(k, j);
                    for (int k = 0; k <= l; ++k) z(k, j) -= g * z(k, i);
                }
            }
            d[i] = z(i, i);
            z(i, i) = 1.0;
            for (int j = 0; j <= l; ++j) z(j, i) = z(i, j) = 0.0;
        }
    } else {
        for (int i = 0; i < n; ++i) d[i] = z(i, i);
    }

    // tql2
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 50) throw NumericError("sym_eig: QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = hypot2(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = hypot2(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (want_vectors) {
                        for (int k = 0; k < n; ++k) {
                            f = z(k, i + 1);
                            z(k, i + 1) = s * z(k, i) + c * f;
                            z(k, i) = c * z(k, i) - s * f;
                        }
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }

}

}  // namespace

SymEig sym_eig(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw InvalidInput("sym_eig: matrix must be square");
    check_cap(a.rows());
    if (!a.finite()) throw NumericError("sym_eig: non-finite input");
    int n = a.rows();
    SymEig out;
    out.values.assign(n, 0.0);
    out.vectors = a;
    tridiag_ql(out.vectors, out.values, /*want_vectors=*/true);

    // Sort ascending, permuting eigenvector columns along.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return out.values[x] < out.values[y]; });
    std::vector<double> ds(n);
    DenseMatrix zs(n, n);
    for (int k = 0; k < n; ++k) {
        ds[k] = out.values[order[k]];
        for (int r = 0; r < n; ++r) zs(r, k) = out.vectors(r, order[k]);
    }
    out.values = std::move(ds);
    out.vectors = std::move(zs);
    return out;
}

std::vector<double> sym_eigenvalues(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw InvalidInput("sym_eigenvalues: matrix must be square");
    check_cap(a.rows());
    if (!a.finite()) throw NumericError("sym_eigenvalues: non-finite input");
    DenseMatrix work = a;
    std::vector<double> d(a.rows(), 0.0);
    tridiag_ql(work, d, /*want_vectors=*/false);
    std::sort(d.begin(), d.end());
    return d;
}

// One-sided Jacobi SVD (Hestenes). Adequate and robust at oracle scale.
Svd svd(const DenseMatrix& a) {
    check_cap(std::max(a.rows(), a.cols()));
    if (!a.finite()) throw NumericError("svd: non-finite input");
    bool transposed = a.rows() < a.cols();
    DenseMatrix w = transposed ? a.transpose() : a;  // rows >= cols
    int m = w.rows(), n = w.cols();
    DenseMatrix v = DenseMatrix::identity(n);

    const double eps = 1e-15;
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (int i = 0; i < m; ++i) {
                    alpha += w(i, p) * w(i, p);
                    beta += w(i, q) * w(i, q);
                    gamma += w(i, p) * w(i, q);
                }
                off = std::max(off, std::abs(gamma) / std::max(std::sqrt(alpha * beta), 1e-300));
                if (std::abs(gamma) <= eps * std::sqrt(alpha * beta) || gamma == 0.0) continue;
                double zeta = (beta - alpha) / (2.0 * gamma);
                double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (int i = 0; i < m; ++i) {
                    double wp = w(i, p), wq = w(i, q);
                    w(i, p) = c * wp - s * wq;
                    w(i, q) = s * wp + c * wq;
                }
                for (int i = 0; i < n; ++i) {
                    double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (off < eps) break;
    }

    std::vector<double> s(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double norm = 0.0;
        for (int i = 0; i < m; ++i) norm += w(i, j) * w(i, j);
        s[j] = std::sqrt(norm);
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return s[x] > s[y]; });

    DenseMatrix u(m, n), vs(n, n);
    std::vector<double> ss(n);
    for (int k = 0; k < n; ++k) {
        int j = order[k];
        ss[k] = s[j];
        double inv = s[j] > 0.0 ? 1.0 / s[j] : 0.0;
        for (int i = 0; i < m; ++i) u(i, k) = w(i, j) * inv;
        for (int i = 0; i < n; ++i) vs(i, k) = v(i, j);
    }
    Svd out;
    if (transposed) {
        out.u = std::move(vs);
        out.v = std::move(u);
    } else {
        out.u = std::move(u);
        out.v = std::move(vs);
    }
    out.s = std::move(ss);
    return out;
}

DenseLu::DenseLu(DenseMatrix a) : lu_(std::move(a)) {
    if (lu_.rows() != lu_.cols()) throw InvalidInput("lu: matrix must be square");
    check_cap(lu_.rows());
    int n = lu_.rows();
    perm_.resize(n);
    std::iota(perm_.begin(), perm_.end(), 0);
    min_pivot_ = std::numeric_limits<double>::infinity();
    max_pivot_ = 0.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(lu_(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(lu_(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
            std::swap(perm_[k], perm_[piv]);
        }
        double pivot = lu_(k, k);
        min_pivot_ = std::min(min_pivot_, std::abs(pivot));
        max_pivot_ = std::max(max_pivot_, std::abs(pivot));
        if (pivot == 0.0) continue;  // singular; solve() will surface it
        for (int i = k + 1; i < n; ++i) {
            double f = lu_(i, k) / pivot;
            lu_(i, k) = f;
            if (f == 0.0) continue;
            for (int j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
    if (n == 0) min_pivot_ = 0.0;
}

std::vector<double> DenseLu::solve(std::span<const double> b) const {
    int n = lu_.rows();
    if (static_cast<int>(b.size()) != n) throw InvalidInput("lu solve: size mismatch");
    if (min_pivot_ == 0.0) throw SingularBlock("lu solve: singular matrix");
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
        x[i] /= lu_(i, i);
    }
    return x;
}

DenseMatrix pinv(const DenseMatrix& a, double rel_cutoff) {
    if (!a.finite()) throw NumericError("pinv: non-finite input");
    Svd f = svd(a);
    double smax = f.s.empty() ? 0.0 : f.s.front();
    double cutoff = rel_cutoff * smax;
    int r = f.v.rows();
    DenseMatrix result(a.cols(), a.rows());
    // V diag(1/s) U^T accumulated rank-by-rank.
    for (std::size_t k = 0; k < f.s.size(); ++k) {
        if (f.s[k] <= cutoff || f.s[k] == 0.0) continue;
        double inv = 1.0 / f.s[k];
        for (int i = 0; i < r; ++i) {
            double vik = f.v(i, static_cast<int>(k)) * inv;
            if (vik == 0.0) continue;
            for (int j = 0; j < a.rows(); ++j)
                result(i, j) += vik * f.u(j, static_cast<int>(k));
        }
    }
    return result;
}

double spectral_norm(const DenseMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    // sqrt(lambda_max(A^T A)) via the symmetric eigensolver.
    DenseMatrix ata = a.transpose().multiply(a);
    std::vector<double> ev = sym_eigenvalues(ata);
    double top = ev.empty() ? 0.0 : ev.back();
    return std::sqrt(std::max(0.0, top));
}

DenseMatrix exact_schur(const DenseMatrix& a, const Partition& part) {
    if (a.rows() != a.cols() || a.rows() != part.n())
        throw InvalidInput("exact_schur: partition size mismatch");
    const auto& f = part.f();
    const auto& c = part.c();
    DenseMatrix aff = a.restrict(f, f);
    DenseMatrix afc = a.restrict(f, c);
    DenseMatrix acf = a.restrict(c, f);
    DenseMatrix acc = a.restrict(c, c);
    if (!f.empty()) {
        Svd sf = svd(aff);
        double smax = sf.s.front(), smin = sf.s.back();
        if (smin <= 1e-12 * smax) throw SingularBlock("exact_schur: A_FF numerically singular");
    }
    DenseLu lu(aff);
    // A_CC - A_CF A_FF^{-1} A_FC, one solve per column of A_FC.
    int nf = static_cast<int>(f.size()), nc = static_cast<int>(c.size());
    for (int j = 0; j < nc; ++j) {
        std::vector<double> col(nf);
        for (int i = 0; i < nf; ++i) col[i] = afc(i, j);
        std::vector<double> x = nf > 0 ? lu.solve(col) : std::vector<double>{};
        for (int i = 0; i < nc; ++i) {
            double acc_ij = 0.0;
            for (int k = 0; k < nf; ++k) acc_ij += acf(i, k) * x[k];
            acc(i, j) -= acc_ij;
        }
    }
    return acc;
}

PbePair exact_pbe(const DirectedLaplacian& l, const Partition& part, int k) {
    int n = l.order();
    check_cap(n);
    if (part.n() != n) throw InvalidInput("exact_pbe: partition size mismatch");
    Tolerances tol;
    if (!is_eulerian(l, tol.structural_tol)) throw NotEulerian("exact_pbe: input not Eulerian");

    const auto& f = part.f();
    std::vector<bool> in_f(n, false);
    for (int i : f) in_f[i] = true;
    std::vector<double> dff(n, 0.0);
    for (int i : f) {
        dff[i] = l.diag()[i];
        if (dff[i] == 0.0) throw SingularBlock("exact_pbe: zero diagonal in D_FF");
    }

    DenseMatrix lk = DenseMatrix::from_sparse(l.matrix());
    DenseMatrix ak(n, n);
    // A^(0) = Diag(L) - L.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ak(i, j) = (i == j ? l.diag()[i] : 0.0) - lk(i, j);

    for (int step = 0; step < k; ++step) {
        DenseMatrix next(n, n);
        // Block part: [D_FF, -A_FC; -A_CF, 2 L_CC] laid out on the original
        // index space.
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (in_f[i] && in_f[j])
                    next(i, j) = (i == j) ? dff[i] : 0.0;
                else if (in_f[i] || in_f[j])
                    next(i, j) = -ak(i, j);
                else
                    next(i, j) = 2.0 * lk(i, j);
            }
        }
        // Subtract A_{:,F} D_FF^{-1} A_{F,:}.
        for (int t : f) {
            double inv = 1.0 / dff[t];
            for (int i = 0; i < n; ++i) {
                double a_it = ak(i, t);
                if (a_it == 0.0) continue;
                double coeff = a_it * inv;
                for (int j = 0; j < n; ++j) next(i, j) -= coeff * ak(t, j);
            }
        }
        lk = std::move(next);
        // A^(k) = [D_FF, 0; 0, Diag(L^(k))] - L^(k).
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double diag_part = 0.0;
                if (i == j) diag_part = in_f[i] ? dff[i] : lk(i, i);
                ak(i, j) = diag_part - lk(i, j);
            }
    }
    return {std::move(lk), std::move(ak)};
}

PsdRoot make_psd_root(const DenseMatrix& u, const Tolerances& tol) {
    if (u.rows() != u.cols()) throw InvalidInput("make_psd_root: matrix must be square");
    if (!u.finite()) throw NumericError("make_psd_root: non-finite input");
    int n = u.rows();
    SymEig e = sym_eig(u);
    double lmax = 0.0;
    for (double v : e.values) lmax = std::max(lmax, std::abs(v));
    if (!e.values.empty() && e.values.front() < -tol.psd_tol * std::max(lmax, 1.0))
        throw NotPSD("make_psd_root: matrix not PSD");

    PsdRoot out;
    out.lambda_max = lmax;
    out.root = DenseMatrix(n, n);
    double cutoff = std::max(lmax, 0.0) * 1e-12;
    std::vector<int> kernel_cols;
    for (int k = 0; k < n; ++k) {
        double lam = e.values[k];
        if (lam <= cutoff) {
            kernel_cols.push_back(k);
            continue;
        }
        double w = 1.0 / std::sqrt(lam);
        for (int i = 0; i < n; ++i) {
            double vik = e.vectors(i, k) * w;
            if (vik == 0.0) continue;
            for (int j = 0; j < n; ++j) out.root(i, j) += vik * e.vectors(j, k);
        }
    }
    out.kernel = DenseMatrix(n, static_cast<int>(kernel_cols.size()));
    for (std::size_t c = 0; c < kernel_cols.size(); ++c)
        for (int i = 0; i < n; ++i) out.kernel(i, static_cast<int>(c)) = e.vectors(i, kernel_cols[c]);
    return out;
}

AsymMeasureReport asym_measure(const DenseMatrix& a, const PsdRoot& root, const Tolerances& tol) {
    if (a.rows() != a.cols() || a.rows() != root.root.rows())
        throw InvalidInput("asym_measure: shape mismatch");
    if (!a.finite()) throw NumericError("asym_measure: non-finite input");
    int n = a.rows();
    AsymMeasureReport rep;
    double a_scale = std::max(a.max_abs(), 1.0);
    for (int k = 0; k < root.kernel.cols(); ++k) {
        // Kernel direction: require v in ker(A) and ker(A^T).
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = root.kernel(i, k);
        std::vector<double> av = a.multiply(v);
        std::vector<double> atv = a.transpose().multiply(v);
        for (int i = 0; i < n; ++i) {
            if (std::abs(av[i]) > tol.structural_tol * a_scale ||
                std::abs(atv[i]) > tol.structural_tol * a_scale)
                rep.kernel_ok = false;
        }
    }
    DenseMatrix b = root.root.multiply(a).multiply(root.root);
    rep.value = spectral_norm(b);
    return rep;
}

AsymMeasureReport asym_measure(const DenseMatrix& a, const DenseMatrix& u,
                               const Tolerances& tol) {
    if (u.rows() != u.cols() || a.rows() != u.rows())
        throw InvalidInput("asym_measure: shape mismatch");
    if (!u.finite()) throw NumericError("asym_measure: non-finite input");
    return asym_measure(a, make_psd_root(u, tol), tol);
}

double lambda2(const DenseMatrix& u) {
    if (u.rows() < 2) throw InvalidInput("lambda2 needs n >= 2");
    return sym_eigenvalues(u)[1];
}

double min_eigenvalue(const DenseMatrix& sym) {
    std::vector<double> ev = sym_eigenvalues(sym);
    return ev.empty() ? 0.0 : ev.front();
}

double u_norm(const DenseMatrix& u, std::span<const double> x) {
    std::vector<double> ux = u.multiply(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < ux.size(); ++i) acc += x[i] * ux[i];
    return std::sqrt(std::max(0.0, acc));
}

double u_norm(const SparseMatrix& u, std::span<const double> x) {
    std::vector<double> ux = u.multiply(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < ux.size(); ++i) acc += x[i] * ux[i];
    return std::sqrt(std::max(0.0, acc));
}

std::vector<double> laplacian_pinv_apply(const DenseMatrix& l, std::span<const double> b) {
    int n = l.rows();
    check_cap(n);
    double mean = 0.0;
    for (double v : b) mean += v;
    mean /= std::max(n, 1);
    DenseMatrix shifted = l;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) shifted(i, j) += 1.0 / n;
    DenseLu lu(std::move(shifted));
    std::vector<double> bp(b.begin(), b.end());
    for (double& v : bp) v -= mean;  // project b onto 1-perp
    std::vector<double> x = lu.solve(bp);
    double xm = 0.0;
    for (double v : x) xm += v;
    xm /= std::max(n, 1);
    for (double& v : x) v -= xm;
    return x;
}

}  // namespace eulsolve
