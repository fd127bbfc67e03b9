#include "eulsolve/schur_sparsify.hpp"

#include <algorithm>
#include <cmath>

namespace eulsolve {

namespace {

// Dense n x n working state for the elimination rounds. The pipeline state is
// dense because partial block elimination fills in quickly; inputs sparser
// than the fill threshold still pay only O(nnz) per outer product.
struct PbeState {
    int n = 0;
    std::vector<double> ltt;  // row-major
    std::vector<double> att;
    double& l(int i, int j) { return ltt[std::size_t(i) * n + j]; }
    double& a(int i, int j) { return att[std::size_t(i) * n + j]; }
    double lv(int i, int j) const { return ltt[std::size_t(i) * n + j]; }
    double av(int i, int j) const { return att[std::size_t(i) * n + j]; }
};

// max(||M 1||_inf, ||1^T M||_inf) relative to the max diagonal of M.
double relative_eulerian_drift(const std::vector<double>& m, int n) {
    double worst = 0.0, maxdiag = 0.0;
    std::vector<double> cs(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = m.data() + std::size_t(i) * n;
        double rs = 0.0;
        for (int j = 0; j < n; ++j) {
            rs += row[j];
            cs[j] += row[j];
        }
        worst = std::max(worst, std::abs(rs));
        maxdiag = std::max(maxdiag, row[i]);
    }
    for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(cs[j]));
    return worst / std::max(maxdiag, 1e-300);
}

// Whether the SE sampler would keep every edge of the current Ltt (the usual
// case at practical scales, where the per-edge probabilities saturate at 1).
bool se_keeps_all(const PbeState& st, double eps, const SparsifierConfig& cfg) {
    int n = st.n;
    double logn = std::log(std::max(n, 2));
    double factor = cfg.oversample * logn / (eps * eps);
    std::vector<double> d_out(n, 0.0), d_in(n, 0.0);
    for (int v = 0; v < n; ++v) {
        double row = 0.0;
        for (int u = 0; u < n; ++u) row += st.lv(v, u);
        double diag = st.lv(v, v);
        d_in[v] = diag - row;  // in-mass of v
    }
    for (int u = 0; u < n; ++u) {
        double col = 0.0;
        for (int v = 0; v < n; ++v) col += st.lv(v, u);
        d_out[u] = st.lv(u, u) - col;  // out-mass of u
    }
    for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u) {
            if (u == v) continue;
            double w = -st.lv(v, u);
            if (w <= 0.0) continue;
            double score = w * (1.0 / std::max(d_out[u], 1e-300) +
                                1.0 / std::max(d_in[v], 1e-300));
            if (cfg.backend == SparsifierBackend::sample_patch && factor * score < 1.0)
                return false;
        }
    return true;
}

SparseMatrix state_to_sparse(const std::vector<double>& m, int n) {
    return SparseMatrix::from_dense(n, n, m);
}

}  // namespace

int schur_rounds(int n, double delta) {
    double ratio = std::max(4.0, n / delta);
    int k = static_cast<int>(std::ceil(std::log2(std::log2(ratio)))) + 2;
    return std::max(k, 1);
}

SparseMatrix PatchMatrix::to_sparse() const {
    std::vector<Triplet> t;
    if (corner != 0.0) t.push_back({0, 0, corner});
    for (int j = 1; j < n; ++j) {
        if (first_col[j - 1] != 0.0) t.push_back({j, 0, first_col[j - 1]});
        if (first_row[j - 1] != 0.0) t.push_back({0, j, first_row[j - 1]});
    }
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

void PatchMatrix::apply(DenseMatrix& s0) const {
    s0(0, 0) += corner;
    for (int j = 1; j < n; ++j) {
        s0(j, 0) += first_col[j - 1];
        s0(0, j) += first_row[j - 1];
    }
}

double PatchMatrix::max_abs() const {
    double m = std::abs(corner);
    for (double v : first_col) m = std::max(m, std::abs(v));
    for (double v : first_row) m = std::max(m, std::abs(v));
    return m;
}

namespace {

PatchMatrix patch_from_sums(const std::vector<double>& row_sum, const std::vector<double>& col_sum,
                            double scale, const Tolerances& tol) {
    int n = static_cast<int>(row_sum.size());
    double limit = tol.structural_tol * std::max(scale, 1.0);
    for (int j = 0; j < n; ++j) {
        if (row_sum[j] < -limit || col_sum[j] < -limit)
            throw PreconditionViolated("patch_matrix: negative row/column sum");
    }
    PatchMatrix r;
    r.n = n;
    r.first_col.assign(std::max(n - 1, 0), 0.0);
    r.first_row.assign(std::max(n - 1, 0), 0.0);
    double tail_cols = 0.0;
    for (int j = 1; j < n; ++j) {
        r.first_col[j - 1] = -row_sum[j];
        r.first_row[j - 1] = -col_sum[j];
        tail_cols += col_sum[j];
    }
    r.corner = tail_cols - row_sum[0];
    return r;
}

}  // namespace

PatchMatrix patch_matrix(const DenseMatrix& s0, const Tolerances& tol) {
    if (s0.rows() != s0.cols()) throw InvalidInput("patch_matrix: matrix must be square");
    int n = s0.rows();
    std::vector<double> rs(n, 0.0), cs(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            rs[i] += s0(i, j);
            cs[j] += s0(i, j);
        }
    return patch_from_sums(rs, cs, s0.max_abs(), tol);
}

PatchMatrix patch_matrix(const SparseMatrix& s0, const Tolerances& tol) {
    if (s0.rows() != s0.cols()) throw InvalidInput("patch_matrix: matrix must be square");
    return patch_from_sums(s0.row_sums(), s0.col_sums(), s0.max_abs(), tol);
}

DirectedLaplacian sparse_schur(const DirectedLaplacian& l, const Partition& part, double delta,
                               const SparsifierConfig& cfg, RngStream rng,
                               SchurSparsifyDiagnostics* diag) {
    Tolerances tol;
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("sparse_schur: delta must be in (0,1)");
    if (!is_eulerian(l, tol.structural_tol)) throw NotEulerian("sparse_schur: input not Eulerian");
    int n = l.order();
    if (part.n() != n) throw InvalidInput("sparse_schur: partition size mismatch");
    const auto& f = part.f();
    const auto& c = part.c();
    int nf = static_cast<int>(f.size());
    int nc = static_cast<int>(c.size());
    if (nf == 0) throw InvalidInput("sparse_schur: empty F block");
    if (nc == 0) throw InvalidInput("sparse_schur: empty C block");

    SchurSparsifyDiagnostics local_diag;
    SchurSparsifyDiagnostics& dg = diag ? *diag : local_diag;
    bool capture = dg.capture_rounds;
    dg = SchurSparsifyDiagnostics{};
    dg.capture_rounds = capture;
    dg.input_strongly_connected = is_strongly_connected(l.matrix());

    if (nc == 1) {
        // Eulerian on a point: the zero 1x1 matrix.
        dg.rounds = 0;
        return DirectedLaplacian::from_matrix(SparseMatrix(1, 1), tol);
    }

    DirectedLaplacian input = l;
    // Guard: inputs denser than the sparsifier output budget get one
    // up-front sparsification at delta/4.
    if (static_cast<double>(l.matrix().nnz()) > sparsifier_output_budget(n, delta, cfg)) {
        input = spar_e(l, delta / 4.0, cfg, rng.derive(0xA11CE));
    }

    // RCDD precondition, measured on the working matrix.
    {
        SparseMatrix lff = input.matrix().restrict(f, f);
        auto margin = rcdd_margin(lff);
        if (!margin || !(*margin > 0.0))
            throw PreconditionViolated("sparse_schur: L_FF is not alpha-RCDD");
        dg.alpha = *margin;
    }

    int rounds = schur_rounds(n, delta);
    double eps = delta / (8.0 * rounds);
    dg.rounds = rounds;
    dg.eps = eps;

    std::vector<bool> in_f(n, false);
    for (int i : f) in_f[i] = true;

    // Dense working state.
    PbeState st;
    st.n = n;
    st.ltt = DenseMatrix::from_sparse(input.matrix()).data();
    st.att.assign(std::size_t(n) * n, 0.0);
    std::vector<double> d0 = input.diag();  // D = Diag(Ltt^(0)), fixed
    double max_deg = 0.0;
    for (double v : d0) max_deg = std::max(max_deg, v);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) st.a(i, j) = (i == j ? d0[i] : 0.0) - st.lv(i, j);

    auto att_ff_norm = [&]() {
        double worst = 0.0;
        for (int i : f) {
            double rs = 0.0;
            for (int j : f) rs += std::abs(st.av(i, j));
            worst = std::max(worst, rs / std::max(d0[i], 1e-300));
        }
        return worst;
    };
    dg.att_ff_norm.push_back(att_ff_norm());
    dg.att_ff_bound.push_back(1.0 / (1.0 + dg.alpha));

    std::vector<double> col_buf(n), y_dense;
    for (int k = 1; k <= rounds; ++k) {
        // Y^(k) = sum_{i in F} (1/D_ii) SP(Att_{:,i}, Att_{i,:}^T, eps, F).
        // When every per-i budget covers the exact product (the usual case),
        // the sum is accumulated densely; otherwise the sampled path runs
        // through sp() per column.
        y_dense.assign(std::size_t(n) * n, 0.0);
        for (int i : f) {
            int nnz_col = 0, nnz_row = 0;
            for (int r = 0; r < n; ++r) {
                col_buf[r] = st.av(r, i);
                if (col_buf[r] != 0.0) ++nnz_col;
            }
            const double* row_i = st.att.data() + std::size_t(i) * n;
            for (int s = 0; s < n; ++s)
                if (row_i[s] != 0.0) ++nnz_row;
            if (nnz_col == 0 || nnz_row == 0) continue;

            double budget = sparp_budget(nnz_col + nnz_row, n, eps, cfg);
            double inv_d = 1.0 / d0[i];
            if (static_cast<double>(nnz_col) * nnz_row <= budget) {
                for (int r = 0; r < n; ++r) {
                    double coeff = col_buf[r] * inv_d;
                    if (coeff == 0.0) continue;
                    double* yr = y_dense.data() + std::size_t(r) * n;
                    for (int s = 0; s < n; ++s) yr[s] += coeff * row_i[s];
                }
            } else {
                std::vector<double> row_vec(row_i, row_i + n);
                SparseMatrix yki =
                    sp(col_buf, row_vec, eps, part, rng.derive(0x59000000ULL + k * 1000003ULL + i), cfg);
                for (int r = 0; r < n; ++r) {
                    auto cs2 = yki.row_cols(r);
                    auto vs2 = yki.row_vals(r);
                    double* yr = y_dense.data() + std::size_t(r) * n;
                    for (std::size_t p = 0; p < cs2.size(); ++p) yr[cs2[p]] += inv_d * vs2[p];
                }
            }
        }

        // Ltt^(k,0) = [D_FF, -Att_FC; -Att_CF, 2 Ltt_CC] - Y^(k).
        std::vector<double> next(std::size_t(n) * n, 0.0);
        for (int r = 0; r < n; ++r) {
            double* nr = next.data() + std::size_t(r) * n;
            const double* yr = y_dense.data() + std::size_t(r) * n;
            if (in_f[r]) {
                for (int s = 0; s < n; ++s) nr[s] = (in_f[s] ? 0.0 : -st.av(r, s)) - yr[s];
                nr[r] += d0[r];
            } else {
                for (int s = 0; s < n; ++s)
                    nr[s] = (in_f[s] ? -st.av(r, s) : 2.0 * st.lv(r, s)) - yr[s];
            }
        }
        st.ltt = std::move(next);
        dg.max_eulerian_drift = std::max(
            dg.max_eulerian_drift, relative_eulerian_drift(st.ltt, n));
        if (dg.max_eulerian_drift > tol.structural_tol)
            throw NumericDrift("sparse_schur: Eulerian drift in Ltt^(k,0)");

        // Ltt^(k) = SE(Ltt^(k,0), eps, F).
        if (cfg.backend == SparsifierBackend::sample_patch && !se_keeps_all(st, eps, cfg)) {
            SparseMatrix sparse_ltt = state_to_sparse(st.ltt, n);
            DirectedLaplacian lap = DirectedLaplacian::from_matrix(std::move(sparse_ltt), tol);
            DirectedLaplacian sparsified =
                se(lap, eps, part, cfg, rng.derive(0x5E000000ULL + k));
            st.ltt = DenseMatrix::from_sparse(sparsified.matrix()).data();
            dg.max_eulerian_drift =
                std::max(dg.max_eulerian_drift,
                         relative_eulerian_drift(st.ltt, n));
        }

        // Att^(k) = [D_FF, 0; 0, Diag(Ltt_CC)] - Ltt^(k).
        for (int r = 0; r < n; ++r) {
            double diag_part = in_f[r] ? d0[r] : st.lv(r, r);
            for (int s = 0; s < n; ++s) st.a(r, s) = (r == s ? diag_part : 0.0) - st.lv(r, s);
        }
        dg.att_ff_norm.push_back(att_ff_norm());
        dg.att_ff_bound.push_back(std::pow(1.0 / (1.0 + dg.alpha), std::pow(2.0, k)));
        if (dg.capture_rounds) dg.ltt_rounds.push_back(st.ltt);
    }

    // Final biclique pass on the C blocks: Xhat = sum (1/D_ii) SparP(...).
    std::vector<double> xhat(std::size_t(nc) * nc, 0.0);
    std::vector<double> colc(nc), rowc(nc);
    for (int fi = 0; fi < nf; ++fi) {
        int i = f[fi];
        int nnz_col = 0, nnz_row = 0;
        for (int r = 0; r < nc; ++r) {
            colc[r] = st.av(c[r], i);
            rowc[r] = st.av(i, c[r]);
            if (colc[r] != 0.0) ++nnz_col;
            if (rowc[r] != 0.0) ++nnz_row;
        }
        if (nnz_col == 0 || nnz_row == 0) continue;
        double budget = sparp_budget(nnz_col + nnz_row, nc, eps, cfg);
        double inv_d = 1.0 / d0[i];
        if (static_cast<double>(nnz_col) * nnz_row <= budget) {
            for (int r = 0; r < nc; ++r) {
                double coeff = colc[r] * inv_d;
                if (coeff == 0.0) continue;
                double* xr = xhat.data() + std::size_t(r) * nc;
                for (int s = 0; s < nc; ++s) xr[s] += coeff * rowc[s];
            }
        } else {
            SparseMatrix xi = spar_p(colc, rowc, eps, rng.derive(0x3A000000ULL + i), cfg);
            for (int r = 0; r < nc; ++r) {
                auto cs2 = xi.row_cols(r);
                auto vs2 = xi.row_vals(r);
                double* xr = xhat.data() + std::size_t(r) * nc;
                for (std::size_t p = 0; p < cs2.size(); ++p) xr[cs2[p]] += inv_d * vs2[p];
            }
        }
    }

    // S^(0) = (Ltt^(K)_CC - Xhat) / 2^K, then the degree patch.
    double scale = std::ldexp(1.0, -rounds);  // 2^{-K}
    DenseMatrix s0(nc, nc);
    for (int r = 0; r < nc; ++r)
        for (int s = 0; s < nc; ++s)
            s0(r, s) = (st.lv(c[r], c[s]) - xhat[std::size_t(r) * nc + s]) * scale;

    {
        std::vector<double> rs(nc, 0.0), cs2(nc, 0.0);
        for (int r = 0; r < nc; ++r)
            for (int s = 0; s < nc; ++s) {
                rs[r] += s0(r, s);
                cs2[s] += s0(r, s);
            }
        dg.s0_min_row_sum = *std::min_element(rs.begin(), rs.end());
        dg.s0_min_col_sum = *std::min_element(cs2.begin(), cs2.end());
    }

    PatchMatrix r = patch_matrix(s0, tol);
    dg.patch_norm = r.max_abs();
    dg.patch_bound = nc > 0 ? (static_cast<double>(n) * n * max_deg /
                               (std::ldexp(1.0, rounds - 1) * std::max(dg.alpha, 1e-300))) *
                                  std::pow(1.0 / (1.0 + dg.alpha), std::pow(2.0, rounds))
                            : 0.0;
    r.apply(s0);

    // Clamp sign noise: a patched sum of magnitude below the structural
    // tolerance may leave an off-diagonal entry marginally positive.
    double s0_scale = s0.max_abs();
    for (int i = 0; i < nc; ++i)
        for (int j = 0; j < nc; ++j)
            if (i != j && s0(i, j) > 0.0) {
                if (s0(i, j) > tol.structural_tol * std::max(s0_scale, 1.0))
                    throw NumericDrift("sparse_schur: positive off-diagonal after patch");
                s0(i, j) = 0.0;
            }

    dg.max_eulerian_drift = std::max(dg.max_eulerian_drift, relative_eulerian_drift(s0.data(), nc));
    SparseMatrix shat_m = SparseMatrix::from_dense(nc, nc, s0.data());
    DirectedLaplacian shat = DirectedLaplacian::from_matrix(std::move(shat_m), tol);
    if (!is_eulerian(shat, tol.structural_tol))
        throw NumericDrift("sparse_schur: patched matrix not Eulerian");

    DirectedLaplacian s = cfg.backend == SparsifierBackend::passthrough
                              ? shat
                              : spar_e(shat, delta / 8.0, cfg, rng.derive(0xF15A1ULL));
    dg.output_strongly_connected = is_strongly_connected(s.matrix());
    return s;
}

}  // namespace eulsolve
