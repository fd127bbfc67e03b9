#include "eulsolve/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eulsolve {

DirectedLaplacian DirectedLaplacian::build(std::span<const Edge> edges, int n) {
    std::vector<Triplet> t;
    t.reserve(edges.size() * 2);
    std::vector<double> out_deg(n, 0.0);
    for (const auto& e : edges) {
        if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
            throw InvalidEdge("edge endpoint out of range");
        if (e.src == e.dst) throw InvalidEdge("self-loop");
        if (!(e.weight > 0.0)) throw InvalidEdge("edge weight must be positive");
        t.push_back({e.dst, e.src, -e.weight});
        out_deg[e.src] += e.weight;
    }
    for (int i = 0; i < n; ++i)
        if (out_deg[i] != 0.0) t.push_back({i, i, 0.0});  // reserve the diagonal slot

    SparseMatrix m = SparseMatrix::from_triplets(n, n, std::move(t));
    // Set each diagonal to the negated off-diagonal column sum so columns
    // sum to zero exactly.
    std::vector<Triplet> fixed = m.triplets();
    std::vector<double> col_off(n, 0.0);
    for (const auto& e : fixed)
        if (e.row != e.col) col_off[e.col] += e.value;
    for (auto& e : fixed)
        if (e.row == e.col) e.value = -col_off[e.col];
    DirectedLaplacian l;
    l.mat_ = SparseMatrix::from_triplets(n, n, std::move(fixed));
    l.diag_ = l.mat_.diagonal();
    l.row_sum_ = l.mat_.row_sums();
    l.col_sum_ = l.mat_.col_sums();
    Tolerances tol;
    l.eulerian_ = is_eulerian(l.mat_, tol.structural_tol);
    return l;
}

DirectedLaplacian DirectedLaplacian::from_matrix(SparseMatrix mat, const Tolerances& tol) {
    if (mat.rows() != mat.cols()) throw InvalidInput("directed Laplacian must be square");
    int n = mat.rows();
    double scale = mat.max_abs();
    for (int i = 0; i < n; ++i) {
        auto cs = mat.row_cols(i);
        auto vs = mat.row_vals(i);
        for (std::size_t p = 0; p < cs.size(); ++p) {
            if (cs[p] != i && vs[p] > tol.structural_tol * std::max(scale, 1.0))
                throw InvalidInput("positive off-diagonal entry");
        }
    }
    DirectedLaplacian l;
    l.mat_ = std::move(mat);
    l.diag_ = l.mat_.diagonal();
    l.row_sum_ = l.mat_.row_sums();
    l.col_sum_ = l.mat_.col_sums();
    double deg = 0.0;
    for (double d : l.diag_) deg = std::max(deg, std::abs(d));
    for (double s : l.col_sum_)
        if (std::abs(s) > tol.structural_tol * std::max(deg, 1.0))
            throw InvalidInput("column sums not zero: not a directed Laplacian");
    l.eulerian_ = is_eulerian(l.mat_, tol.structural_tol);
    return l;
}

double DirectedLaplacian::max_degree() const {
    double m = 0.0;
    for (double d : diag_) m = std::max(m, d);
    return m;
}

SparseMatrix symmetrize(const SparseMatrix& a) {
    return SparseMatrix::add(a, 0.5, a.transpose(), 0.5);
}

SparseMatrix undirectify(const SparseMatrix& l) {
    SparseMatrix s = symmetrize(l);
    std::vector<double> rs = s.row_sums();
    std::vector<Triplet> t = s.triplets();
    std::vector<bool> seen(l.rows(), false);
    for (auto& e : t) {
        if (e.row == e.col) {
            e.value -= rs[e.row];
            seen[e.row] = true;
        }
    }
    for (int i = 0; i < l.rows(); ++i)
        if (!seen[i] && rs[i] != 0.0) t.push_back({i, i, -rs[i]});
    return SparseMatrix::from_triplets(l.rows(), l.cols(), std::move(t));
}

SparseMatrix undirectify(const DirectedLaplacian& l) { return undirectify(l.matrix()); }

bool is_eulerian(const SparseMatrix& l, double tol) {
    if (l.rows() != l.cols()) return false;
    std::vector<double> rs = l.row_sums();
    std::vector<double> cs = l.col_sums();
    double deg = 0.0;
    for (double d : l.diagonal()) deg = std::max(deg, std::abs(d));
    double lim = tol * std::max(deg, 1.0);
    for (double v : rs)
        if (std::abs(v) > lim) return false;
    for (double v : cs)
        if (std::abs(v) > lim) return false;
    return true;
}

bool is_eulerian(const DirectedLaplacian& l, double tol) { return is_eulerian(l.matrix(), tol); }

std::optional<double> rcdd_margin(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw InvalidInput("rcdd_margin: matrix must be square");
    int n = a.rows();
    std::vector<double> row_off(n, 0.0), col_off(n, 0.0), diag(n, 0.0);
    for (int i = 0; i < n; ++i) {
        auto cs = a.row_cols(i);
        auto vs = a.row_vals(i);
        for (std::size_t p = 0; p < cs.size(); ++p) {
            if (cs[p] == i) {
                diag[i] = vs[p];
            } else {
                row_off[i] += std::abs(vs[p]);
                col_off[cs[p]] += std::abs(vs[p]);
            }
        }
    }
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double off = std::max(row_off[i], col_off[i]);
        if (off == 0.0) continue;
        if (diag[i] < off) return std::nullopt;  // violates 0-RCDD
        margin = std::min(margin, diag[i] / off - 1.0);
    }
    return margin;
}

namespace {

// Iterative Tarjan over the off-diagonal pattern.
struct TarjanState {
    const SparseMatrix& a;
    std::vector<int> index, low, stack;
    std::vector<bool> on_stack;
    int next_index = 0, components = 0;

    explicit TarjanState(const SparseMatrix& m)
        : a(m), index(m.rows(), -1), low(m.rows(), 0), on_stack(m.rows(), false) {}

    void run(int root) {
        struct Frame {
            int v;
            int edge;
        };
        std::vector<Frame> frames;
        frames.push_back({root, 0});
        while (!frames.empty()) {
            auto& fr = frames.back();
            int v = fr.v;
            if (fr.edge == 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            auto cols = a.row_cols(v);
            bool descended = false;
            while (fr.edge < static_cast<int>(cols.size())) {
                int w = cols[fr.edge++];
                if (w == v) continue;
                if (index[w] == -1) {
                    frames.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                ++components;
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    if (w == v) break;
                }
            }
            frames.pop_back();
            if (!frames.empty()) {
                int parent = frames.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
};

}  // namespace

int strongly_connected_components(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw InvalidInput("scc: matrix must be square");
    TarjanState st(a);
    for (int v = 0; v < a.rows(); ++v)
        if (st.index[v] == -1) st.run(v);
    return st.components;
}

bool is_strongly_connected(const SparseMatrix& a) {
    return a.rows() <= 1 || strongly_connected_components(a) == 1;
}

}  // namespace eulsolve
