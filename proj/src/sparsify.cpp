#include "eulsolve/sparsify.hpp"

#include <algorithm>
#include <cmath>

namespace eulsolve {

namespace {

struct Edge3 {
    int u, v;
    double w;
};

double vec_sum(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

int vec_nnz(std::span<const double> x) {
    int c = 0;
    for (double v : x)
        if (v != 0.0) ++c;
    return c;
}

// Moves mass between columns within rows until column sums match their
// targets; row sums are untouched. Entries stay nonnegative.
void fix_column_sums(std::vector<Edge3>& entries, std::span<const double> col_target, int cols) {
    std::vector<double> actual(cols, 0.0);
    for (const auto& e : entries) actual[e.v] += e.w;

    std::vector<int> surplus, deficit;
    std::vector<double> need(cols, 0.0);
    for (int j = 0; j < cols; ++j) {
        need[j] = col_target[j] - actual[j];
        if (need[j] > 0.0)
            deficit.push_back(j);
        else if (need[j] < 0.0)
            surplus.push_back(j);
    }
    if (deficit.empty() || surplus.empty()) return;

    // Per-column entry lists for the surplus columns.
    std::vector<std::vector<int>> by_col(cols);
    for (std::size_t k = 0; k < entries.size(); ++k)
        if (need[entries[k].v] < 0.0) by_col[entries[k].v].push_back(static_cast<int>(k));

    std::size_t dp = 0;
    for (int j : surplus) {
        double excess = -need[j];
        for (int k : by_col[j]) {
            if (excess <= 0.0) break;
            Edge3& e = entries[k];
            double take = std::min(e.w, excess);
            e.w -= take;
            excess -= take;
            // Deposit into deficit columns at the same row.
            while (take > 0.0 && dp < deficit.size()) {
                int jd = deficit[dp];
                double amount = std::min(take, need[jd]);
                entries.push_back({e.u, jd, amount});
                need[jd] -= amount;
                take -= amount;
                if (need[jd] <= 0.0) ++dp;
            }
        }
    }
}

// Sampled outer-product rows with exact row sums; returns edges (i, j, w).
std::vector<Edge3> sample_outer_product(std::span<const double> x, std::span<const double> y,
                                        double budget, RngStream rng) {
    double sx = vec_sum(x);
    double sy = vec_sum(y);
    std::vector<Edge3> out;

    std::vector<int> ycols;
    std::vector<double> ycdf;
    for (int j = 0; j < static_cast<int>(y.size()); ++j)
        if (y[j] != 0.0) {
            ycols.push_back(j);
            ycdf.push_back((ycdf.empty() ? 0.0 : ycdf.back()) + y[j]);
        }
    double ymass = ycdf.back();

    for (int i = 0; i < static_cast<int>(x.size()); ++i) {
        if (x[i] == 0.0) continue;
        long long draws = std::llround(std::max(1.0, budget * x[i] / sx));
        draws = std::min<long long>(draws, 1 << 22);  // hard cap per row
        Rng gen(rng.derive(static_cast<std::uint64_t>(i)));
        std::vector<std::pair<int, long long>> counts;
        for (long long d = 0; d < draws; ++d) {
            double tgt = gen.next_double() * ymass;
            std::size_t lo = std::lower_bound(ycdf.begin(), ycdf.end(), tgt) - ycdf.begin();
            if (lo >= ycols.size()) lo = ycols.size() - 1;
            counts.push_back({ycols[lo], 1});
        }
        std::sort(counts.begin(), counts.end());
        std::size_t w = 0;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            if (w > 0 && counts[w - 1].first == counts[k].first)
                counts[w - 1].second += counts[k].second;
            else
                counts[w++] = counts[k];
        }
        counts.resize(w);

        double target = x[i] * sy;
        double unit = target / static_cast<double>(draws);
        std::size_t base = out.size();
        double sum = 0.0;
        std::size_t largest = base;
        for (const auto& [col, cnt] : counts) {
            double v = unit * static_cast<double>(cnt);
            out.push_back({i, col, v});
            sum += v;
            if (v > out[largest].w) largest = out.size() - 1;
        }
        out[largest].w += target - sum;  // exact row-sum restoration
    }
    return out;
}

SparseMatrix edges_to_matrix(int rows, int cols, const std::vector<Edge3>& edges) {
    std::vector<Triplet> t;
    t.reserve(edges.size());
    for (const auto& e : edges)
        if (e.w != 0.0) t.push_back({e.u, e.v, e.w});
    return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

// Deterministic transportation plan for degree residuals: nonnegative patch
// weights with out-marginals r and in-marginals s, no self-loops. Feasible
// iff r_v + s_v <= W for every vertex (honest sampling always satisfies
// this, since each removed edge credits two distinct vertices). Every
// transfer is capped so that no uninvolved vertex is left with r + s above
// the remaining total, which preserves feasibility step by step; vertices at
// the boundary are forced into the pair. The hub joins whenever it holds
// residual, which keeps the patch star-shaped around it.
std::vector<Edge3> residual_transport(std::vector<double> r, std::vector<double> s, int hub,
                                      bool forbid_diag, double dust_tol,
                                      std::vector<std::pair<int, double>>* stranded = nullptr) {
    int n = static_cast<int>(r.size());
    std::vector<Edge3> plan;
    std::vector<int> active;
    double total = 0.0;
    for (int v = 0; v < n; ++v) {
        if (r[v] > 0.0 || s[v] > 0.0) active.push_back(v);
        total += r[v];
    }
    if (active.empty()) return plan;

    if (!forbid_diag) {
        // Disjoint row/column index sets: any greedy pairing is feasible.
        std::vector<int> sup, dem;
        for (int v : active) {
            if (r[v] > 0.0) sup.push_back(v);
            if (s[v] > 0.0) dem.push_back(v);
        }
        std::size_t si = 0, di = 0;
        while (si < sup.size() && di < dem.size()) {
            int u = sup[si], v = dem[di];
            double t = std::min(r[u], s[v]);
            if (t > 0.0) plan.push_back({u, v, t});
            r[u] -= t;
            s[v] -= t;
            if (r[u] <= 0.0) ++si;
            if (s[v] <= 0.0) ++di;
        }
        return plan;
    }

    int guard = 0;
    const int guard_cap = 16 * n + 1024;
    while (true) {
        // Scan the active residuals.
        double w_rem = 0.0;
        int m = -1;         // argmax r + s
        double m_val = 0.0;
        int u_best = -1, v_best = -1;
        double u_val = 0.0, v_val = 0.0;
        std::size_t out = 0;
        for (std::size_t k = 0; k < active.size(); ++k) {
            int v = active[k];
            if (r[v] <= 0.0 && s[v] <= 0.0) continue;
            active[out++] = v;
            double both = r[v] + s[v];
            w_rem += r[v];
            if (both > m_val) {
                m_val = both;
                m = v;
            }
            if (r[v] > u_val) {
                u_val = r[v];
                u_best = v;
            }
            if (s[v] > v_val) {
                v_val = s[v];
                v_best = v;
            }
        }
        active.resize(out);
        if (w_rem <= dust_tol || u_best < 0 || v_best < 0) break;
        if (++guard > guard_cap) throw NumericDrift("residual transport failed to terminate");

        int u = -1, v = -1;
        if (m >= 0 && m_val >= w_rem - dust_tol) {
            // Boundary vertex: every remaining transfer must involve it.
            if (r[m] >= s[m]) {
                u = m;
                v = -1;
                for (int w : active)
                    if (w != m && s[w] > (v < 0 ? 0.0 : s[v])) v = w;
            } else {
                v = m;
                u = -1;
                for (int w : active)
                    if (w != m && r[w] > (u < 0 ? 0.0 : r[u])) u = w;
            }
        } else {
            // Prefer the hub as a counterparty, then largest-to-largest.
            u = r[hub] > 0.0 ? hub : u_best;
            v = (s[hub] > 0.0 && hub != u) ? hub : v_best;
            if (v == u) {
                v = -1;
                for (int w : active)
                    if (w != u && s[w] > (v < 0 ? 0.0 : s[v])) v = w;
            }
            if (v < 0) {
                v = v_best;
                u = -1;
                for (int w : active)
                    if (w != v && r[w] > (u < 0 ? 0.0 : r[u])) u = w;
            }
        }
        if (u < 0 || v < 0 || u == v) {
            // Residual mass pairable only with itself: hand it back for the
            // caller to splice through an existing edge. Any leftover
            // imbalance beyond rounding dust is a real accounting bug.
            double imbalance = w_rem;
            if (stranded) {
                for (int w : active) {
                    double self_pair = std::min(r[w], s[w]);
                    if (self_pair > 0.0) stranded->push_back({w, self_pair});
                    imbalance -= self_pair;
                }
            }
            if (imbalance > dust_tol) throw NumericDrift("residual transport deadlock");
            break;
        }

        double t = std::min(r[u], s[v]);
        // Cap so no third vertex exceeds the remaining total.
        double third = 0.0;
        for (int w : active)
            if (w != u && w != v) third = std::max(third, r[w] + s[w]);
        t = std::min(t, w_rem - third);
        if (t <= 0.0) continue;  // a boundary vertex forces the next pairing
        plan.push_back({u, v, t});
        r[u] -= t;
        s[v] -= t;
    }
    return plan;
}

// Scales kept edges down where a row (out) or column (in) overshoots its
// mass target, then returns the nonnegative residual vectors.
void scale_overshoot(std::vector<Edge3>& kept, const std::vector<double>& out_target,
                     const std::vector<double>& in_target, std::vector<double>& r,
                     std::vector<double>& s) {
    int n = static_cast<int>(out_target.size());
    std::vector<double> out_sum(n, 0.0), in_sum(in_target.size(), 0.0);
    for (const auto& e : kept) out_sum[e.u] += e.w;
    std::vector<double> row_scale(n, 1.0);
    for (int u = 0; u < n; ++u)
        if (out_sum[u] > out_target[u] && out_sum[u] > 0.0)
            row_scale[u] = out_target[u] / out_sum[u];
    for (auto& e : kept) e.w *= row_scale[e.u];
    for (const auto& e : kept) in_sum[e.v] += e.w;
    std::vector<double> col_scale(in_target.size(), 1.0);
    for (std::size_t v = 0; v < in_target.size(); ++v)
        if (in_sum[v] > in_target[v] && in_sum[v] > 0.0) col_scale[v] = in_target[v] / in_sum[v];
    for (auto& e : kept) e.w *= col_scale[e.v];

    std::fill(out_sum.begin(), out_sum.end(), 0.0);
    std::fill(in_sum.begin(), in_sum.end(), 0.0);
    for (const auto& e : kept) {
        out_sum[e.u] += e.w;
        in_sum[e.v] += e.w;
    }
    r.assign(n, 0.0);
    s.assign(in_target.size(), 0.0);
    for (int u = 0; u < n; ++u) r[u] = std::max(0.0, out_target[u] - out_sum[u]);
    for (std::size_t v = 0; v < in_target.size(); ++v)
        s[v] = std::max(0.0, in_target[v] - in_sum[v]);
}

// Samples one adjacency block and patches its row/column mass back exactly.
// Returns edges in global indices.
std::vector<Edge3> sample_and_patch_block(const std::vector<Edge3>& edges, int n,
                                          std::span<const double> d_out,
                                          std::span<const double> d_in, double delta,
                                          const SparsifierConfig& cfg, RngStream rng,
                                          bool forbid_diag, int hub) {
    double logn = std::log(std::max(n, 2));
    std::vector<double> out_target(n, 0.0), in_target(n, 0.0);
    for (const auto& e : edges) {
        out_target[e.u] += e.w;
        in_target[e.v] += e.w;
    }

    std::vector<Edge3> kept;
    kept.reserve(edges.size());
    // Per-source streams; edges are grouped by source in the caller.
    int cur_u = -1;
    Rng gen(rng);
    for (const auto& e : edges) {
        if (e.u != cur_u) {
            cur_u = e.u;
            gen = Rng(rng.derive(static_cast<std::uint64_t>(e.u)));
        }
        double du = d_out[e.u], dv = d_in[e.v];
        double score = e.w * (1.0 / std::max(du, 1e-300) + 1.0 / std::max(dv, 1e-300));
        double p = std::min(1.0, cfg.oversample * score * logn / (delta * delta));
        if (p >= 1.0) {
            kept.push_back(e);
        } else if (gen.next_double() < p) {
            kept.push_back({e.u, e.v, e.w / p});
        }
    }

    std::vector<double> r, s;
    scale_overshoot(kept, out_target, in_target, r, s);

    // Dust threshold scales with the full matrix degrees: block residuals
    // come from cancellations at that magnitude.
    double mass_scale = 0.0;
    for (double t : d_out) mass_scale = std::max(mass_scale, t);
    double dust = 1e-12 * std::max(mass_scale, 1.0);
    std::vector<std::pair<int, double>> stranded;
    std::vector<Edge3> patch =
        residual_transport(std::move(r), std::move(s), hub, forbid_diag, dust, &stranded);
    kept.insert(kept.end(), patch.begin(), patch.end());

    // Residue pairable only with itself is spliced through an existing edge
    // x -> y avoiding the vertex: x -> u and u -> y carry the detour, which
    // restores u's sums without touching x or y.
    for (auto [u, need] : stranded) {
        std::size_t limit = kept.size();  // splice only through pre-existing edges
        for (std::size_t k = 0; k < limit && need > 0.0; ++k) {
            Edge3& e = kept[k];
            if (e.u == u || e.v == u || e.w <= 0.0) continue;
            double take = std::min(e.w, need);
            e.w -= take;
            int src = e.u, dst = e.v;
            kept.push_back({src, u, take});
            kept.push_back({u, dst, take});
            need -= take;
        }
        if (need > dust) throw NumericDrift("no edge available to splice residual");
    }
    return kept;
}

DirectedLaplacian rebuild_laplacian(int n, std::span<const double> diag,
                                    const std::vector<Edge3>& adjacency) {
    std::vector<Triplet> t;
    t.reserve(adjacency.size() + n);
    for (const auto& e : adjacency)
        if (e.w != 0.0) t.push_back({e.v, e.u, -e.w});  // L_{vu} = -w(u->v)
    for (int i = 0; i < n; ++i)
        if (diag[i] != 0.0) t.push_back({i, i, diag[i]});
    SparseMatrix m = SparseMatrix::from_triplets(n, n, std::move(t));
    Tolerances tol;
    return DirectedLaplacian::from_matrix(std::move(m), tol);
}

std::vector<Edge3> adjacency_edges(const DirectedLaplacian& l) {
    // A(u -> v) = -L_{vu}; iterate columns of L = sources u.
    const SparseMatrix& m = l.matrix();
    std::vector<Edge3> edges;
    edges.reserve(m.nnz());
    for (int u = 0; u < m.cols(); ++u) {
        auto rows = m.col_rows(u);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            int v = rows[k];
            if (v == u) continue;
            double w = -m.col_val(u, static_cast<int>(k));
            if (w != 0.0) edges.push_back({u, v, w});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge3& a, const Edge3& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    return edges;
}

int max_degree_vertex(std::span<const double> diag) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(diag.size()); ++i)
        if (diag[i] > diag[best]) best = i;
    return best;
}

}  // namespace

double sparp_budget(int m, int n, double eps, const SparsifierConfig& cfg) {
    if (m == 0) return 0.0;
    double lp = std::log(std::max(2.0, m * std::pow(std::max(n, 2), cfg.failure_exponent)));
    return cfg.oversample * m / (eps * eps) * lp;
}

double sparsifier_output_budget(int n, double delta, const SparsifierConfig& cfg) {
    return cfg.oversample * n * std::log(std::max(n, 2)) / (delta * delta);
}

SparseMatrix spar_p(std::span<const double> x, std::span<const double> y, double eps,
                    RngStream rng, const SparsifierConfig& cfg) {
    if (x.size() != y.size()) throw InvalidInput("spar_p: vector size mismatch");
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("spar_p: eps must be in (0,1)");
    int n = static_cast<int>(x.size());
    for (double v : x)
        if (v < 0.0 || !std::isfinite(v)) throw InvalidInput("spar_p: negative entry in x");
    for (double v : y)
        if (v < 0.0 || !std::isfinite(v)) throw InvalidInput("spar_p: negative entry in y");

    int nx = vec_nnz(x), ny = vec_nnz(y);
    if (nx == 0 || ny == 0) return SparseMatrix(n, n);

    double budget = sparp_budget(nx + ny, n, eps, cfg);
    if (static_cast<double>(nx) * static_cast<double>(ny) <= budget) {
        // Exact product.
        std::vector<Triplet> t;
        t.reserve(static_cast<std::size_t>(nx) * ny);
        for (int i = 0; i < n; ++i) {
            if (x[i] == 0.0) continue;
            for (int j = 0; j < n; ++j)
                if (y[j] != 0.0) t.push_back({i, j, x[i] * y[j]});
        }
        return SparseMatrix::from_triplets(n, n, std::move(t));
    }

    std::vector<Edge3> entries = sample_outer_product(x, y, budget, rng);
    std::vector<double> col_target(n, 0.0);
    double sx = vec_sum(x);
    for (int j = 0; j < n; ++j) col_target[j] = sx * y[j];
    fix_column_sums(entries, col_target, n);
    return edges_to_matrix(n, n, entries);
}

SparseMatrix sp(std::span<const double> x, std::span<const double> y, double eps,
                const Partition& part, RngStream rng, const SparsifierConfig& cfg) {
    int n = static_cast<int>(x.size());
    if (part.n() != n) throw InvalidInput("sp: partition size mismatch");
    std::vector<bool> in_f(n, false);
    for (int i : part.f()) in_f[i] = true;

    auto mask = [&](std::span<const double> v, bool want_f) {
        std::vector<double> out(n, 0.0);
        for (int i = 0; i < n; ++i)
            if (in_f[i] == want_f) out[i] = v[i];
        return out;
    };
    std::vector<double> xf = mask(x, true), xc = mask(x, false);
    std::vector<double> yf = mask(y, true), yc = mask(y, false);

    SparseMatrix ff = spar_p(xf, yf, eps, rng.derive(1), cfg);
    SparseMatrix fc = spar_p(xf, yc, eps, rng.derive(2), cfg);
    SparseMatrix cf = spar_p(xc, yf, eps, rng.derive(3), cfg);
    SparseMatrix cc = spar_p(xc, yc, eps, rng.derive(4), cfg);
    return SparseMatrix::add(SparseMatrix::add(ff, 1.0, fc, 1.0), 1.0,
                             SparseMatrix::add(cf, 1.0, cc, 1.0), 1.0);
}

std::vector<SampledEdge> sample_adjacency_pre_patch(const DirectedLaplacian& l, double delta,
                                                    const SparsifierConfig& cfg, RngStream rng) {
    std::vector<Edge3> edges = adjacency_edges(l);
    int n = l.order();
    double logn = std::log(std::max(n, 2));
    std::vector<double> d_in(n, 0.0);
    for (const auto& e : edges) d_in[e.v] += e.w;
    std::vector<SampledEdge> kept;
    int cur_u = -1;
    Rng gen(rng);
    for (const auto& e : edges) {
        if (e.u != cur_u) {
            cur_u = e.u;
            gen = Rng(rng.derive(static_cast<std::uint64_t>(e.u)));
        }
        double score = e.w * (1.0 / std::max(l.diag()[e.u], 1e-300) +
                              1.0 / std::max(d_in[e.v], 1e-300));
        double p = std::min(1.0, cfg.oversample * score * logn / (delta * delta));
        if (p >= 1.0)
            kept.push_back({e.u, e.v, e.w});
        else if (gen.next_double() < p)
            kept.push_back({e.u, e.v, e.w / p});
    }
    return kept;
}

DirectedLaplacian spar_e(const DirectedLaplacian& l, double delta, const SparsifierConfig& cfg,
                         RngStream rng) {
    Tolerances tol;
    if (!is_eulerian(l, tol.structural_tol)) throw NotEulerian("spar_e: input not Eulerian");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("spar_e: delta must be in (0,1)");
    if (cfg.backend == SparsifierBackend::passthrough) return l;

    int n = l.order();
    std::vector<Edge3> edges = adjacency_edges(l);
    std::vector<double> d_in(n, 0.0);
    for (const auto& e : edges) d_in[e.v] += e.w;
    int hub = max_degree_vertex(l.diag());
    std::vector<Edge3> adj = sample_and_patch_block(edges, n, l.diag(), d_in, delta, cfg, rng,
                                                    /*forbid_diag=*/true, hub);
    return rebuild_laplacian(n, l.diag(), adj);
}

DirectedLaplacian se(const DirectedLaplacian& l, double eps, const Partition& part,
                     const SparsifierConfig& cfg, RngStream rng) {
    Tolerances tol;
    if (!is_eulerian(l, tol.structural_tol)) throw NotEulerian("se: input not Eulerian");
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("se: eps must be in (0,1)");
    if (cfg.backend == SparsifierBackend::passthrough) return l;

    int n = l.order();
    if (part.n() != n) throw InvalidInput("se: partition size mismatch");
    std::vector<bool> in_f(n, false);
    for (int i : part.f()) in_f[i] = true;

    std::vector<Edge3> edges = adjacency_edges(l);
    std::vector<double> d_in(n, 0.0);
    for (const auto& e : edges) d_in[e.v] += e.w;

    std::vector<Edge3> blocks[4];  // FF, FC, CF, CC
    for (const auto& e : edges) {
        int idx = (in_f[e.u] ? 0 : 2) + (in_f[e.v] ? 0 : 1);
        blocks[idx].push_back(e);
    }
    std::vector<Edge3> adj;
    for (int b = 0; b < 4; ++b) {
        if (blocks[b].empty()) continue;
        // Hub: max-degree vertex among the block's sources.
        int hub = blocks[b].front().u;
        for (const auto& e : blocks[b])
            if (l.diag()[e.u] > l.diag()[hub]) hub = e.u;
        bool forbid = (b == 0 || b == 3);  // same index set on both sides
        std::vector<Edge3> part_adj = sample_and_patch_block(
            blocks[b], n, l.diag(), d_in, eps, cfg, rng.derive(100 + b), forbid, hub);
        adj.insert(adj.end(), part_adj.begin(), part_adj.end());
    }
    return rebuild_laplacian(n, l.diag(), adj);
}

}  // namespace eulsolve
