#include "eulsolve/rcdd.hpp"

#include <cmath>

namespace eulsolve {

std::vector<int> find_rcdd(const DirectedLaplacian& l, double alpha, RngStream rng,
                           int max_rounds) {
    int n = l.order();
    if (n < 2) throw InvalidInput("find_rcdd needs n >= 2");
    if (!(alpha > 0.0)) throw InvalidInput("find_rcdd: alpha must be positive");
    Tolerances tol;
    if (!is_eulerian(l, tol.structural_tol)) throw NotEulerian("find_rcdd: input not Eulerian");

    const SparseMatrix& m = l.matrix();
    double sample_p = 1.0 / (4.0 * (1.0 + alpha));
    double size_bound = n / (16.0 * (1.0 + alpha));

    for (int round = 0; round < max_rounds; ++round) {
        Rng gen(rng.derive(static_cast<std::uint64_t>(round)));
        std::vector<bool> in_f(n, false);
        for (int i = 0; i < n; ++i) in_f[i] = gen.next_double() < sample_p;

        // One discard pass in index order; decisions use the sampled set, so
        // discards do not cascade.
        std::vector<int> f;
        for (int i = 0; i < n; ++i) {
            if (!in_f[i]) continue;
            double row_off = 0.0, col_off = 0.0;
            auto cs = m.row_cols(i);
            auto vs = m.row_vals(i);
            for (std::size_t p = 0; p < cs.size(); ++p)
                if (cs[p] != i && in_f[cs[p]]) row_off += std::abs(vs[p]);
            auto rows = m.col_rows(i);
            for (std::size_t p = 0; p < rows.size(); ++p)
                if (rows[p] != i && in_f[rows[p]]) col_off += std::abs(m.col_val(i, static_cast<int>(p)));
            double limit = l.diag()[i] / (1.0 + alpha);
            if (row_off <= limit && col_off <= limit) f.push_back(i);
        }

        if (static_cast<double>(f.size()) < size_bound || f.empty()) continue;
        // Postconditions are checked, not trusted.
        SparseMatrix lff = m.restrict(f, f);
        auto margin = rcdd_margin(lff);
        if (margin && *margin >= alpha) return f;
    }
    throw RetryExhausted("find_rcdd: retry cap exceeded");
}

}  // namespace eulsolve
