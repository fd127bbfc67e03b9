#include "eulsolve/solver.hpp"

#include <chrono>
#include <cmath>

namespace eulsolve {

namespace {

using Clock = std::chrono::steady_clock;

void axpy(std::vector<double>& y, double a, std::span<const double> x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// x_F <- x_F + eta D^{-1} (b - S_FF x_F), run `steps` times from zero.
std::vector<double> diag_richardson(const SparseMatrix& ff, std::span<const double> inv_diag,
                                    std::span<const double> b, double eta, int steps) {
    std::size_t m = b.size();
    std::vector<double> x(m, 0.0), r(m);
    for (int it = 0; it < steps; ++it) {
        std::vector<double> sx = ff.multiply(x);
        for (std::size_t i = 0; i < m; ++i) x[i] += eta * inv_diag[i] * (b[i] - sx[i]);
    }
    return x;
}

}  // namespace

std::vector<double> pri(const LinearOperator& a, std::span<const double> b,
                        const LinearOperator& z, double eta, int steps) {
    std::vector<double> x(b.size(), 0.0);
    for (int it = 0; it < steps; ++it) {
        std::vector<double> ax = a(x);
        std::vector<double> r(b.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - ax[i];
        std::vector<double> zr = z(r);
        for (double v : zr)
            if (!std::isfinite(v)) throw Diverged("pri: non-finite iterate at step " +
                                                  std::to_string(it + 1));
        axpy(x, eta, zr);
    }
    return x;
}

std::vector<std::vector<double>> pri_trace(const LinearOperator& a, std::span<const double> b,
                                           const LinearOperator& z, double eta, int steps) {
    std::vector<std::vector<double>> trace;
    std::vector<double> x(b.size(), 0.0);
    trace.push_back(x);
    for (int it = 0; it < steps; ++it) {
        std::vector<double> ax = a(x);
        std::vector<double> r(b.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - ax[i];
        std::vector<double> zr = z(r);
        axpy(x, eta, zr);
        trace.push_back(x);
    }
    return trace;
}

Preconditioner::Preconditioner(const SchurChain& chain, int inner_steps)
    : Preconditioner(chain, inner_steps, {}) {}

Preconditioner::Preconditioner(const SchurChain& chain, int inner_steps,
                               std::span<const int> per_level_steps)
    : inner_steps_(inner_steps) {
    if (chain.depth() == 0) throw ChainError("preconditioner: empty chain");
    if (inner_steps < 1) throw InvalidInput("preconditioner: inner steps must be >= 1");
    n_ = chain.n;
    last_pinv_copy_ = chain.last_pinv;
    last_pinv_ = &last_pinv_copy_;
    if (last_pinv_copy_.rows() == 0) throw ChainError("preconditioner: missing dense pseudoinverse");

    for (int i = 0; i + 1 < chain.depth(); ++i) {
        const ChainLevel& lv = chain.levels[i];
        Level out;
        out.ff = lv.stt.matrix().restrict(lv.f_local, lv.f_local);
        out.cf = lv.stt.matrix().restrict(lv.c_local, lv.f_local);
        out.fc = lv.stt.matrix().restrict(lv.f_local, lv.c_local);
        out.inv_diag_ff.reserve(lv.f_local.size());
        for (std::size_t k = 0; k < lv.f_local.size(); ++k) {
            double d = out.ff.at(static_cast<int>(k), static_cast<int>(k));
            if (!(d > 0.0)) throw ChainError("preconditioner: nonpositive diagonal in F block");
            out.inv_diag_ff.push_back(1.0 / d);
        }
        out.f_global.reserve(lv.f_local.size());
        for (int fl : lv.f_local) out.f_global.push_back(lv.global_ids[fl]);
        out.c_global.reserve(lv.c_local.size());
        for (int cl : lv.c_local) out.c_global.push_back(lv.global_ids[cl]);
        out.steps = i < static_cast<int>(per_level_steps.size()) && per_level_steps[i] > 0
                        ? per_level_steps[i]
                        : inner_steps;
        levels_.push_back(std::move(out));
    }
    last_global_ = chain.levels.back().global_ids;
}

std::vector<double> Preconditioner::apply(std::span<const double> x_in) const {
    if (static_cast<int>(x_in.size()) != n_) throw InvalidInput("preconditioner: size mismatch");
    std::vector<double> x(x_in.begin(), x_in.end());

    // Forward elimination sweeps.
    for (const Level& lv : levels_) {
        std::vector<double> xf(lv.f_global.size());
        for (std::size_t k = 0; k < xf.size(); ++k) xf[k] = x[lv.f_global[k]];
        std::vector<double> solved = diag_richardson(lv.ff, lv.inv_diag_ff, xf, 0.5, lv.steps);
        for (std::size_t k = 0; k < solved.size(); ++k) x[lv.f_global[k]] = solved[k];
        std::vector<double> update = lv.cf.multiply(solved);
        for (std::size_t k = 0; k < update.size(); ++k) x[lv.c_global[k]] -= update[k];
    }

    // Pivot level: dense pseudoinverse.
    {
        std::vector<double> xd(last_global_.size());
        for (std::size_t k = 0; k < xd.size(); ++k) xd[k] = x[last_global_[k]];
        std::vector<double> solved = last_pinv_->multiply(xd);
        for (std::size_t k = 0; k < solved.size(); ++k) x[last_global_[k]] = solved[k];
    }

    // Backward substitution sweeps.
    for (auto it = levels_.rbegin(); it != levels_.rend(); ++it) {
        const Level& lv = *it;
        std::vector<double> xc(lv.c_global.size());
        for (std::size_t k = 0; k < xc.size(); ++k) xc[k] = x[lv.c_global[k]];
        std::vector<double> rhs = lv.fc.multiply(xc);
        std::vector<double> corr = diag_richardson(lv.ff, lv.inv_diag_ff, rhs, 0.5, lv.steps);
        for (std::size_t k = 0; k < corr.size(); ++k) x[lv.f_global[k]] -= corr[k];
    }

    // Project onto the complement of the all-ones vector.
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n_;
    for (double& v : x) v -= mean;
    return x;
}

SolveResult solve(const DirectedLaplacian& l, std::span<const double> b, const SchurChain& chain,
                  const SolveConfig& cfg) {
    int n = l.order();
    int inner = cfg.inner_steps > 0
                    ? cfg.inner_steps
                    : static_cast<int>(std::ceil(2.0 * std::log2(std::max(n, 2))));
    Preconditioner prec(chain, inner);
    return solve(l, b, prec, cfg);
}

SolveResult solve(const DirectedLaplacian& l, std::span<const double> b,
                  const Preconditioner& prec, const SolveConfig& cfg) {
    cfg.check();
    Tolerances tol;
    if (!is_eulerian(l, tol.structural_tol)) throw NotEulerian("solve: input not Eulerian");
    if (!is_strongly_connected(l.matrix()))
        throw PreconditionViolated("solve: input not strongly connected");
    int n = l.order();
    if (static_cast<int>(b.size()) != n) throw InvalidInput("solve: rhs size mismatch");
    if (prec.order() != n) throw ChainError("solve: chain size mismatch");

    auto t0 = Clock::now();
    SolveResult out;
    out.x.assign(n, 0.0);
    SolveReport& rep = out.report;

    rep.inner_steps = prec.inner_steps();
    int cap = cfg.max_outer > 0
                  ? cfg.max_outer
                  : 40 * static_cast<int>(std::ceil(std::log2(std::max(2.0, n / cfg.eps))));

    // Project b onto the image space (1-perp) and warn if it moved.
    std::vector<double> rhs(b.begin(), b.end());
    double mean = 0.0, bnorm = 0.0;
    for (double v : rhs) {
        mean += v;
        bnorm += v * v;
    }
    mean /= n;
    bnorm = std::sqrt(bnorm);
    if (std::abs(mean) * n > tol.structural_tol * std::max(bnorm, 1.0)) rep.projected_b = true;
    for (double& v : rhs) v -= mean;

    if (bnorm == 0.0) {
        rep.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        return out;  // x = 0 at iteration 0
    }

    SparseMatrix u = undirectify(l);

    auto u_seminorm = [&](std::span<const double> v) { return u_norm(u, v); };

    double prev_res = -1.0;
    int stagnant = 0;
    for (int it = 0; it < cap; ++it) {
        std::vector<double> lx = l.matrix().multiply(out.x);
        std::vector<double> r(n);
        for (int i = 0; i < n; ++i) r[i] = rhs[i] - lx[i];
        double res_u = u_seminorm(r);
        rep.residual_u_norm.push_back(res_u);

        std::vector<double> zr = prec.apply(r);
        for (double v : zr)
            if (!std::isfinite(v))
                throw Diverged("solve: non-finite iterate at outer step " + std::to_string(it));

        // The preconditioned residual estimates the remaining error.
        double err_est = u_seminorm(zr);
        double xnorm = u_seminorm(out.x);
        rep.estimated_error = xnorm > 0.0 ? err_est / xnorm : err_est;
        if (it > 0 && err_est <= cfg.stop_safety * cfg.eps * std::max(xnorm, 1e-300)) break;
        axpy(out.x, cfg.outer_eta, zr);
        rep.iterations = it + 1;

        // Stagnation: relative residual reduction below 1% over a window.
        if (prev_res >= 0.0 && res_u > (1.0 - cfg.stagnation_improvement) * prev_res) {
            if (++stagnant >= cfg.stagnation_window) {
                rep.stagnated = true;
                break;
            }
        } else {
            stagnant = 0;
        }
        prev_res = res_u;
    }

    rep.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return out;
}

}  // namespace eulsolve
