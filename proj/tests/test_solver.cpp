#include "doctest.h"
#include "eulsolve/solver.hpp"
#include "test_helpers.hpp"

using namespace eulsolve;

namespace {

ChainConfig chain_cfg() {
    ChainConfig cfg;
    cfg.alpha = 0.25;
    cfg.delta = 0.1;
    return cfg;
}

LinearOperator matrix_op(const DenseMatrix& m) {
    return [m](std::span<const double> x) { return m.multiply(x); };
}

}  // namespace

TEST_CASE("pri: one step with the exact inverse solves the system") {
    DenseMatrix a(2, 2, {2.0, 1.0, 1.0, 3.0});
    DenseMatrix ainv = pinv(a);
    std::vector<double> b{5.0, 10.0};
    std::vector<double> x = pri(matrix_op(a), b, matrix_op(ainv), 1.0, 1);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(3.0));
}

TEST_CASE("pri: scalar geometric series") {
    DenseMatrix eye = DenseMatrix::identity(3);
    std::vector<double> b{1.0, 0.0, 0.0};
    for (int steps : {1, 3, 8}) {
        std::vector<double> x = pri(matrix_op(eye), b, matrix_op(eye), 0.5, steps);
        CHECK(x[0] == doctest::Approx(1.0 - std::ldexp(1.0, -steps)));
        CHECK(x[1] == doctest::Approx(0.0));
    }
}

TEST_CASE("pri is linear in b") {
    Rng gen({80, 0});
    DenseMatrix a(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) a(i, j) = gen.next_double() + (i == j ? 3.0 : 0.0);
    DenseMatrix z(5, 5);
    for (int i = 0; i < 5; ++i) z(i, i) = 1.0 / a(i, i);
    std::vector<double> b1(5), b2(5), sum(5);
    for (int i = 0; i < 5; ++i) {
        b1[i] = gen.next_double();
        b2[i] = gen.next_double();
        sum[i] = b1[i] + b2[i];
    }
    auto x1 = pri(matrix_op(a), b1, matrix_op(z), 0.7, 9);
    auto x2 = pri(matrix_op(a), b2, matrix_op(z), 0.7, 9);
    auto xs = pri(matrix_op(a), sum, matrix_op(z), 0.7, 9);
    for (int i = 0; i < 5; ++i) CHECK(xs[i] == doctest::Approx(x1[i] + x2[i]).epsilon(1e-12));
}

TEST_CASE("prec_apply: d = 1 chain is the projected dense pseudoinverse") {
    DirectedLaplacian l = gen_random_eulerian(40, 200, {81, 0});
    SchurChain chain = build_chain(l, chain_cfg(), {81, 1});
    REQUIRE(chain.depth() == 1);
    Preconditioner prec(chain, 4);
    Rng gen({81, 2});
    std::vector<double> x(40);
    for (double& v : x) v = gen.next_double() - 0.3;
    std::vector<double> z = prec.apply(x);
    // Reference: project(pinv(Stt^(1)) x).
    std::vector<double> ref = chain.last_pinv.multiply(x);
    double mean = 0.0;
    for (double v : ref) mean += v;
    mean /= 40.0;
    for (double& v : ref) v -= mean;
    for (int i = 0; i < 40; ++i) CHECK(z[i] == doctest::Approx(ref[i]).epsilon(1e-10));
}

TEST_CASE("prec_apply: linearity, zero mean, and bit-identical repeats") {
    DirectedLaplacian l = gen_random_eulerian(200, 1200, {82, 0});
    ChainConfig cfg = chain_cfg();
    cfg.stop_size = 60;
    SchurChain chain = build_chain(l, cfg, {82, 1});
    REQUIRE(chain.depth() >= 2);
    Preconditioner prec(chain, 8);
    Rng gen({82, 2});
    std::vector<double> x1(200), x2(200), sum(200);
    for (int i = 0; i < 200; ++i) {
        x1[i] = gen.next_double() - 0.5;
        x2[i] = gen.next_double() - 0.5;
        sum[i] = x1[i] + x2[i];
    }
    auto z1 = prec.apply(x1);
    auto z2 = prec.apply(x2);
    auto zs = prec.apply(sum);
    double scale = 0.0;
    for (int i = 0; i < 200; ++i) scale = std::max(scale, std::abs(zs[i]));
    for (int i = 0; i < 200; ++i)
        CHECK(std::abs(zs[i] - z1[i] - z2[i]) <= 1e-12 * std::max(scale, 1.0));
    double mean = 0.0;
    for (double v : z1) mean += v;
    CHECK(std::abs(mean) <= 1e-12 * 200.0 * std::max(scale, 1.0));
    // Determinism: identical input, bit-identical output.
    auto z1b = prec.apply(x1);
    for (int i = 0; i < 200; ++i) CHECK(z1[i] == z1b[i]);
}

TEST_CASE("prec_apply at large inner N approaches the assembled pinv(Lhat)") {
    DirectedLaplacian l = gen_random_eulerian(60, 320, {83, 0});
    ChainConfig cfg = chain_cfg();
    cfg.stop_size = 20;
    cfg.sparsifier.backend = SparsifierBackend::passthrough;
    SchurChain chain = build_chain(l, cfg, {83, 1});
    REQUIRE(chain.depth() >= 2);

    // Assemble Lhat = Stt^(1) + sum_i put(Stt^(i+1) - sc(Stt^(i), F_i)).
    int n = 60;
    DenseMatrix lhat = DenseMatrix::from_sparse(chain.levels[0].stt.matrix());
    for (int i = 0; i + 1 < chain.depth(); ++i) {
        const ChainLevel& lv = chain.levels[i];
        Partition part = Partition::from_f(lv.f_local, static_cast<int>(lv.global_ids.size()));
        DenseMatrix sc = exact_schur(DenseMatrix::from_sparse(lv.stt.matrix()), part);
        DenseMatrix next = DenseMatrix::from_sparse(chain.levels[i + 1].stt.matrix());
        const auto& ids = chain.levels[i + 1].global_ids;
        for (std::size_t r = 0; r < ids.size(); ++r)
            for (std::size_t s = 0; s < ids.size(); ++s)
                lhat(ids[r], ids[s]) +=
                    next(static_cast<int>(r), static_cast<int>(s)) -
                    sc(static_cast<int>(r), static_cast<int>(s));
    }
    DenseMatrix lhat_pinv = pinv(lhat);

    Preconditioner prec(chain, 200);
    Rng gen({83, 2});
    std::vector<double> x = testutil::perp_vector(n, gen);
    std::vector<double> z = prec.apply(x);
    std::vector<double> ref = lhat_pinv.multiply(x);
    double mean = 0.0;
    for (double v : ref) mean += v;
    mean /= n;
    for (double& v : ref) v -= mean;
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
        err += (z[i] - ref[i]) * (z[i] - ref[i]);
        scale += ref[i] * ref[i];
    }
    CHECK(std::sqrt(err) <= 1e-6 * std::max(1.0, std::sqrt(scale)));
}

TEST_CASE("inner iteration matrix obeys the Gershgorin radius bound") {
    DirectedLaplacian l = gen_random_eulerian(120, 700, {84, 0});
    ChainConfig cfg = chain_cfg();
    cfg.stop_size = 40;
    SchurChain chain = build_chain(l, cfg, {84, 1});
    for (int i = 0; i + 1 < chain.depth(); ++i) {
        const ChainLevel& lv = chain.levels[i];
        SparseMatrix ff = lv.stt.matrix().restrict(lv.f_local, lv.f_local);
        auto margin = rcdd_margin(ff);
        REQUIRE(margin.has_value());
        double alpha = std::min(*margin, 1e9);
        double bound = (2.0 + alpha) / (2.0 * (1.0 + alpha));
        int m = ff.rows();
        // M = I - (1/2) D^{-1} S_FF; every Gershgorin disc lies in |z| <= bound.
        DenseMatrix md(m, m);
        for (int r = 0; r < m; ++r) {
            double d = ff.at(r, r);
            auto cols = ff.row_cols(r);
            auto vals = ff.row_vals(r);
            for (std::size_t p = 0; p < cols.size(); ++p)
                md(r, cols[p]) = (r == cols[p] ? 1.0 : 0.0) - 0.5 * vals[p] / d;
        }
        for (int r = 0; r < m; ++r) {
            double center = md(r, r), radius = 0.0;
            for (int s = 0; s < m; ++s)
                if (s != r) radius += std::abs(md(r, s));
            CHECK(std::abs(center) + radius <= bound + 1e-12);
        }
        // Powered-norm estimate of the spectral radius stays below the bound.
        DenseMatrix p2 = md.multiply(md);
        DenseMatrix p4 = p2.multiply(p2);
        DenseMatrix p8 = p4.multiply(p4);
        DenseMatrix p16 = p8.multiply(p8);
        DenseMatrix p32 = p16.multiply(p16);
        double rho_est = std::pow(spectral_norm(p32), 1.0 / 32.0);
        CHECK(rho_est <= bound + 0.02);
    }
}

TEST_CASE("per-level inner step override changes the operator as expected") {
    DirectedLaplacian l = gen_random_eulerian(150, 900, {93, 0});
    ChainConfig cfg = chain_cfg();
    cfg.stop_size = 50;
    SchurChain chain = build_chain(l, cfg, {93, 1});
    REQUIRE(chain.depth() >= 2);
    Preconditioner uniform(chain, 6);
    std::vector<int> override_steps(chain.depth(), 6);
    Preconditioner same(chain, 6, override_steps);
    override_steps[0] = 12;
    Preconditioner deeper(chain, 6, override_steps);
    Rng gen({93, 2});
    std::vector<double> x = testutil::perp_vector(150, gen);
    auto a = uniform.apply(x);
    auto b = same.apply(x);
    auto c = deeper.apply(x);
    double diff_same = 0.0, diff_deeper = 0.0;
    for (int i = 0; i < 150; ++i) {
        diff_same = std::max(diff_same, std::abs(a[i] - b[i]));
        diff_deeper = std::max(diff_deeper, std::abs(a[i] - c[i]));
    }
    CHECK(diff_same == 0.0);
    CHECK(diff_deeper > 0.0);
}

TEST_CASE("solve: 3-cycle telescoping solution") {
    auto l = testutil::three_cycle();
    SchurChain chain = build_chain(l, chain_cfg(), {85, 0});
    std::vector<double> b{1.0, 0.0, -1.0};
    SolveResult res = solve(l, b, chain);
    CHECK(res.x[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
    CHECK(res.x[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
    CHECK(res.x[2] == doctest::Approx(-2.0 / 3.0).epsilon(1e-8));
    CHECK(!res.report.stagnated);
}

TEST_CASE("solve: b = 0 returns zero at iteration 0") {
    auto l = testutil::three_cycle();
    SchurChain chain = build_chain(l, chain_cfg(), {86, 0});
    std::vector<double> b(3, 0.0);
    SolveResult res = solve(l, b, chain);
    CHECK(res.report.iterations == 0);
    for (double v : res.x) CHECK(v == 0.0);
}

TEST_CASE("solve hits the oracle error contract on random instances") {
    for (std::uint64_t s = 0; s < 3; ++s) {
        DirectedLaplacian l = gen_random_eulerian(150, 900, {s, 87});
        ChainConfig cfg = chain_cfg();
        cfg.stop_size = 50;
        SchurChain chain = build_chain(l, cfg, {s, 88});
        Rng gen({s, 89});
        std::vector<double> b = testutil::perp_vector(150, gen);
        SolveConfig sc;
        sc.eps = 1e-8;
        SolveResult res = solve(l, b, chain, sc);
        // Oracle comparison in the U(L) seminorm.
        DenseMatrix dl = testutil::dense_of(l);
        std::vector<double> xref = laplacian_pinv_apply(dl, b);
        SparseMatrix u = undirectify(l);
        std::vector<double> diff(150);
        for (int i = 0; i < 150; ++i) diff[i] = res.x[i] - xref[i];
        double rel = u_norm(u, diff) / u_norm(u, xref);
        CHECK(rel <= 1e-8);
        // Solution is orthogonal to ones.
        double mean = 0.0;
        for (double v : res.x) mean += v;
        CHECK(std::abs(mean) <= 1e-9 * 150);
    }
}

TEST_CASE("solve projects non-orthogonal right-hand sides and warns") {
    auto l = testutil::three_cycle();
    SchurChain chain = build_chain(l, chain_cfg(), {90, 0});
    std::vector<double> b{2.0, 1.0, 0.0};  // mean 1
    SolveResult res = solve(l, b, chain);
    CHECK(res.report.projected_b);
    // Same solution as the projected rhs.
    std::vector<double> bp{1.0, 0.0, -1.0};
    SolveResult res2 = solve(l, bp, chain);
    for (int i = 0; i < 3; ++i) CHECK(res.x[i] == doctest::Approx(res2.x[i]).epsilon(1e-9));
}

TEST_CASE("outer contraction factor stays below 0.9 in the U(L) seminorm") {
    DirectedLaplacian l = gen_random_eulerian(160, 900, {91, 0});
    ChainConfig cfg = chain_cfg();
    cfg.stop_size = 50;
    SchurChain chain = build_chain(l, cfg, {91, 1});
    int inner = static_cast<int>(std::ceil(2.0 * std::log2(160.0)));
    Preconditioner prec(chain, inner);
    Rng gen({91, 2});
    std::vector<double> b = testutil::perp_vector(160, gen);
    DenseMatrix dl = testutil::dense_of(l);
    std::vector<double> xstar = laplacian_pinv_apply(dl, b);
    SparseMatrix u = undirectify(l);

    LinearOperator a_op = [&](std::span<const double> v) { return l.matrix().multiply(v); };
    LinearOperator z_op = [&](std::span<const double> v) { return prec.apply(v); };
    auto trace = pri_trace(a_op, b, z_op, 1.0, 30);
    double err_floor = 1e-11 * u_norm(u, xstar);
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
        std::vector<double> e0(160), e1(160);
        for (int i = 0; i < 160; ++i) {
            e0[i] = trace[k][i] - xstar[i];
            e1[i] = trace[k + 1][i] - xstar[i];
        }
        double n0 = u_norm(u, e0), n1 = u_norm(u, e1);
        if (n0 <= err_floor || n1 <= err_floor) break;  // converged to roundoff
        CHECK(n1 <= 0.9 * n0);
    }
}

TEST_CASE("solve reports stagnation when the iteration stops improving") {
    DirectedLaplacian l = gen_random_eulerian(60, 300, {94, 0});
    SchurChain chain = build_chain(l, chain_cfg(), {94, 1});
    Rng gen({94, 2});
    std::vector<double> b = testutil::perp_vector(60, gen);
    SolveConfig cfg;
    cfg.outer_eta = 0.0;  // updates vanish; the residual cannot move
    SolveResult res = solve(l, b, chain, cfg);
    CHECK(res.report.stagnated);
    CHECK(res.report.iterations >= cfg.stagnation_window);
}

TEST_CASE("query reuse: one chain serves many right-hand sides") {
    DirectedLaplacian l = gen_random_eulerian(120, 700, {92, 0});
    ChainConfig cfg = chain_cfg();
    cfg.stop_size = 40;
    SchurChain chain = build_chain(l, cfg, {92, 1});
    DenseMatrix dl = testutil::dense_of(l);
    SparseMatrix u = undirectify(l);
    for (int q = 0; q < 4; ++q) {
        Rng gen({92, static_cast<uint64_t>(100 + q)});
        std::vector<double> b = testutil::perp_vector(120, gen);
        SolveResult res = solve(l, b, chain);
        std::vector<double> xref = laplacian_pinv_apply(dl, b);
        std::vector<double> diff(120);
        for (int i = 0; i < 120; ++i) diff[i] = res.x[i] - xref[i];
        CHECK(u_norm(u, diff) <= 1e-8 * u_norm(u, xref));
    }
}
