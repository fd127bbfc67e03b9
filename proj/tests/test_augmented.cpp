#include "doctest.h"
#include "eulsolve/augmented.hpp"
#include "eulsolve/rcdd.hpp"
#include "test_helpers.hpp"

using namespace eulsolve;

TEST_CASE("psi tables match the recursion") {
    CHECK(psi(0) == std::vector<int>{0});
    CHECK(psi(1) == std::vector<int>{1, 0});
    // 1-based [1->3, 2->4, 3->2, 4->1] is 0-based [2, 3, 1, 0].
    CHECK(psi(2) == std::vector<int>{2, 3, 1, 0});
}

TEST_CASE("psi is a fixed-point-free bijection for levels >= 1") {
    for (int lvl = 1; lvl <= 6; ++lvl) {
        std::vector<int> table = psi(lvl);
        std::vector<bool> seen(table.size(), false);
        for (std::size_t a = 0; a < table.size(); ++a) {
            CHECK(table[a] != static_cast<int>(a));
            CHECK(!seen[table[a]]);
            seen[table[a]] = true;
        }
    }
}

TEST_CASE("build_augmented at i = k is exactly L^(k)") {
    auto l = testutil::three_cycle();
    Partition p = Partition::from_f({0}, 3);
    for (int k = 0; k <= 2; ++k) {
        AugmentedMatrix m = build_augmented(l, p, k, k);
        PbePair pbe = exact_pbe(l, p, k);
        // Layout [C | F]: compare against the permuted L^(k).
        std::vector<int> order;
        for (int ci : p.c()) order.push_back(ci);
        for (int fi : p.f()) order.push_back(fi);
        DenseMatrix expect = pbe.l.restrict(order, order);
        CHECK(testutil::max_abs_diff(m.mat, expect) < 1e-12);
    }
}

TEST_CASE("the 3-block display of M^(k-1,k) on the 3-cycle") {
    auto l = testutil::three_cycle();
    Partition p = Partition::from_f({0}, 3);
    AugmentedMatrix m = build_augmented(l, p, 0, 1);
    REQUIRE(m.dim() == 4);  // |C| + 2 |F|
    // Layout [C(2) | F_1 | F_2]; blocks: D_FF on the F diagonal,
    // -A_FF against psi(1), -A_FC into C, -A_CF from C, 2 L_CC corner.
    DenseMatrix d = testutil::dense_of(l);
    DenseMatrix a(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = (i == j ? d(i, i) : 0.0) - d(i, j);
    // C corner = 2 L_CC.
    CHECK(m.mat(0, 0) == doctest::Approx(2.0 * d(1, 1)));
    CHECK(m.mat(1, 0) == doctest::Approx(2.0 * d(2, 1)));
    // F_1 diagonal block = D_FF; psi(1) sends block 0 to block 1.
    CHECK(m.mat(2, 2) == doctest::Approx(d(0, 0)));
    CHECK(m.mat(2, 3) == doctest::Approx(-a(0, 0)));
    CHECK(m.mat(3, 3) == doctest::Approx(d(0, 0)));
    CHECK(m.mat(3, 2) == doctest::Approx(-a(0, 0)));
    // -A_FC strips.
    CHECK(m.mat(2, 0) == doctest::Approx(-a(0, 1)));
    CHECK(m.mat(2, 1) == doctest::Approx(-a(0, 2)));
    // Eliminating the F_2 block yields M^(1,1) = L^(1).
    Partition elim = Partition::from_f({3}, 4);
    DenseMatrix sc = exact_schur(m.mat, elim);
    AugmentedMatrix m11 = build_augmented(l, p, 1, 1);
    CHECK(testutil::max_abs_diff(sc, m11.mat) < 1e-12);
}

TEST_CASE("augmented matrices are Eulerian with 3 nonzero blocks per F row/col") {
    DirectedLaplacian l = gen_random_eulerian(10, 40, {31, 0});
    std::vector<int> f{0, 3, 7};
    Partition p = Partition::from_f(f, 10);
    for (int k = 1; k <= 3; ++k)
        for (int i = 0; i < k; ++i) {
            AugmentedMatrix m = build_augmented(l, p, i, k);
            int dim = m.dim();
            // Eulerian: zero row/column sums relative to max diagonal.
            double scale = 0.0;
            for (int r = 0; r < dim; ++r) scale = std::max(scale, m.mat(r, r));
            for (int r = 0; r < dim; ++r) {
                double rs = 0.0, cs = 0.0;
                for (int s = 0; s < dim; ++s) {
                    rs += m.mat(r, s);
                    cs += m.mat(s, r);
                }
                CHECK(std::abs(rs) <= 1e-9 * scale);
                CHECK(std::abs(cs) <= 1e-9 * scale);
            }
            // Exactly 3 nonzero blocks on each F block row and column.
            int nf = m.f_size, nc = m.c_size;
            for (int a = 0; a < m.copies; ++a) {
                auto [lo, hi] = m.f_block(a);
                int row_blocks = 0, col_blocks = 0;
                auto block_nonzero = [&](int r0, int r1, int c0, int c1) {
                    for (int r = r0; r < r1; ++r)
                        for (int s = c0; s < c1; ++s)
                            if (m.mat(r, s) != 0.0) return true;
                    return false;
                };
                if (nc > 0 && block_nonzero(lo, hi, 0, nc)) ++row_blocks;
                if (nc > 0 && block_nonzero(0, nc, lo, hi)) ++col_blocks;
                for (int b = 0; b < m.copies; ++b) {
                    auto [blo, bhi] = m.f_block(b);
                    if (block_nonzero(lo, hi, blo, bhi)) ++row_blocks;
                    if (block_nonzero(blo, bhi, lo, hi)) ++col_blocks;
                }
                CHECK(row_blocks == 3);
                CHECK(col_blocks == 3);
                (void)nf;
            }
        }
}

TEST_CASE("block-Schur chain: eliminating half the F blocks steps i -> i+1") {
    DirectedLaplacian l = gen_random_eulerian(9, 50, {32, 0});
    std::vector<int> f = find_rcdd(l, 0.25, {32, 9});
    Partition p = Partition::from_f(f, 9);
    for (int k = 1; k <= 3; ++k) {
        for (int i = 0; i + 1 <= k; ++i) {
            AugmentedMatrix mi = build_augmented(l, p, i, k);
            AugmentedMatrix mi1 = build_augmented(l, p, i + 1, k);
            // Eliminate the second half of the F blocks.
            std::vector<int> elim;
            for (int a = mi.copies / 2; a < mi.copies; ++a) {
                auto [lo, hi] = mi.f_block(a);
                for (int r = lo; r < hi; ++r) elim.push_back(r);
            }
            Partition ep = Partition::from_f(elim, mi.dim());
            DenseMatrix sc = exact_schur(mi.mat, ep);
            CHECK(testutil::max_abs_diff(sc, mi1.mat) <
                  1e-9 * std::max(1.0, mi1.mat.max_abs()));
        }
        // Full collapse onto the original index count reproduces L^(k).
        AugmentedMatrix m0 = build_augmented(l, p, 0, k);
        std::vector<int> keep_f;  // eliminate all but the first F block and C
        std::vector<int> elim;
        for (int a = 1; a < m0.copies; ++a) {
            auto [lo, hi] = m0.f_block(a);
            for (int r = lo; r < hi; ++r) elim.push_back(r);
        }
        if (!elim.empty()) {
            Partition ep = Partition::from_f(elim, m0.dim());
            DenseMatrix collapsed = exact_schur(m0.mat, ep);
            PbePair pbe = exact_pbe(l, p, k);
            std::vector<int> order;
            for (int ci : p.c()) order.push_back(ci);
            for (int fi : p.f()) order.push_back(fi);
            DenseMatrix expect = pbe.l.restrict(order, order);
            CHECK(testutil::max_abs_diff(collapsed, expect) <
                  1e-9 * std::max(1.0, expect.max_abs()));
        }
        (void)keep_f;
    }
}

TEST_CASE("quadratic form identity: xt^T M^(0,k) xt = 2^k x^T L x") {
    DirectedLaplacian l = gen_random_eulerian(8, 40, {33, 0});
    std::vector<int> f{0, 2, 5};
    Partition p = Partition::from_f(f, 8);
    Rng gen({33, 1});
    for (int k = 0; k <= 4; ++k) {
        AugmentedMatrix m = build_augmented(l, p, 0, k);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> x(8);
            for (double& v : x) v = gen.next_double() * 2.0 - 1.0;
            std::vector<double> xt = lift_vector(x, p, k);
            std::vector<double> mx = m.mat.multiply(xt);
            double quad = 0.0;
            for (std::size_t i = 0; i < xt.size(); ++i) quad += xt[i] * mx[i];
            std::vector<double> lx = l.matrix().multiply(x);
            double ref = 0.0;
            for (int i = 0; i < 8; ++i) ref += x[i] * lx[i];
            double scale = std::ldexp(1.0, k);
            CHECK(std::abs(quad - scale * ref) <=
                  1e-10 * std::max(1.0, std::abs(scale * ref)));
        }
    }
}

TEST_CASE("symmetrization domination: U(L^(k)) / 2^k below (3 + 2/alpha) U(L)") {
    DirectedLaplacian l = gen_random_eulerian(12, 70, {34, 0});
    std::vector<int> f = find_rcdd(l, 0.25, {34, 9});
    Partition p = Partition::from_f(f, 12);
    auto margin = rcdd_margin(l.matrix().restrict(p.f(), p.f()));
    REQUIRE(margin.has_value());
    double alpha = std::min(*margin, 1e6);
    DenseMatrix ul = testutil::undirectify_dense(l);
    for (int k = 1; k <= 4; ++k) {
        PbePair pbe = exact_pbe(l, p, k);
        DenseMatrix ulk = DenseMatrix::add(pbe.l, 0.5 / std::ldexp(1.0, k), pbe.l.transpose(),
                                           0.5 / std::ldexp(1.0, k));
        DenseMatrix gap = DenseMatrix::add(ul.scaled(3.0 + 2.0 / alpha), 1.0, ulk, -1.0);
        CHECK(min_eigenvalue(gap) >= -1e-8 * std::max(1.0, ul.max_abs()));
    }
}

TEST_CASE("M^(i,k) minors are alpha-RCDD whenever L_FF is") {
    DirectedLaplacian l = gen_random_eulerian(12, 60, {35, 0});
    std::vector<int> f = find_rcdd(l, 0.25, {35, 9});
    Partition p = Partition::from_f(f, 12);
    auto margin = rcdd_margin(l.matrix().restrict(p.f(), p.f()));
    REQUIRE(margin.has_value());
    double alpha = *margin;
    REQUIRE(alpha > 0.0);
    for (int k = 1; k <= 3; ++k)
        for (int i = 0; i < k; ++i) {
            AugmentedMatrix m = build_augmented(l, p, i, k);
            SparseMatrix mm = SparseMatrix::from_dense(m.dim(), m.dim(), m.mat.data());
            // Remove the C block (local [0, nc)): the pure F part.
            std::vector<int> keep;
            for (int r = m.c_size; r < m.dim(); ++r) keep.push_back(r);
            auto mf = rcdd_margin(mm.restrict(keep, keep));
            REQUIRE(mf.has_value());
            CHECK(*mf >= alpha - 1e-12);
            // Remove the first n indices ([C | F_1]): still alpha-RCDD.
            std::vector<int> keep2;
            for (int r = m.c_size + m.f_size; r < m.dim(); ++r) keep2.push_back(r);
            if (!keep2.empty()) {
                auto mf2 = rcdd_margin(mm.restrict(keep2, keep2));
                REQUIRE(mf2.has_value());
                CHECK(*mf2 >= alpha - 1e-12);
            }
        }
}

TEST_CASE("repetition matrix shapes and identities") {
    DirectedLaplacian l = gen_random_eulerian(6, 30, {36, 0});
    DenseMatrix a = testutil::dense_of(l);
    Partition p = Partition::from_f({1, 4}, 6);

    SUBCASE("k = 1 is a symmetric permutation of A") {
        DenseMatrix r = repetition(1, p, a);
        std::vector<int> order;
        for (int ci : p.c()) order.push_back(ci);
        for (int fi : p.f()) order.push_back(fi);
        CHECK(testutil::max_abs_diff(r, a.restrict(order, order)) == 0.0);
    }
    SUBCASE("rep(b, C, rep(a, C, A)) = rep(a b, C, A)") {
        DenseMatrix r2 = repetition(2, p, a);
        // The C set of rep(2, C, A) occupies the first |C| indices.
        std::vector<int> f2;
        for (int i = static_cast<int>(p.c().size()); i < r2.rows(); ++i) f2.push_back(i);
        Partition pf2 = Partition::from_f(f2, r2.rows());
        DenseMatrix r23 = repetition(3, pf2, r2);
        DenseMatrix r6 = repetition(6, p, a);
        CHECK(testutil::max_abs_diff(r23, r6) == 0.0);
    }
    SUBCASE("PSD inputs give PSD repetitions") {
        DenseMatrix u = testutil::undirectify_dense(l);
        DenseMatrix r = repetition(3, p, u);
        CHECK(min_eigenvalue(r) >= -1e-10 * std::max(1.0, u.max_abs()));
    }
    SUBCASE("padded version appends zeros and validates the size") {
        DenseMatrix r = repetition(2, p, a);
        DenseMatrix rp = repetition_padded(2, p, a, r.rows() + 3);
        CHECK(rp.rows() == r.rows() + 3);
        for (int i = 0; i < r.rows(); ++i)
            for (int j = 0; j < r.cols(); ++j) CHECK(rp(i, j) == r(i, j));
        for (int i = r.rows(); i < rp.rows(); ++i) CHECK(rp(i, i) == 0.0);
        CHECK_THROWS_AS(repetition_padded(2, p, a, 2), SizeError);
    }
}

TEST_CASE("build_augmented size cap") {
    DirectedLaplacian l = gen_random_eulerian(100, 500, {37, 0});
    std::vector<int> f;
    for (int i = 0; i < 50; ++i) f.push_back(i);
    Partition p = Partition::from_f(f, 100);
    CHECK_THROWS_AS(build_augmented(l, p, 0, 6), TooLarge);
}
