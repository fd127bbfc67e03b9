#include "doctest.h"
#include "eulsolve/sparse.hpp"
#include "test_helpers.hpp"

using namespace eulsolve;

TEST_CASE("triplet construction merges duplicates and sorts") {
    SparseMatrix m = SparseMatrix::from_triplets(
        2, 3, {{1, 2, 1.5}, {0, 0, 1.0}, {1, 2, 0.5}, {0, 2, -2.0}});
    CHECK(m.nnz() == 3);
    CHECK(m.at(1, 2) == doctest::Approx(2.0));
    CHECK(m.at(0, 0) == doctest::Approx(1.0));
    CHECK(m.at(0, 2) == doctest::Approx(-2.0));
    CHECK(m.at(0, 1) == 0.0);
    m.check_mirror();
}

TEST_CASE("out-of-range triplet throws") {
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), IndexError);
}

TEST_CASE("CSR/CSC views agree on random matrices") {
    Rng gen({42, 0});
    for (int trial = 0; trial < 20; ++trial) {
        int rows = 1 + static_cast<int>(gen.next_below(30));
        int cols = 1 + static_cast<int>(gen.next_below(30));
        std::vector<Triplet> t;
        int count = static_cast<int>(gen.next_below(80));
        for (int k = 0; k < count; ++k)
            t.push_back({static_cast<int>(gen.next_below(rows)),
                         static_cast<int>(gen.next_below(cols)), gen.next_double() - 0.5});
        SparseMatrix m = SparseMatrix::from_triplets(rows, cols, std::move(t));
        m.check_mirror();
        // Transpose twice is identity.
        CHECK(testutil::max_abs_diff(m, m.transpose().transpose()) == 0.0);
    }
}

TEST_CASE("restrict reads the expected submatrix") {
    // restrict(3-cycle L, {1,2}, {1,2}) -> [[1,0],[-1,1]]
    auto l = testutil::three_cycle();
    std::vector<int> idx{1, 2};
    SparseMatrix sub = l.matrix().restrict(idx, idx);
    CHECK(sub.at(0, 0) == doctest::Approx(1.0));
    CHECK(sub.at(0, 1) == doctest::Approx(0.0));
    CHECK(sub.at(1, 0) == doctest::Approx(-1.0));
    CHECK(sub.at(1, 1) == doctest::Approx(1.0));

    CHECK_THROWS_AS(l.matrix().restrict(std::vector<int>{5}, idx), IndexError);
}

TEST_CASE("spmv on Eulerian Laplacian annihilates ones") {
    auto l = testutil::three_cycle();
    std::vector<double> ones(3, 1.0);
    for (double v : l.matrix().multiply(ones)) CHECK(v == doctest::Approx(0.0));
    for (double v : l.matrix().multiply_transpose(ones)) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("add computes the symmetrization of the 3-cycle") {
    auto l = testutil::three_cycle();
    SparseMatrix s = SparseMatrix::add(l.matrix(), 0.5, l.matrix().transpose(), 0.5);
    CHECK(s.at(0, 1) == doctest::Approx(-0.5));
    CHECK(s.at(1, 0) == doctest::Approx(-0.5));
    CHECK(s.at(0, 0) == doctest::Approx(1.0));
    CHECK(testutil::max_abs_diff(s, s.transpose()) == 0.0);
}

TEST_CASE("compact purges explicit zeros") {
    SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}});
    SparseMatrix b = SparseMatrix::from_triplets(2, 2, {{0, 1, -1.0}});
    SparseMatrix sum = SparseMatrix::add(a, 1.0, b, 1.0);
    CHECK(sum.nnz() == 2);  // explicit zero retained transiently
    CHECK(sum.compact().nnz() == 1);
}

TEST_CASE("partition invariants") {
    Partition p = Partition::from_f({3, 1}, 5);
    CHECK(p.f() == std::vector<int>{1, 3});
    CHECK(p.c() == std::vector<int>{0, 2, 4});
    CHECK_THROWS_AS(Partition::from_f({1, 1}, 3), InvalidInput);
    CHECK_THROWS_AS(Partition::from_f({7}, 3), IndexError);
}
