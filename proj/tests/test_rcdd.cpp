#include "doctest.h"
#include "eulsolve/rcdd.hpp"
#include "test_helpers.hpp"

using namespace eulsolve;

TEST_CASE("find_rcdd on the directed cycle returns a valid independent-ish set") {
    DirectedLaplacian l = gen_cycle(100);
    std::vector<int> f = find_rcdd(l, 0.25, {1, 0});
    CHECK(static_cast<double>(f.size()) >= 100.0 / 20.0);
    SparseMatrix lff = l.matrix().restrict(f, f);
    auto margin = rcdd_margin(lff);
    REQUIRE(margin.has_value());
    CHECK(*margin >= 0.25);
    // On the cycle an alpha >= 0.25 subset must be diagonal-only.
    for (const auto& t : lff.triplets()) CHECK(t.row == t.col);
}

TEST_CASE("find_rcdd on a bidirected pair returns one vertex") {
    std::vector<Edge> edges{{0, 1, 1.0}, {1, 0, 1.0}};
    DirectedLaplacian l = DirectedLaplacian::build(edges, 2);
    std::vector<int> f = find_rcdd(l, 0.1, {2, 0});
    CHECK(f.size() == 1);
}

TEST_CASE("find_rcdd on complete bidirected K5 meets both guarantees over seeds") {
    std::vector<Edge> edges;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            if (i != j) edges.push_back({i, j, 1.0});
    DirectedLaplacian l = DirectedLaplacian::build(edges, 5);
    for (std::uint64_t s = 0; s < 100; ++s) {
        std::vector<int> f = find_rcdd(l, 0.25, {s, 3});
        CHECK(static_cast<double>(f.size()) >= 5.0 / 20.0);
        auto margin = rcdd_margin(l.matrix().restrict(f, f));
        REQUIRE(margin.has_value());
        CHECK(*margin >= 0.25);
    }
}

TEST_CASE("find_rcdd postconditions across families and seeds") {
    // Condensed version of the acceptance sweep: 10 seeds x 3 families.
    for (std::uint64_t s = 0; s < 10; ++s) {
        for (int fam = 0; fam < 3; ++fam) {
            DirectedLaplacian l = fam == 0   ? gen_cycle(64)
                                  : fam == 1 ? gen_debruijn(6)
                                             : gen_random_eulerian(64, 400, {s, 40});
            std::vector<int> f = find_rcdd(l, 0.25, {s, static_cast<uint64_t>(fam)});
            CHECK(static_cast<double>(f.size()) >= l.order() / 20.0);
            auto margin = rcdd_margin(l.matrix().restrict(f, f));
            REQUIRE(margin.has_value());
            CHECK(*margin >= 0.25);
        }
    }
}

TEST_CASE("find_rcdd input validation") {
    CHECK_THROWS_AS(find_rcdd(gen_cycle(5), -1.0, {1, 0}), InvalidInput);
    std::vector<Edge> one{{0, 1, 1.0}, {1, 0, 1.0}};
    CHECK_THROWS_AS(find_rcdd(DirectedLaplacian::build({}, 1), 0.25, {1, 0}), InvalidInput);
    (void)one;
}
