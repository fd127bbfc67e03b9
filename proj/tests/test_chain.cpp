#include <cstdio>
#include <filesystem>
#include <unistd.h>

#include "doctest.h"
#include "eulsolve/chain.hpp"
#include "test_helpers.hpp"

using namespace eulsolve;

namespace {

ChainConfig default_cfg() {
    ChainConfig cfg;
    cfg.alpha = 0.25;
    cfg.delta = 0.1;
    return cfg;
}

}  // namespace

TEST_CASE("small inputs build a single-level chain") {
    DirectedLaplacian l = gen_random_eulerian(60, 300, {70, 0});
    SchurChain chain = build_chain(l, default_cfg(), {70, 1});
    CHECK(chain.depth() == 1);
    CHECK(chain.levels[0].f_local.size() == 60);
    CHECK(chain.last_pinv.rows() == 60);
    ChainReport rep = validate_chain(chain, l, 600);
    CHECK(rep.all_ok());
    CHECK(rep.spectral_checked);
    // d = 1: conditions (ii) and (iii) for transitions are vacuous; level 1
    // against L itself must hold.
    REQUIRE(!rep.measured_delta.empty());
    CHECK(rep.measured_delta[0] <= rep.declared_delta[0]);
}

TEST_CASE("cycle chain obeys the geometric shrinkage bound") {
    DirectedLaplacian l = gen_cycle(1000);
    ChainConfig cfg = default_cfg();
    SchurChain chain = build_chain(l, cfg, {71, 0});
    CHECK(chain.depth() >= 2);
    double beta = 1.0 / (16.0 * 1.25);
    for (int i = 0; i < chain.depth(); ++i) {
        double bound = std::pow(1.0 - beta, i) * 1000.0;
        CHECK(static_cast<double>(chain.levels[i].global_ids.size()) <= bound + 1e-9);
    }
    CHECK(static_cast<int>(chain.levels.back().global_ids.size()) <= 100);
    ChainReport rep = validate_chain(chain, l, 0);  // structural checks only
    CHECK(rep.partition_ok);
    CHECK(rep.shrinkage_ok);
    CHECK(rep.rcdd_ok);
    CHECK(rep.eulerian_ok);
    CHECK(rep.connectivity_ok);
    CHECK(!rep.spectral_checked);
    CHECK(rep.size_budget_ok);
    CHECK(rep.total_nnz == static_cast<double>(chain.total_nnz()));
}

TEST_CASE("exact backends track the exact Schur complements level by level") {
    DirectedLaplacian l = gen_random_eulerian(160, 900, {72, 0});
    ChainConfig cfg = default_cfg();
    cfg.stop_size = 40;
    cfg.sparsifier.backend = SparsifierBackend::passthrough;
    SchurChain chain = build_chain(l, cfg, {72, 1});
    REQUIRE(chain.depth() >= 2);
    ChainReport rep = validate_chain(chain, l, 600);
    CHECK(rep.all_ok());
    REQUIRE(rep.spectral_checked);
    // Measured deltas stay below the declared delta / i^2 budget; with exact
    // backends the only contribution is the symmetrization boost.
    for (std::size_t i = 0; i < rep.measured_delta.size(); ++i) {
        CHECK(rep.measured_delta[i] <= rep.declared_delta[i]);
        // The boost dominates: measured delta is essentially its magnitude.
        double boost = chain.levels[i].delta_prime / (1.0 - chain.levels[i].delta_prime);
        CHECK(rep.measured_delta[i] <= 2.0 * boost + 1e-6);
    }
}

TEST_CASE("validate_chain flags a corrupted level") {
    DirectedLaplacian l = gen_random_eulerian(120, 700, {73, 0});
    ChainConfig cfg = default_cfg();
    cfg.stop_size = 60;
    SchurChain chain = build_chain(l, cfg, {73, 1});
    REQUIRE(chain.depth() >= 2);
    // Replace level 2 with a directed but non-Eulerian Laplacian (a path):
    // the kernel of the difference breaks, so the measure pegs at 1.
    int m = static_cast<int>(chain.levels[1].global_ids.size());
    std::vector<Edge> path;
    for (int i = 0; i + 1 < m; ++i) path.push_back({i, i + 1, 1.0});
    chain.levels[1].stt = DirectedLaplacian::build(path, m);
    ChainReport rep = validate_chain(chain, l, 600);
    CHECK(!rep.approx_ok);
    CHECK(rep.measured_delta.size() >= 2);
    CHECK(rep.measured_delta[1] == doctest::Approx(1.0));  // kernel violation sentinel
}

TEST_CASE("chain save/load round trip preserves the solve operator") {
    namespace fs = std::filesystem;
    DirectedLaplacian l = gen_random_eulerian(150, 800, {74, 0});
    ChainConfig cfg = default_cfg();
    cfg.stop_size = 50;
    SchurChain chain = build_chain(l, cfg, {74, 1});
    fs::path dir = fs::temp_directory_path() / ("eulsolve_chain_" + std::to_string(::getpid()));
    save_chain(chain, dir.string());
    SchurChain back = load_chain(dir.string());
    CHECK(back.depth() == chain.depth());
    CHECK(back.n == chain.n);
    CHECK(back.alpha == chain.alpha);
    for (int i = 0; i < chain.depth(); ++i) {
        CHECK(back.levels[i].global_ids == chain.levels[i].global_ids);
        CHECK(back.levels[i].f_local == chain.levels[i].f_local);
        CHECK(testutil::max_abs_diff(back.levels[i].stt.matrix(),
                                     chain.levels[i].stt.matrix()) == 0.0);
    }
    CHECK(testutil::max_abs_diff(back.last_pinv, chain.last_pinv) == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("smallest instances and other families go end to end") {
    // n = 2 bidirected pair.
    std::vector<Edge> pair{{0, 1, 1.5}, {1, 0, 1.5}};
    DirectedLaplacian l2 = DirectedLaplacian::build(pair, 2);
    SchurChain c2 = build_chain(l2, default_cfg(), {76, 0});
    CHECK(c2.depth() == 1);
    CHECK(validate_chain(c2, l2, 100).all_ok());

    // Torus flow through build + validate.
    DirectedLaplacian torus = gen_torus_flow(144, {76, 1});
    ChainConfig cfg = default_cfg();
    cfg.stop_size = 40;
    SchurChain ct = build_chain(torus, cfg, {76, 2});
    ChainReport rep = validate_chain(ct, torus, 600);
    CHECK(rep.all_ok());
}

TEST_CASE("build_chain rejects bad inputs") {
    // Disconnected.
    std::vector<Edge> edges{{0, 1, 1.0}, {1, 0, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}};
    DirectedLaplacian l = DirectedLaplacian::build(edges, 4);
    CHECK_THROWS_AS(build_chain(l, default_cfg(), {75, 0}), ChainBuildError);
    // Non-Eulerian.
    std::vector<Edge> bad{{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}, {0, 2, 1.0}};
    DirectedLaplacian nb = DirectedLaplacian::build(bad, 3);
    CHECK_THROWS_AS(build_chain(nb, default_cfg(), {75, 1}), NotEulerian);
}
