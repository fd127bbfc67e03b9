#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "eulsolve/chain.hpp"
#include "eulsolve/generators.hpp"
#include "eulsolve/io.hpp"
#include "eulsolve/solver.hpp"
#include "json.hpp"

namespace es = eulsolve;
using nlohmann::json;

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitStagnated = 3;

es::DirectedLaplacian load_laplacian(const std::string& path) {
    es::SparseMatrix m = es::read_matrix_market(path);
    es::Tolerances tol;
    es::DirectedLaplacian l = es::DirectedLaplacian::from_matrix(std::move(m), tol);
    if (!es::is_eulerian(l, tol.structural_tol))
        throw es::NotEulerian(
            "input Laplacian is not Eulerian; reductions from general strongly "
            "connected systems are out of scope for this solver");
    return l;
}

es::SparsifierBackend parse_backend(const std::string& name) {
    if (name == "passthrough") return es::SparsifierBackend::passthrough;
    if (name == "sample_patch") return es::SparsifierBackend::sample_patch;
    throw es::UsageError("unknown backend: " + name);
}

void emit_report(const json& j, const std::string& path) {
    if (path.empty()) {
        std::cout << j.dump(2) << std::endl;
    } else {
        std::ofstream out(path);
        out << j.dump(2) << '\n';
    }
}

struct BenchRow {
    std::string family;
    int n = 0;
    long long nnz = 0;
    double build_ms = 0.0, solve_ms = 0.0;
    int iterations = 0;
    double measured_eps = 0.0;
    long long chain_nnz = 0;
};

BenchRow bench_instance(const std::string& family, int n, std::uint64_t seed, double alpha,
                        double delta, double eps, const es::SparsifierConfig& scfg,
                        int oracle_cap) {
    BenchRow row;
    row.family = family;
    es::RngStream rng{seed, 0};
    es::DirectedLaplacian l = es::gen_family(family, n, 10 * n, rng.derive(7));
    row.n = l.order();
    row.nnz = l.matrix().nnz();

    es::ChainConfig ccfg;
    ccfg.alpha = alpha;
    ccfg.delta = delta;
    ccfg.sparsifier = scfg;
    auto t0 = std::chrono::steady_clock::now();
    es::SchurChain chain = es::build_chain(l, ccfg, rng.derive(11));
    row.build_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                       .count();
    row.chain_nnz = chain.total_nnz();

    // One pseudo-random query vector orthogonal to 1.
    es::Rng gen(rng.derive(13));
    std::vector<double> b(row.n);
    double mean = 0.0;
    for (double& v : b) {
        v = gen.next_double() - 0.5;
        mean += v;
    }
    for (double& v : b) v -= mean / row.n;

    es::SolveConfig sc;
    sc.eps = eps;
    es::SolveResult res = es::solve(l, b, chain, sc);
    row.solve_ms = res.report.wall_ms;
    row.iterations = res.report.iterations;

    if (row.n <= oracle_cap) {
        es::DenseMatrix dl = es::DenseMatrix::from_sparse(l.matrix());
        std::vector<double> xref = es::laplacian_pinv_apply(dl, b);
        std::vector<double> diff(row.n);
        for (int i = 0; i < row.n; ++i) diff[i] = res.x[i] - xref[i];
        es::SparseMatrix u = es::undirectify(l);
        double denom = es::u_norm(u, xref);
        row.measured_eps = denom > 0.0 ? es::u_norm(u, diff) / denom : 0.0;
    } else {
        row.measured_eps = std::nan("");
    }
    return row;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver for Eulerian directed Laplacian systems via sparsified block elimination"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::uint64_t seed = 1;
    double alpha = 0.25, delta = 0.1, eps = 1e-8;
    std::string backend = "sample_patch";
    int inner_n = 0, oracle_cap = 600;
    app.add_option("--seed", seed, "RNG seed (always recorded in reports)");
    app.add_option("--alpha", alpha, "RCDD target for chain building");
    app.add_option("--delta", delta, "chain error parameter");
    app.add_option("--eps", eps, "solve accuracy");
    app.add_option("--backend", backend, "sparsifier backend: passthrough | sample_patch");
    app.add_option("--inner-n", inner_n, "inner Richardson steps (0 = 2 log2 n)");
    app.add_option("--oracle-cap", oracle_cap, "max n for dense-oracle validation");

    auto* gen_cmd = app.add_subcommand("gen", "generate an Eulerian test graph");
    std::string family = "cycle", out_path = "graph.mtx";
    int gen_n = 100, gen_m = 0;
    gen_cmd->add_option("--family", family, "cycle | debruijn | random_eulerian | torus_flow");
    gen_cmd->add_option("--n", gen_n, "vertex count");
    gen_cmd->add_option("--m", gen_m, "edge budget (random_eulerian)");
    gen_cmd->add_option("--out", out_path, "output Matrix Market path");

    auto* build_cmd = app.add_subcommand("build", "build a Schur complement chain");
    std::string input_path, chain_dir = "chain", report_path;
    build_cmd->add_option("--input", input_path, "input Laplacian (.mtx)")->required();
    build_cmd->add_option("--out-dir", chain_dir, "chain output directory");
    build_cmd->add_option("--report", report_path, "report JSON path (default stdout)");

    auto* solve_cmd = app.add_subcommand("solve", "solve L x = b with a prebuilt chain");
    std::string b_path, x_path = "solution.mtx";
    solve_cmd->add_option("--input", input_path, "input Laplacian (.mtx)")->required();
    solve_cmd->add_option("--chain", chain_dir, "chain directory")->required();
    solve_cmd->add_option("--b", b_path, "right-hand side (Matrix Market or newline floats)")
        ->required();
    solve_cmd->add_option("--out", x_path, "solution output path");
    solve_cmd->add_option("--report", report_path, "report JSON path (default stdout)");

    auto* validate_cmd = app.add_subcommand("validate", "check a chain against its graph");
    validate_cmd->add_option("--input", input_path, "input Laplacian (.mtx)")->required();
    validate_cmd->add_option("--chain", chain_dir, "chain directory")->required();
    validate_cmd->add_option("--report", report_path, "report JSON path (default stdout)");

    auto* bench_cmd = app.add_subcommand("bench", "benchmark suite, CSV output");
    std::string suite = "smoke", csv_path = "bench.csv";
    bench_cmd->add_option("--suite", suite, "suite name (smoke)");
    bench_cmd->add_option("--out", csv_path, "CSV output path");

    CLI11_PARSE(app, argc, argv);

    es::SparsifierConfig scfg;
    scfg.delta = delta;

    try {
        scfg.backend = parse_backend(backend);

        if (gen_cmd->parsed()) {
            es::RngStream rng{seed, 0};
            es::DirectedLaplacian l = es::gen_family(family, gen_n, gen_m, rng);
            es::Tolerances tol;
            if (!es::is_eulerian(l, tol.structural_tol) || !es::is_strongly_connected(l.matrix()))
                throw es::NumericDrift("generator postcondition failed");
            es::write_matrix_market(out_path, l.matrix());
            std::cout << "wrote " << out_path << " (n=" << l.order()
                      << ", nnz=" << l.matrix().nnz() << ")\n";
            return 0;
        }

        if (build_cmd->parsed()) {
            es::DirectedLaplacian l = load_laplacian(input_path);
            es::ChainConfig cfg;
            cfg.alpha = alpha;
            cfg.delta = delta;
            cfg.sparsifier = scfg;
            es::RngStream rng{seed, 0};
            auto t0 = std::chrono::steady_clock::now();
            es::SchurChain chain = es::build_chain(l, cfg, rng);
            double build_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
            es::save_chain(chain, chain_dir);
            json j;
            j["command"] = "build";
            j["seed"] = seed;
            j["alpha"] = alpha;
            j["delta"] = delta;
            j["backend"] = backend;
            j["n"] = chain.n;
            j["levels"] = chain.depth();
            j["chain_nnz"] = chain.total_nnz();
            j["build_ms"] = build_ms;
            j["max_eulerian_drift"] = chain.max_eulerian_drift;
            json sizes = json::array();
            for (const auto& lv : chain.levels) sizes.push_back(lv.global_ids.size());
            j["level_sizes"] = std::move(sizes);
            emit_report(j, report_path);
            return 0;
        }

        if (solve_cmd->parsed()) {
            es::DirectedLaplacian l = load_laplacian(input_path);
            es::SchurChain chain = es::load_chain(chain_dir);
            std::vector<double> b = es::read_vector(b_path);
            es::SolveConfig cfg;
            cfg.eps = eps;
            cfg.inner_steps = inner_n;
            es::SolveResult res = es::solve(l, b, chain, cfg);
            es::write_vector(x_path, res.x);
            json j;
            j["command"] = "solve";
            j["seed"] = seed;
            j["eps"] = eps;
            j["iterations"] = res.report.iterations;
            j["inner_steps"] = res.report.inner_steps;
            j["estimated_error"] = res.report.estimated_error;
            j["stagnated"] = res.report.stagnated;
            j["projected_b"] = res.report.projected_b;
            j["solve_ms"] = res.report.wall_ms;
            j["residual_u_norm"] = res.report.residual_u_norm;
            j["solution"] = x_path;
            emit_report(j, report_path);
            return res.report.stagnated ? kExitStagnated : 0;
        }

        if (validate_cmd->parsed()) {
            es::DirectedLaplacian l = load_laplacian(input_path);
            es::SchurChain chain = es::load_chain(chain_dir);
            es::ChainReport rep = es::validate_chain(chain, l, oracle_cap);
            json j;
            j["command"] = "validate";
            j["partition_ok"] = rep.partition_ok;
            j["shrinkage_ok"] = rep.shrinkage_ok;
            j["rcdd_ok"] = rep.rcdd_ok;
            j["approx_ok"] = rep.approx_ok;
            j["domination_ok"] = rep.domination_ok;
            j["eulerian_ok"] = rep.eulerian_ok;
            j["connectivity_ok"] = rep.connectivity_ok;
            j["spectral_checked"] = rep.spectral_checked;
            j["measured_delta"] = rep.measured_delta;
            j["declared_delta"] = rep.declared_delta;
            j["rcdd_margins"] = rep.rcdd_margins;
            j["level_sizes"] = rep.level_sizes;
            j["level_nnz"] = rep.level_nnz;
            j["total_nnz"] = rep.total_nnz;
            j["size_budget"] = rep.size_budget;
            j["size_budget_ok"] = rep.size_budget_ok;
            j["all_ok"] = rep.all_ok();
            emit_report(j, report_path);
            return rep.all_ok() ? 0 : 1;
        }

        if (bench_cmd->parsed()) {
            if (suite != "smoke") throw es::UsageError("unknown suite: " + suite);
            std::vector<std::string> families{"cycle", "debruijn", "random_eulerian"};
            std::vector<int> sizes{64, 128, 256, 512};
            std::ofstream csv(csv_path);
            csv << "family,n,nnz,build_ms,solve_ms,iterations,measured_eps,chain_nnz\n";
            for (const auto& fam : families)
                for (int n : sizes) {
                    BenchRow row =
                        bench_instance(fam, n, seed + n, alpha, delta, eps, scfg, oracle_cap);
                    csv << row.family << ',' << row.n << ',' << row.nnz << ',' << row.build_ms
                        << ',' << row.solve_ms << ',' << row.iterations << ','
                        << row.measured_eps << ',' << row.chain_nnz << '\n';
                }
            std::cout << "wrote " << csv_path << "\n";
            return 0;
        }
    } catch (const es::NotEulerian& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const es::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const es::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
