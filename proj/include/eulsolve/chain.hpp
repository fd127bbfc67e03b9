#pragma once

#include <cstdint>
#include <string>

#include "eulsolve/dense.hpp"
#include "eulsolve/schur_sparsify.hpp"

namespace eulsolve {

struct ChainLevel {
    DirectedLaplacian stt;         // boosted level matrix on local indices
    std::vector<int> global_ids;   // local index -> original vertex id
    std::vector<int> f_local;      // F_i in local indices (sorted)
    std::vector<int> c_local;      // complement (sorted)
    double delta_prime = 0.0;      // SparseSchur / SparE error used to build this level
    double declared_delta = 0.0;   // chain guarantee delta / i^2
    double rcdd_margin_f = 0.0;    // measured margin of Stt_FF (inf when diagonal)
    bool strongly_connected = true;
    double build_ms = 0.0;
};

struct ChainConfig {
    double alpha = 0.25;
    double delta = 0.1;
    int stop_size = 100;  // while-loop threshold from the construction
    SparsifierConfig sparsifier;
    Tolerances tol;
};

class SchurChain {
public:
    double alpha = 0.0;
    double beta = 0.0;  // 1 / (16 (1 + alpha))
    double delta = 0.0;
    std::uint64_t seed = 0;
    int n = 0;
    std::vector<ChainLevel> levels;
    DenseMatrix last_pinv;  // pseudoinverse of the final level
    // Diagnostics from the builds.
    double max_eulerian_drift = 0.0;
    std::vector<SchurSparsifyDiagnostics> schur_diags;

    int depth() const { return static_cast<int>(levels.size()); }
    std::int64_t total_nnz() const;
};

SchurChain build_chain(const DirectedLaplacian& l, const ChainConfig& cfg, RngStream rng);

struct ChainReport {
    bool partition_ok = true;
    bool shrinkage_ok = true;       // |C_i| <= (1 - beta)^i n
    bool rcdd_ok = true;            // condition (ii)
    bool approx_ok = true;          // condition (iii), at oracle scale
    bool domination_ok = true;      // condition (iv), at oracle scale
    bool eulerian_ok = true;
    bool connectivity_ok = true;
    bool size_budget_ok = true;     // soft bound: total nnz within the sparsifier output budget
    double total_nnz = 0.0;
    double size_budget = 0.0;
    bool spectral_checked = false;  // whether (iii)/(iv) ran (n <= oracle_cap)
    std::vector<double> measured_delta;   // per level transition
    std::vector<double> declared_delta;
    std::vector<double> rcdd_margins;
    std::vector<int> level_sizes;
    std::vector<std::int64_t> level_nnz;
    double total_wall_ms = 0.0;

    bool all_ok() const {
        return partition_ok && shrinkage_ok && rcdd_ok && approx_ok && domination_ok &&
               eulerian_ok && connectivity_ok;
    }
};

ChainReport validate_chain(const SchurChain& chain, const DirectedLaplacian& l, int oracle_cap,
                           const Tolerances& tol = {}, double size_budget_factor = 64.0);

// chain.json plus one Matrix Market file per level, and the cached dense
// pseudoinverse of the last level.
void save_chain(const SchurChain& chain, const std::string& dir);
SchurChain load_chain(const std::string& dir);

}  // namespace eulsolve
