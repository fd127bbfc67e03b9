#pragma once

#include <functional>

#include "eulsolve/chain.hpp"

namespace eulsolve {

using LinearOperator = std::function<std::vector<double>(std::span<const double>)>;

// Preconditioned Richardson iteration x <- x + eta Z (b - A x), x^(0) = 0.
// Linear in b for fixed (A, Z, eta, N).
std::vector<double> pri(const LinearOperator& a, std::span<const double> b,
                        const LinearOperator& z, double eta, int steps);
// Same, returning every iterate x^(0..N) (diagnostic use).
std::vector<std::vector<double>> pri_trace(const LinearOperator& a, std::span<const double> b,
                                           const LinearOperator& z, double eta, int steps);

// The block-Cholesky preconditioner built from a Schur complement chain:
// forward diagonal-Richardson elimination sweeps, a dense pseudoinverse at
// the last level, backward substitution sweeps, and a final projection onto
// the complement of the all-ones vector. A fixed linear operator for fixed
// (chain, inner_steps).
class Preconditioner {
public:
    Preconditioner(const SchurChain& chain, int inner_steps);
    // Per-level override of the sweep counts (uniform N is the default, kept
    // for simplicity; entries beyond the chain depth are ignored).
    Preconditioner(const SchurChain& chain, int inner_steps,
                   std::span<const int> per_level_steps);

    std::vector<double> apply(std::span<const double> x) const;
    int inner_steps() const { return inner_steps_; }
    int order() const { return n_; }

private:
    struct Level {
        SparseMatrix ff, cf, fc;
        std::vector<double> inv_diag_ff;
        std::vector<int> f_global, c_global;
        int steps = 0;
    };
    std::vector<Level> levels_;
    std::vector<int> last_global_;
    const DenseMatrix* last_pinv_;
    DenseMatrix last_pinv_copy_;
    int n_ = 0;
    int inner_steps_ = 0;
};

struct SolveConfig {
    double eps = 1e-8;
    int inner_steps = 0;      // 0 -> ceil(2 log2 n)
    double inner_eta = 0.5;   // fixed by the construction
    double outer_eta = 1.0;
    int max_outer = 0;        // 0 -> 40 ceil(log2(n / eps))
    int stagnation_window = 20;
    double stagnation_improvement = 0.01;
    // Stop once the estimated U(L)-error (norm of the preconditioned
    // residual) drops below safety * eps * ||x||_U.
    double stop_safety = 0.125;

    void check() const {
        if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("solve eps must be in (0,1)");
        if (inner_steps < 0 || max_outer < 0) throw InvalidInput("negative iteration counts");
    }
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_u_norm;  // ||b - L x^(k)||_{U(L)}
    double estimated_error = 0.0;         // final ||Z r||_U / ||x||_U
    double wall_ms = 0.0;
    bool stagnated = false;
    bool projected_b = false;  // input b was not orthogonal to 1
    int inner_steps = 0;
};

struct SolveResult {
    std::vector<double> x;
    SolveReport report;
};

// Algorithm: outer preconditioned Richardson with Z = PreC(chain, ., N),
// eta = 1, run until the estimated relative U(L)-error reaches eps or the
// iteration cap. b components along the all-ones vector are projected away
// (flagged in the report).
SolveResult solve(const DirectedLaplacian& l, std::span<const double> b, const SchurChain& chain,
                  const SolveConfig& cfg = {});

// Query-time variant sharing a prebuilt preconditioner across many
// right-hand sides; the chain and preconditioner are touched read-only.
SolveResult solve(const DirectedLaplacian& l, std::span<const double> b,
                  const Preconditioner& prec, const SolveConfig& cfg = {});

}  // namespace eulsolve
