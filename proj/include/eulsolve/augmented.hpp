#pragma once

#include "eulsolve/dense.hpp"

namespace eulsolve {

// Level-i block bijection table on {0, ..., 2^i - 1}:
//   psi(0) = [0], psi(i)(a) = a + 2^{i-1} for a < 2^{i-1},
//   psi(i)(a) = psi(i-1)(a - 2^{i-1}) otherwise.
// Fixed-point free for i >= 1.
std::vector<int> psi(int i);

// Augmented matrix of level (i, k) over the layout [C | F_1 | ... | F_{2^{k-i}}]:
// the C corner holds 2^{k-i} L^(i)_CC, each F_a block row carries D_FF on the
// diagonal block, -A^(i)_FF at block column psi^{k-i}(a), and -A^(i)_FC; the
// C block row carries -A^(i)_CF against every F_a.
struct AugmentedMatrix {
    int i = 0, k = 0;
    int f_size = 0, c_size = 0, copies = 1;  // copies = 2^{k-i}
    DenseMatrix mat;

    int dim() const { return c_size + copies * f_size; }
    // Index range of F-block a (0-based), in the augmented layout.
    std::pair<int, int> f_block(int a) const {
        return {c_size + a * f_size, c_size + (a + 1) * f_size};
    }
};

inline constexpr int kAugmentedSizeCap = 512;
inline constexpr int kAugmentedLevelCap = 6;

AugmentedMatrix build_augmented(const DirectedLaplacian& l, const Partition& part, int i, int k);

// Lifted vector (x_C, x_F, ..., x_F) with 2^k repetitions of x_F, matching
// the build_augmented layout for level (0, k).
std::vector<double> lift_vector(std::span<const double> x, const Partition& part, int k);

// k-repetition matrix of A over the layout [C | F x k]: k A_CC corner,
// k repeated A_CF / A_FC strips and A_FF diagonal blocks.
DenseMatrix repetition(int k, const Partition& part, const DenseMatrix& a);
DenseMatrix repetition_padded(int k, const Partition& part, const DenseMatrix& a, int n_total);

}  // namespace eulsolve
