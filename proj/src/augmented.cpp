#include "eulsolve/augmented.hpp"

namespace eulsolve {

std::vector<int> psi(int i) {
    if (i < 0) throw InvalidInput("psi: level must be >= 0");
    std::vector<int> table{0};
    for (int level = 1; level <= i; ++level) {
        int half = 1 << (level - 1);
        std::vector<int> next(2 * half);
        for (int a = 0; a < half; ++a) next[a] = a + half;
        for (int a = half; a < 2 * half; ++a) next[a] = table[a - half];
        table = std::move(next);
    }
    return table;
}

AugmentedMatrix build_augmented(const DirectedLaplacian& l, const Partition& part, int i, int k) {
    if (i < 0 || k < i || k > kAugmentedLevelCap)
        throw InvalidInput("build_augmented: need 0 <= i <= k <= cap");
    int nf = static_cast<int>(part.f().size());
    int nc = static_cast<int>(part.c().size());
    int copies = 1 << (k - i);
    long long dim = static_cast<long long>(nc) + static_cast<long long>(copies) * nf;
    if (dim > kAugmentedSizeCap) throw TooLarge("build_augmented: size cap exceeded");

    PbePair pbe = exact_pbe(l, part, i);
    const auto& f = part.f();
    const auto& c = part.c();
    DenseMatrix l_cc = pbe.l.restrict(c, c);
    DenseMatrix a_ff = pbe.a.restrict(f, f);
    DenseMatrix a_fc = pbe.a.restrict(f, c);
    DenseMatrix a_cf = pbe.a.restrict(c, f);

    AugmentedMatrix out;
    out.i = i;
    out.k = k;
    out.f_size = nf;
    out.c_size = nc;
    out.copies = copies;
    out.mat = DenseMatrix(static_cast<int>(dim), static_cast<int>(dim));
    DenseMatrix& m = out.mat;

    for (int r = 0; r < nc; ++r)
        for (int s = 0; s < nc; ++s) m(r, s) = copies * l_cc(r, s);

    std::vector<int> bij = psi(k - i);
    for (int a = 0; a < copies; ++a) {
        int base_a = nc + a * nf;
        int base_psi = nc + bij[a] * nf;
        for (int r = 0; r < nf; ++r) {
            m(base_a + r, base_a + r) += l.diag()[f[r]];
            for (int s = 0; s < nf; ++s) m(base_a + r, base_psi + s) += -a_ff(r, s);
            for (int s = 0; s < nc; ++s) {
                m(base_a + r, s) += -a_fc(r, s);
                m(s, base_a + r) += -a_cf(s, r);
            }
        }
    }
    return out;
}

std::vector<double> lift_vector(std::span<const double> x, const Partition& part, int k) {
    int nf = static_cast<int>(part.f().size());
    int nc = static_cast<int>(part.c().size());
    int copies = 1 << k;
    std::vector<double> out(nc + static_cast<std::size_t>(copies) * nf);
    for (int s = 0; s < nc; ++s) out[s] = x[part.c()[s]];
    for (int a = 0; a < copies; ++a)
        for (int r = 0; r < nf; ++r) out[nc + a * nf + r] = x[part.f()[r]];
    return out;
}

DenseMatrix repetition(int k, const Partition& part, const DenseMatrix& a) {
    if (a.rows() != a.cols() || a.rows() != part.n())
        throw InvalidInput("repetition: partition size mismatch");
    if (k < 1) throw InvalidInput("repetition: k must be >= 1");
    const auto& f = part.f();
    const auto& c = part.c();
    int nf = static_cast<int>(f.size());
    int nc = static_cast<int>(c.size());
    DenseMatrix acc = a.restrict(c, c);
    DenseMatrix acf = a.restrict(c, f);
    DenseMatrix afc = a.restrict(f, c);
    DenseMatrix aff = a.restrict(f, f);

    DenseMatrix m(nc + k * nf, nc + k * nf);
    for (int r = 0; r < nc; ++r)
        for (int s = 0; s < nc; ++s) m(r, s) = k * acc(r, s);
    for (int copy = 0; copy < k; ++copy) {
        int base = nc + copy * nf;
        for (int r = 0; r < nf; ++r) {
            for (int s = 0; s < nf; ++s) m(base + r, base + s) = aff(r, s);
            for (int s = 0; s < nc; ++s) {
                m(base + r, s) = afc(r, s);
                m(s, base + r) = acf(s, r);
            }
        }
    }
    return m;
}

DenseMatrix repetition_padded(int k, const Partition& part, const DenseMatrix& a, int n_total) {
    DenseMatrix rep = repetition(k, part, a);
    if (n_total < rep.rows()) throw SizeError("repetition_padded: target size too small");
    DenseMatrix m(n_total, n_total);
    for (int i = 0; i < rep.rows(); ++i)
        for (int j = 0; j < rep.cols(); ++j) m(i, j) = rep(i, j);
    return m;
}

}  // namespace eulsolve
