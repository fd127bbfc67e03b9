#include "eulsolve/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eulsolve {

namespace {

double log_uniform(Rng& gen, double lo, double hi) {
    double u = gen.next_double();
    return lo * std::exp(u * std::log(hi / lo));
}

}  // namespace

DirectedLaplacian gen_cycle(int n, double weight) {
    if (n < 2) throw UsageError("cycle needs n >= 2");
    std::vector<Edge> edges;
    edges.reserve(n);
    for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, weight});
    return DirectedLaplacian::build(edges, n);
}

DirectedLaplacian gen_debruijn(int k) {
    if (k < 1 || k > 20) throw UsageError("debruijn needs 1 <= k <= 20");
    int n = 1 << k;
    std::vector<Edge> edges;
    edges.reserve(2 * n);
    for (int u = 0; u < n; ++u) {
        for (int b = 0; b < 2; ++b) {
            int v = (2 * u + b) & (n - 1);
            if (v == u) continue;  // the two fixed points; their loops cancel anyway
            edges.push_back({u, v, 1.0});
        }
    }
    return DirectedLaplacian::build(edges, n);
}

DirectedLaplacian gen_random_eulerian(int n, int m, RngStream rng) {
    if (n < 3) throw UsageError("random_eulerian needs n >= 3");
    if (m < n) m = n;
    Rng gen(rng);
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m) + 32);

    // Base cycle guarantees strong connectivity.
    double w0 = log_uniform(gen, 0.1, 2.0);
    for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, w0});

    std::vector<int> scratch(n);
    std::iota(scratch.begin(), scratch.end(), 0);
    std::size_t count = edges.size();
    while (count < static_cast<std::size_t>(m)) {
        int len = 3 + static_cast<int>(gen.next_below(18));  // cycle length in [3, 20]
        len = std::min(len, n);
        // Partial Fisher-Yates draw of `len` distinct vertices.
        for (int i = 0; i < len; ++i) {
            int j = i + static_cast<int>(gen.next_below(static_cast<std::uint64_t>(n - i)));
            std::swap(scratch[i], scratch[j]);
        }
        double w = log_uniform(gen, 0.001, 10.0);
        for (int i = 0; i < len; ++i)
            edges.push_back({scratch[i], scratch[(i + 1) % len], w});
        count += len;
    }
    return DirectedLaplacian::build(edges, n);
}

DirectedLaplacian gen_torus_flow(int n, RngStream rng) {
    int side = static_cast<int>(std::round(std::sqrt(static_cast<double>(n))));
    if (side < 2) throw UsageError("torus_flow needs n >= 4");
    n = side * side;
    Rng gen(rng);
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(2) * n);
    auto id = [&](int r, int c) { return r * side + c; };
    for (int r = 0; r < side; ++r) {
        double w = log_uniform(gen, 0.1, 10.0);
        for (int c = 0; c < side; ++c) edges.push_back({id(r, c), id(r, (c + 1) % side), w});
    }
    for (int c = 0; c < side; ++c) {
        double w = log_uniform(gen, 0.1, 10.0);
        for (int r = 0; r < side; ++r) edges.push_back({id(r, c), id((r + 1) % side, c), w});
    }
    return DirectedLaplacian::build(edges, n);
}

DirectedLaplacian gen_family(const std::string& family, int n, int m, RngStream rng) {
    if (family == "cycle") return gen_cycle(n);
    if (family == "debruijn") {
        int k = 0;
        while ((1 << k) < n) ++k;
        return gen_debruijn(std::max(k, 1));
    }
    if (family == "random_eulerian") return gen_random_eulerian(n, m > 0 ? m : 10 * n, rng);
    if (family == "torus_flow") return gen_torus_flow(n, rng);
    throw UsageError("unknown family: " + family);
}

}  // namespace eulsolve
