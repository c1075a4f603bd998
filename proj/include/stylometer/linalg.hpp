#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "stylometer/common.hpp"

namespace stylo {

/// Row-major square matrix of doubles, just enough for the MDS path.
struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> a;

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}

    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
};

struct EigenDecomposition {
    std::vector<double> values;   // descending
    SquareMatrix vectors;         // column k pairs with values[k]
    int sweeps = 0;
};

/// Cyclic Jacobi for symmetric matrices. Robustness over speed: the inputs
/// here are double-centered Gram matrices of at most a few hundred points.
/// Converges when the off-diagonal Frobenius norm drops below
/// threshold * ||A||_F; throws NonConvergence after max_sweeps.
inline EigenDecomposition jacobi_eigen(SquareMatrix A, double threshold = 1e-12,
                                       int max_sweeps = 100) {
    const std::size_t n = A.n;
    SquareMatrix V(n);
    for (std::size_t i = 0; i < n; ++i) V(i, i) = 1.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * A(i, j) * A(i, j);
        return std::sqrt(s);
    };
    double frob = 0.0;
    for (double x : A.a) frob += x * x;
    frob = std::sqrt(frob);
    const double stop = threshold * (frob > 0.0 ? frob : 1.0);

    int sweep = 0;
    while (off_norm() > stop) {
        if (sweep++ >= max_sweeps)
            throw NonConvergence("jacobi_eigen: no convergence after " +
                                 std::to_string(max_sweeps) + " sweeps");
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = A(p, p), aqq = A(q, q);
                A(p, p) = app - t * apq;
                A(q, q) = aqq + t * apq;
                A(p, q) = 0.0;
                A(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        const double arp = A(r, p), arq = A(r, q);
                        A(r, p) = A(p, r) = arp - s * (arq + tau * arp);
                        A(r, q) = A(q, r) = arq + s * (arp - tau * arq);
                    }
                    const double vrp = V(r, p), vrq = V(r, q);
                    V(r, p) = vrp - s * (vrq + tau * vrp);
                    V(r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }

    // Sort descending; fix each eigenvector's sign so its largest-magnitude
    // component is positive, keeping output reproducible.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return A(x, x) > A(y, y); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = SquareMatrix(n);
    out.sweeps = sweep;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.values[k] = A(src, src);
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t r = 0; r < n; ++r) {
            if (std::abs(V(r, src)) > best) {
                best = std::abs(V(r, src));
                arg = r;
            }
        }
        const double sign = V(arg, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = sign * V(r, src);
    }
    return out;
}

}  // namespace stylo
