#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "stylometer/common.hpp"
#include "stylometer/linalg.hpp"

namespace stylo {

/// Symmetric non-negative dissimilarities with zero diagonal.
struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<double> d;  // full n*n storage

    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n_) : n(n_), d(n_ * n_, 0.0) {}

    double operator()(std::size_t i, std::size_t j) const { return d[i * n + j]; }
    double& operator()(std::size_t i, std::size_t j) { return d[i * n + j]; }
};

using Point2 = std::array<double, 2>;

struct Embedding2D {
    std::vector<Point2> coords;
    double stress = 0.0;        // raw stress on (input D, coords)
    double stress1 = 0.0;       // normalized stress-1, diagnostic only
    int iterations = 0;
    std::uint64_t seed = 0;
    bool degenerate = false;        // all points identical
    bool eigen_clamped = false;     // classical MDS clamped a negative eigenvalue
    std::vector<double> stress_history;  // per-iteration raw stress (SMACOF)
};

struct ClusterStats {
    Point2 center{};
    double radius = 0.0;
};

struct ClusterSummary {
    std::map<std::string, ClusterStats> clusters;
};

struct MdsConfig {
    int max_iter = 300;
    double eps = 1e-6;          // relative stress-decrease stopping threshold
    int n_init = 4;
    std::uint64_t seed = 0;
    double stress_floor = 0.0;  // optional absolute early stop, 0 disables
};

// ---------------------------------------------------------------------------

inline DistanceMatrix pairwise_distances(const std::vector<std::vector<double>>& vectors) {
    if (vectors.size() < 2)
        throw DimensionMismatch("pairwise_distances: need at least 2 vectors");
    const std::size_t dim = vectors[0].size();
    for (const auto& v : vectors)
        if (v.size() != dim)
            throw DimensionMismatch("pairwise_distances: inconsistent vector dimensions");

    DistanceMatrix D(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double diff = vectors[i][k] - vectors[j][k];
                s += diff * diff;
            }
            const double dist = std::sqrt(s);
            D(i, j) = dist;
            D(j, i) = dist;
        }
    }
    return D;
}

inline double stress(const DistanceMatrix& D, const std::vector<Point2>& coords) {
    if (coords.size() != D.n) throw DimensionMismatch("stress: coords/D size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < D.n; ++i) {
        for (std::size_t j = i + 1; j < D.n; ++j) {
            const double dx = coords[i][0] - coords[j][0];
            const double dy = coords[i][1] - coords[j][1];
            const double resid = D(i, j) - std::sqrt(dx * dx + dy * dy);
            s += resid * resid;
        }
    }
    return s;
}

/// Normalized stress-1 = sqrt(raw / sum of squared dissimilarities).
inline double stress1(const DistanceMatrix& D, const std::vector<Point2>& coords) {
    double denom = 0.0;
    for (std::size_t i = 0; i < D.n; ++i)
        for (std::size_t j = i + 1; j < D.n; ++j) denom += D(i, j) * D(i, j);
    if (denom == 0.0) return 0.0;
    return std::sqrt(stress(D, coords) / denom);
}

namespace detail {

inline bool all_zero(const DistanceMatrix& D) {
    for (double x : D.d)
        if (x != 0.0) return false;
    return true;
}

inline Embedding2D degenerate_embedding(std::size_t n, std::uint64_t seed) {
    Embedding2D emb;
    emb.coords.assign(n, Point2{0.0, 0.0});
    emb.degenerate = true;
    emb.seed = seed;
    return emb;
}

}  // namespace detail

/// Torgerson's classical scaling: double-center the squared dissimilarities
/// and scale the top-2 eigenvectors by the square roots of the eigenvalues.
/// Negative leading eigenvalues are clamped to zero and flagged.
inline Embedding2D classical_mds(const DistanceMatrix& D) {
    const std::size_t n = D.n;
    if (n < 3) throw DimensionMismatch("classical_mds: need at least 3 points");
    if (detail::all_zero(D)) return detail::degenerate_embedding(n, 0);

    SquareMatrix B(n);
    std::vector<double> row_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double sq = D(i, j) * D(i, j);
            row_mean[i] += sq;
            grand += sq;
        }
        row_mean[i] /= static_cast<double>(n);
    }
    grand /= static_cast<double>(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            B(i, j) = -0.5 * (D(i, j) * D(i, j) - row_mean[i] - row_mean[j] + grand);

    const EigenDecomposition eig = jacobi_eigen(std::move(B));

    Embedding2D emb;
    emb.coords.assign(n, Point2{0.0, 0.0});
    emb.iterations = eig.sweeps;
    for (std::size_t k = 0; k < 2; ++k) {
        double lambda = eig.values[k];
        if (lambda < 0.0) {
            emb.eigen_clamped = true;
            lambda = 0.0;
        }
        const double scale = std::sqrt(lambda);
        for (std::size_t i = 0; i < n; ++i) emb.coords[i][k] = scale * eig.vectors(i, k);
    }
    emb.stress = stress(D, emb.coords);
    emb.stress1 = stress1(D, emb.coords);
    return emb;
}

/// Metric SMACOF: stress majorization via the Guttman transform, best of
/// n_init seeded random restarts. The recorded stress sequence is checked to
/// be non-increasing every iteration (a tiny slack absorbs last-ulp rounding
/// at the convergence plateau).
inline Embedding2D smacof(const DistanceMatrix& D, const MdsConfig& config = {}) {
    const std::size_t n = D.n;
    if (n < 3) throw DimensionMismatch("smacof: need at least 3 points");
    if (detail::all_zero(D)) return detail::degenerate_embedding(n, config.seed);
    if (config.max_iter < 1 || config.n_init < 1)
        throw StyloError("smacof: max_iter and n_init must be positive");

    Rng master(config.seed);
    std::vector<std::uint64_t> restart_seeds;
    restart_seeds.reserve(static_cast<std::size_t>(config.n_init));
    for (int r = 0; r < config.n_init; ++r) restart_seeds.push_back(master());

    Embedding2D best;
    bool have_best = false;

    std::vector<Point2> X(n), Xnew(n);
    for (int restart = 0; restart < config.n_init; ++restart) {
        Rng rng(restart_seeds[static_cast<std::size_t>(restart)]);
        for (auto& p : X) {
            p[0] = uniform_real(rng, -1.0, 1.0);
            p[1] = uniform_real(rng, -1.0, 1.0);
        }

        std::vector<double> history;
        double prev = stress(D, X);
        history.push_back(prev);
        int iter = 0;
        while (iter < config.max_iter) {
            ++iter;
            // Guttman transform, unit weights: Xnew = B(X) X / n.
            for (auto& p : Xnew) p = {0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) {
                double bii = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const double dx = X[i][0] - X[j][0];
                    const double dy = X[i][1] - X[j][1];
                    const double rho = std::sqrt(dx * dx + dy * dy);
                    const double bij = rho > 0.0 ? -D(i, j) / rho : 0.0;
                    bii -= bij;
                    Xnew[i][0] += bij * X[j][0];
                    Xnew[i][1] += bij * X[j][1];
                }
                Xnew[i][0] += bii * X[i][0];
                Xnew[i][1] += bii * X[i][1];
            }
            const double inv_n = 1.0 / static_cast<double>(n);
            for (auto& p : Xnew) {
                p[0] *= inv_n;
                p[1] *= inv_n;
            }
            X.swap(Xnew);

            const double cur = stress(D, X);
            if (cur > prev + 1e-12 * (1.0 + prev))
                throw StyloError("smacof: stress increased from " + format_full(prev) + " to " +
                                 format_full(cur));
            history.push_back(cur);
            const double decrease = prev - cur;
            prev = cur;
            if (config.stress_floor > 0.0 && cur < config.stress_floor) break;
            if (cur == 0.0) break;
            if (decrease < config.eps * (prev + decrease)) break;
        }

        if (!have_best || prev < best.stress) {
            best.coords = X;
            best.stress = prev;
            best.iterations = iter;
            best.stress_history = std::move(history);
            best.seed = restart_seeds[static_cast<std::size_t>(restart)];
            have_best = true;
        }
    }
    best.stress1 = stress1(D, best.coords);
    return best;
}

// ---------------------------------------------------------------------------

/// Per-author center of mass plus "average standard deviation in 2D", read
/// as sqrt((var_x + var_y) / 2) with population variances. Single-point
/// clusters get radius 0.
inline ClusterSummary cluster_summary(const Embedding2D& emb, const std::vector<std::string>& labels) {
    if (labels.size() != emb.coords.size())
        throw DimensionMismatch("cluster_summary: label/coord count mismatch");
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);

    ClusterSummary summary;
    for (const auto& [author, members] : groups) {
        ClusterStats stats;
        const double m = static_cast<double>(members.size());
        for (std::size_t idx : members) {
            stats.center[0] += emb.coords[idx][0];
            stats.center[1] += emb.coords[idx][1];
        }
        stats.center[0] /= m;
        stats.center[1] /= m;
        double var_x = 0.0, var_y = 0.0;
        for (std::size_t idx : members) {
            const double dx = emb.coords[idx][0] - stats.center[0];
            const double dy = emb.coords[idx][1] - stats.center[1];
            var_x += dx * dx;
            var_y += dy * dy;
        }
        var_x /= m;
        var_y /= m;
        stats.radius = std::sqrt((var_x + var_y) / 2.0);
        summary.clusters[author] = stats;
    }
    return summary;
}

inline std::string embedding_to_csv(const Embedding2D& emb, const std::vector<std::string>& doc_ids,
                                    const std::vector<std::string>& authors) {
    std::ostringstream out;
    out << "doc_id,author,x,y\n";
    for (std::size_t i = 0; i < emb.coords.size(); ++i) {
        out << csv_field(doc_ids[i]) << ',' << csv_field(authors[i]) << ','
            << format_full(emb.coords[i][0]) << ',' << format_full(emb.coords[i][1]) << '\n';
    }
    return out.str();
}

inline std::string cluster_summary_to_csv(const ClusterSummary& summary) {
    std::ostringstream out;
    out << "author,cx,cy,radius\n";
    for (const auto& [author, stats] : summary.clusters) {
        out << csv_field(author) << ',' << format_full(stats.center[0]) << ','
            << format_full(stats.center[1]) << ',' << format_full(stats.radius) << '\n';
    }
    return out.str();
}

}  // namespace stylo
