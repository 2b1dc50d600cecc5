#include "mribow/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mribow/error.hpp"
#include "mribow/parallel.hpp"
#include "mribow/rng.hpp"

namespace mribow {

namespace {

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::vector<std::vector<double>> plusplus_init(
    const std::vector<std::vector<double>>& pts, std::size_t k, Rng& rng) {
    std::vector<std::vector<double>> centers;
    centers.reserve(k);
    centers.push_back(pts[rng.next_below(pts.size())]);

    std::vector<double> d2(pts.size());
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double d = dist2(pts[i], centers.front());
            for (std::size_t c = 1; c < centers.size(); ++c) {
                d = std::min(d, dist2(pts[i], centers[c]));
            }
            d2[i] = d;
            total += d;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double r = rng.next_double() * total;
            double cum = 0.0;
            pick = pts.size() - 1;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                cum += d2[i];
                if (cum > r) {
                    pick = i;
                    break;
                }
            }
            // r may land on a zero-weight tail element; walk back to mass.
            while (pick > 0 && d2[pick] == 0.0) --pick;
        }
        centers.push_back(pts[pick]);
    }
    return centers;
}

KMeansResult lloyd(const std::vector<std::vector<double>>& pts,
                   const KMeansConfig& cfg, std::uint64_t restart_seed) {
    const std::size_t n = pts.size();
    const std::size_t k = static_cast<std::size_t>(cfg.k);
    const std::size_t dim = pts.front().size();

    Rng rng(restart_seed);
    auto centers = plusplus_init(pts, k, rng);

    std::vector<std::size_t> assign(n, 0), prev_assign;
    double prev_wcss = std::numeric_limits<double>::infinity();
    KMeansResult result;

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        // Assignment: nearest center, ties to the lowest index.
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            double best = dist2(pts[i], centers[0]);
            std::size_t best_c = 0;
            for (std::size_t c = 1; c < k; ++c) {
                double d = dist2(pts[i], centers[c]);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            assign[i] = best_c;
            ++counts[best_c];
        }

        // Re-seed empty clusters with the point farthest from its centroid.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            double far_d = -1.0;
            std::size_t far_i = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[assign[i]] <= 1) continue;  // keep donors non-empty
                double d = dist2(pts[i], centers[assign[i]]);
                if (d > far_d) {
                    far_d = d;
                    far_i = i;
                }
            }
            --counts[assign[far_i]];
            assign[far_i] = c;
            counts[c] = 1;
        }

        // Update means.
        for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& c = centers[assign[i]];
            for (std::size_t j = 0; j < dim; ++j) c[j] += pts[i][j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < dim; ++j) {
                centers[c][j] /= static_cast<double>(counts[c]);
            }
        }

        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) wcss += dist2(pts[i], centers[assign[i]]);

        if (wcss > prev_wcss + 1e-9 * std::max(1.0, prev_wcss)) {
            throw NumericError("kmeans: WCSS increased across an iteration");
        }

        bool converged = (assign == prev_assign) ||
                         (std::isfinite(prev_wcss) &&
                          prev_wcss - wcss < cfg.rel_tol * std::max(prev_wcss, 1e-300));
        prev_wcss = wcss;
        prev_assign = assign;
        if (converged) break;
    }

    // Hartigan refinement: move single points between clusters while the
    // objective drops, accounting for the centroid shift the move causes.
    // This escapes assignment-stable states Lloyd cannot improve on.
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[assign[i]];
    const double move_tol = -1e-12 * std::max(1.0, prev_wcss);
    for (int pass = 0; pass < cfg.max_iter; ++pass) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = assign[i];
            if (counts[a] <= 1) continue;
            const double ca = static_cast<double>(counts[a]);
            const double removal_gain = dist2(pts[i], centers[a]) * ca / (ca - 1.0);
            std::size_t best_c = a;
            double best_delta = move_tol;
            for (std::size_t c = 0; c < k; ++c) {
                if (c == a) continue;
                const double cb = static_cast<double>(counts[c]);
                const double delta =
                    dist2(pts[i], centers[c]) * cb / (cb + 1.0) - removal_gain;
                if (delta < best_delta) {
                    best_delta = delta;
                    best_c = c;
                }
            }
            if (best_c == a) continue;
            const double cb = static_cast<double>(counts[best_c]);
            for (std::size_t j = 0; j < dim; ++j) {
                centers[a][j] = (centers[a][j] * ca - pts[i][j]) / (ca - 1.0);
                centers[best_c][j] = (centers[best_c][j] * cb + pts[i][j]) / (cb + 1.0);
            }
            --counts[a];
            ++counts[best_c];
            assign[i] = best_c;
            moved = true;
        }
        if (!moved) break;
    }

    // Recompute means and WCSS exactly to shed incremental-update drift.
    for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dim; ++j) centers[assign[i]][j] += pts[i][j];
    }
    double wcss = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < dim; ++j) {
            centers[c][j] /= static_cast<double>(counts[c]);
        }
    }
    for (std::size_t i = 0; i < n; ++i) wcss += dist2(pts[i], centers[assign[i]]);

    result.centroids = std::move(centers);
    result.wcss = wcss;
    return result;
}

}  // namespace

void KMeansConfig::validate() const {
    if (k < 1) throw ConfigError("kmeans: k must be >= 1");
    if (max_iter < 1) throw ConfigError("kmeans: max_iter must be >= 1");
    if (!(rel_tol >= 0.0)) throw ConfigError("kmeans: rel_tol must be >= 0");
    if (n_restarts < 1) throw ConfigError("kmeans: n_restarts must be >= 1");
}

KMeansResult kmeans(const std::vector<std::vector<double>>& points,
                    const KMeansConfig& cfg, unsigned workers) {
    cfg.validate();
    if (points.empty()) throw DataError("kmeans: no points");
    const std::size_t dim = points.front().size();
    for (const auto& p : points) {
        if (p.size() != dim) throw DataError("kmeans: points of unequal dimension");
    }

    // Canonical point order makes the result independent of input order.
    std::vector<std::vector<double>> pts = points;
    std::sort(pts.begin(), pts.end());

    std::size_t distinct = 1;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i] != pts[i - 1]) ++distinct;
    }
    if (static_cast<std::size_t>(cfg.k) > distinct) {
        throw DataError("kmeans: k (" + std::to_string(cfg.k) +
                        ") exceeds distinct point count (" + std::to_string(distinct) +
                        ")");
    }

    std::vector<KMeansResult> runs(static_cast<std::size_t>(cfg.n_restarts));
    parallel_for(runs.size(), workers, [&](std::size_t r) {
        runs[r] = lloyd(pts, cfg, derive_stream(cfg.seed, {r}));
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].wcss < runs[best].wcss) best = r;
    }
    KMeansResult result = std::move(runs[best]);
    std::sort(result.centroids.begin(), result.centroids.end());
    return result;
}

}  // namespace mribow
