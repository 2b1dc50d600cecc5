#pragma once

#include <cstdint>
#include <vector>

namespace mribow {

struct KMeansConfig {
    int k = 1;
    int max_iter = 300;
    double rel_tol = 1e-6;  // stop when relative WCSS improvement drops below
    int n_restarts = 8;
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError
};

struct KMeansResult {
    std::vector<std::vector<double>> centroids;  // sorted lexicographically
    double wcss = 0.0;
};

/// Lloyd's algorithm from k-means++ starts, followed by Hartigan single-point
/// refinement; best of n_restarts by WCSS.
///
/// Deterministic given cfg.seed and independent of point order and worker
/// count: points are canonicalized by lexicographic sort before clustering,
/// restart r draws from the substream (seed, r), and the returned centroid
/// list is itself sorted. Empty clusters are re-seeded with the point
/// farthest from its centroid. WCSS is checked non-increasing across
/// iterations (NumericError on violation).
///
/// Throws DataError when k exceeds the number of distinct points or the
/// points have unequal dimensions.
KMeansResult kmeans(const std::vector<std::vector<double>>& points,
                    const KMeansConfig& cfg, unsigned workers = 1);

}  // namespace mribow
