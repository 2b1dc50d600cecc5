#pragma once

#include <cstdint>
#include <vector>

#include "mribow/types.hpp"

namespace mribow {

// Synthetic two-cohort generator. Each region occupies one 16x16 tile (all
// slices) of every metric volume; masked voxels are
//
//   mu(metric, region) + label * mean_shift
//     + 0.2 * texture_contrast * sign * pattern(cohort) + noise
//
// where pattern(control) is a vertical-stripe 16x16 template and
// pattern(mtbi) a checkerboard, both exactly zero-mean over the tile, and
// sign flips per (subject, metric, region, slice). Texture therefore never
// moves ROI means: with mean_shift = 0 the cohorts differ only in spatial
// pattern, which is what the BoW features can see and plain means cannot.
// With texture_contrast = 0 the cohorts are statistically identical.
struct SynthConfig {
    int n_control = 8;
    int n_mtbi = 8;
    Dims dims{2, 48, 32};
    std::vector<MetricId> metrics{kAllMetrics.begin(), kAllMetrics.end()};
    std::vector<RegionId> regions{kAllRegions.begin(), kAllRegions.end()};
    double texture_contrast = 1.0;
    double mean_shift = 0.0;
    double noise_sigma = 0.05;
    std::uint64_t seed = 0;

    void validate() const;
};

// Deterministic for a given config: every random draw comes from a stream
// derived from (seed, subject, ...), so per-subject generation parallelizes
// without changing output. Thalamus tracks only FA/MD/AK/MK/RK.
Dataset generate(const SynthConfig& cfg, unsigned workers = 1);

}  // namespace mribow
