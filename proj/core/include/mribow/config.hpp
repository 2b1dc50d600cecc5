#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mribow/cv.hpp"
#include "mribow/kmeans.hpp"
#include "mribow/patch.hpp"
#include "mribow/svm.hpp"
#include "mribow/synth.hpp"
#include "mribow/types.hpp"

namespace mribow {

// One flat run configuration drives every pipeline stage. File format is
// `key = value` lines; blank lines and lines starting with '#' are ignored.
// Unknown keys are rejected. See canonical_config() for the full key list.
struct RunConfig {
    std::filesystem::path out_dir = "out";
    std::filesystem::path dataset_dir;  // empty: <out_dir>/dataset
    std::string mode = "bow";           // bow | mean_baseline
    bool honest_codebooks = false;
    std::uint64_t seed = 0;
    unsigned workers = 1;

    bool synth_enabled = true;  // false: dataset_dir must already exist
    SynthConfig synth;          // synth.seed is derived from `seed`

    PatchConfig patch;

    int k_per_cohort = 10;
    KMeansConfig kmeans;  // k and seed are derived; restarts/iter/tol apply

    bool normalized_histograms = true;

    CvConfig cv;  // cv.seed derived from `seed`
    GridConfig grid;
    SvmSpec svm;  // c and gamma come from the grid search

    int select_max_size = 10;

    std::vector<double> eval_ratios = {0.5, 0.625, 0.75, 0.875};
    std::vector<RegionId> baseline_regions{kAllRegions.begin(), kAllRegions.end()};

    std::filesystem::path dataset_path() const {
        return dataset_dir.empty() ? out_dir / "dataset" : dataset_dir;
    }
    void validate() const;
};

RunConfig parse_run_config_text(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// Every key with its effective value, sorted, one per line. Parsing the
// result reproduces the config exactly; fingerprints hash this form.
std::string canonical_config(const RunConfig& cfg);

}  // namespace mribow
