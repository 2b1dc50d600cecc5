#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mribow/codebook.hpp"
#include "mribow/matrix.hpp"
#include "mribow/patch.hpp"
#include "mribow/types.hpp"

namespace mribow {

// Ordered feature-vector layout: one block of k histogram bins per
// (metric, region) key, then the clinical covariates. The default is the
// 286-dim layout: 9 metrics x CorpusCallosum, then FA/MD/AK/MK/RK x
// Thalamus, 20 words each, plus 6 clinical values.
struct FeatureLayout {
    struct Block {
        FeatureKey key;
        int k = 0;
    };
    std::vector<Block> blocks;
    bool with_clinical = true;

    std::size_t dim() const;

    // Per-dimension names: "CC.FA.word07", ..., "clin.age".
    std::vector<std::string> names() const;

    void validate() const;

    static FeatureLayout default_layout(int k_total = 20);

    // Blocks for the given keys in sorted (layout) order, k_total bins each.
    static FeatureLayout for_keys(const std::vector<FeatureKey>& keys, int k_total,
                                  bool with_clinical = true);
};

struct SubjectFeatureVector {
    std::string subject_id;
    std::vector<double> values;
    std::vector<std::string> names;
    int label = 0;
};

// One row per subject; column order fixed by `names`.
struct FeatureTable {
    std::vector<std::string> ids;
    std::vector<int> labels;
    std::vector<std::string> names;
    Matrix x;

    void validate() const;
};

// Histogram of nearest-word assignments over cb. Normalized entries sum to 1;
// raw mode returns counts. Throws DataError("no patches for key ...") on an
// empty patch list.
std::vector<double> encode_histogram(const std::vector<Patch>& patches,
                                     const Codebook& cb, bool normalized = true);

// Concatenates per-key histograms in layout order, clinical covariates last.
// The histogram map must cover exactly the layout's keys.
SubjectFeatureVector assemble_features(
    const std::map<FeatureKey, std::vector<double>>& histograms,
    const ClinicalRecord& clinical, const FeatureLayout& layout);

// BoW feature table for every subject in idx. `clinical[i]` pairs with
// idx.per_subject[i]. Subjects encode in parallel.
FeatureTable encode_subjects(const PatchIndex& idx,
                             const std::vector<ClinicalRecord>& clinical,
                             const std::map<FeatureKey, Codebook>& codebooks,
                             const FeatureLayout& layout, bool normalized = true,
                             unsigned workers = 1);

// Mean of masked voxels per (metric, region) restricted to `regions`,
// concatenated with the clinical covariates. Names like "mean.CCBody.AWF".
FeatureTable mean_baseline_features(const Dataset& ds,
                                    const std::vector<RegionId>& regions);

// CSV with header `subject_id,label,<names...>`; values round-trip exactly.
void save_feature_csv(const FeatureTable& t, const std::filesystem::path& path);
FeatureTable load_feature_csv(const std::filesystem::path& path);

}  // namespace mribow
