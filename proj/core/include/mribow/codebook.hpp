#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "mribow/kmeans.hpp"
#include "mribow/patch.hpp"
#include "mribow/types.hpp"

namespace mribow {

// Merged per-(metric, region) dictionary of visual words. Words learned from
// the control cohort come first, then words learned from the mTBI cohort;
// `provenance[i]` records which cohort word i came from.
struct Codebook {
    FeatureKey key;
    std::vector<std::vector<double>> words;
    std::vector<Cohort> provenance;

    std::size_t k_total() const { return words.size(); }
    void validate() const;
};

// Clusters each cohort's patches separately (k = k_per_cohort each) and merges
// the two word lists. Both runs use cfg.seed, so identical cohorts produce
// identical word sets. cfg.k is ignored in favor of k_per_cohort.
Codebook learn_codebook(const std::vector<Patch>& patches_control,
                        const std::vector<Patch>& patches_mtbi, FeatureKey key,
                        int k_per_cohort, const KMeansConfig& cfg,
                        unsigned workers = 1);

// Index of the word with minimal squared Euclidean distance to v; ties go to
// the lowest index.
std::size_t nearest_word(const std::vector<double>& v, const Codebook& cb);

// Learns one codebook per BoW key from the patches of `train_subjects`
// (indices into idx.per_subject). Keys run in parallel.
std::map<FeatureKey, Codebook> learn_codebooks(
    const PatchIndex& idx, const std::vector<int>& labels,
    const std::vector<std::size_t>& train_subjects, int k_per_cohort,
    const KMeansConfig& cfg, unsigned workers = 1);

std::string codebook_filename(FeatureKey key);

void save_codebook(const Codebook& cb, const std::filesystem::path& path);
Codebook load_codebook(const std::filesystem::path& path);

}  // namespace mribow
