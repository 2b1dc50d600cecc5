#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "mribow/types.hpp"

namespace mribow {

/// A p x p window cut from one axial slice, row-major.
struct Patch {
    std::vector<double> values;  // length p*p
    std::size_t z = 0, y = 0, x = 0;
    FeatureKey key;
    std::string subject_id;
};

struct PatchConfig {
    int size = 16;                    // p
    int stride = 16;                  // grid step; p for non-overlapping
    double coverage_threshold = 0.5;  // min fraction of mask-true voxels

    void validate() const;  // throws ConfigError
};

/// Extracts every p x p window on the (stride-spaced, origin-aligned) grid
/// of each axial slice whose in-mask fraction reaches the coverage
/// threshold. Output order is (z, y, x) lexicographic.
std::vector<Patch> extract_patches(const MetricVolume& vol, const RoiMask& mask,
                                   const PatchConfig& cfg);

/// Patches for all subjects and keys of a dataset, grouped per subject.
struct PatchIndex {
    std::vector<std::map<FeatureKey, std::vector<Patch>>> per_subject;
};

PatchIndex extract_all(const Dataset& ds, const std::vector<FeatureKey>& keys,
                       const PatchConfig& cfg, unsigned workers = 1);

/// CSV dump with columns subject_id,metric,region,z,y,x,v0..v{p*p-1}.
void write_patch_csv(const std::vector<Patch>& patches, int patch_size,
                     const std::filesystem::path& path);

}  // namespace mribow
