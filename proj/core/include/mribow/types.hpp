#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace mribow {

/// Scalar MRI-derived map identifiers.
enum class MetricId : int { AWF, DA, DePar, DePerp, FA, MD, AK, MK, RK };

inline constexpr std::array<MetricId, 9> kAllMetrics = {
    MetricId::AWF, MetricId::DA, MetricId::DePar, MetricId::DePerp, MetricId::FA,
    MetricId::MD,  MetricId::AK, MetricId::MK,    MetricId::RK};

std::string_view to_string(MetricId m);
MetricId parse_metric(std::string_view s);  // throws DataError

/// Brain regions of interest. The bag-of-words pipeline accepts only
/// CorpusCallosum and Thalamus; mean-value baseline features accept all six.
enum class RegionId : int {
    CorpusCallosum,
    Thalamus,
    PrefrontalWM,
    CCGenu,
    CCBody,
    CCSplenium
};

inline constexpr std::array<RegionId, 6> kAllRegions = {
    RegionId::CorpusCallosum, RegionId::Thalamus, RegionId::PrefrontalWM,
    RegionId::CCGenu,         RegionId::CCBody,   RegionId::CCSplenium};

std::string_view to_string(RegionId r);
std::string_view short_name(RegionId r);  // CC, Thal, PFWM, CCGenu, CCBody, CCSplenium
RegionId parse_region(std::string_view s);

/// True for the two regions the BoW pipeline operates on.
bool is_bow_region(RegionId r);

enum class Cohort : int { Control = 0, Mtbi = 1 };

std::string_view to_string(Cohort c);
Cohort parse_cohort(std::string_view s);

/// Grid extents, row-major (slice, row, col).
struct Dims {
    std::size_t nz = 0;
    std::size_t ny = 0;
    std::size_t nx = 0;

    std::size_t total() const { return nz * ny * nx; }
    bool operator==(const Dims&) const = default;
};

/// One scalar 3-D image for one (subject, metric) pair. Voxels are stored
/// as 64-bit reals internally; file storage is little-endian float32.
struct MetricVolume {
    std::string subject_id;
    MetricId metric = MetricId::AWF;
    Dims dims;
    std::vector<double> voxels;  // row-major (slice, row, col)
};

/// Throws DataError on dims/voxel-count mismatch or a non-finite voxel
/// (the message names the offending index).
void validate_volume(const MetricVolume& v);

struct RoiMask {
    RegionId region = RegionId::CorpusCallosum;
    Dims dims;
    std::vector<std::uint8_t> bits;  // 0/1, same layout as MetricVolume
};

void validate_mask(const RoiMask& m);

/// Demographic and neurocognitive covariates plus the class label.
struct ClinicalRecord {
    std::string subject_id;
    double age = 0.0;
    int sex = 0;  // {0,1}
    double stroop = 0.0;
    double sdmt = 0.0;
    double cvlt = 0.0;
    double fss = 0.0;
    int label = 0;  // 0 = control, 1 = mtbi
};

inline constexpr std::array<std::string_view, 6> kClinicalNames = {
    "age", "sex", "stroop", "sdmt", "cvlt", "fss"};

std::array<double, 6> clinical_values(const ClinicalRecord& r);
void validate_clinical(const ClinicalRecord& r);

/// (metric, region) pair keying codebooks, histograms and volume/mask data.
/// Ordered region-major so that sorted keys match the feature layout order.
struct FeatureKey {
    MetricId metric = MetricId::AWF;
    RegionId region = RegionId::CorpusCallosum;

    friend bool operator==(const FeatureKey&, const FeatureKey&) = default;
    friend bool operator<(const FeatureKey& a, const FeatureKey& b) {
        if (a.region != b.region) return a.region < b.region;
        return a.metric < b.metric;
    }
};

std::string to_string(const FeatureKey& k);  // "<metric>@<region>"

struct KeyData {
    std::shared_ptr<const MetricVolume> volume;
    std::shared_ptr<const RoiMask> mask;
};

struct SubjectEntry {
    ClinicalRecord clinical;
    std::map<FeatureKey, KeyData> data;
};

/// A cohort study: per-subject clinical records plus (metric, region)
/// keyed volumes and masks. Immutable after construction by convention.
struct Dataset {
    std::vector<SubjectEntry> subjects;

    /// The common key set (sorted). Throws DataError if subjects disagree.
    std::vector<FeatureKey> keys() const;

    /// Subject ids unique, key sets identical, dims consistent per pair.
    void validate() const;

    std::vector<int> labels() const;
};

}  // namespace mribow
