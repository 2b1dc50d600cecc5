#include "mribow/types.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "mribow/error.hpp"

namespace mribow {

namespace {

constexpr std::array<std::string_view, 9> kMetricNames = {
    "AWF", "DA", "DePar", "DePerp", "FA", "MD", "AK", "MK", "RK"};

constexpr std::array<std::string_view, 6> kRegionNames = {
    "CorpusCallosum", "Thalamus", "PrefrontalWM", "CCGenu", "CCBody", "CCSplenium"};

constexpr std::array<std::string_view, 6> kRegionShort = {
    "CC", "Thal", "PFWM", "CCGenu", "CCBody", "CCSplenium"};

}  // namespace

std::string_view to_string(MetricId m) {
    return kMetricNames[static_cast<std::size_t>(m)];
}

MetricId parse_metric(std::string_view s) {
    for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
        if (kMetricNames[i] == s) return static_cast<MetricId>(i);
    }
    throw DataError("unknown metric '" + std::string(s) + "'");
}

std::string_view to_string(RegionId r) {
    return kRegionNames[static_cast<std::size_t>(r)];
}

std::string_view short_name(RegionId r) {
    return kRegionShort[static_cast<std::size_t>(r)];
}

RegionId parse_region(std::string_view s) {
    for (std::size_t i = 0; i < kRegionNames.size(); ++i) {
        if (kRegionNames[i] == s) return static_cast<RegionId>(i);
    }
    throw DataError("unknown region '" + std::string(s) + "'");
}

bool is_bow_region(RegionId r) {
    return r == RegionId::CorpusCallosum || r == RegionId::Thalamus;
}

std::string_view to_string(Cohort c) {
    return c == Cohort::Control ? "control" : "mtbi";
}

Cohort parse_cohort(std::string_view s) {
    if (s == "control") return Cohort::Control;
    if (s == "mtbi") return Cohort::Mtbi;
    throw DataError("unknown cohort '" + std::string(s) + "'");
}

void validate_volume(const MetricVolume& v) {
    if (v.dims.total() == 0) {
        throw DataError("volume '" + v.subject_id + "': empty dims");
    }
    if (v.voxels.size() != v.dims.total()) {
        std::ostringstream os;
        os << "volume '" << v.subject_id << "' " << to_string(v.metric)
           << ": voxel count mismatch (header " << v.dims.total() << ", payload "
           << v.voxels.size() << ")";
        throw DataError(os.str());
    }
    for (std::size_t i = 0; i < v.voxels.size(); ++i) {
        if (!std::isfinite(v.voxels[i])) {
            std::ostringstream os;
            os << "volume '" << v.subject_id << "' " << to_string(v.metric)
               << ": non-finite voxel at index " << i;
            throw DataError(os.str());
        }
    }
}

void validate_mask(const RoiMask& m) {
    if (m.dims.total() == 0) {
        throw DataError("mask " + std::string(to_string(m.region)) + ": empty dims");
    }
    if (m.bits.size() != m.dims.total()) {
        std::ostringstream os;
        os << "mask " << to_string(m.region) << ": voxel count mismatch (header "
           << m.dims.total() << ", payload " << m.bits.size() << ")";
        throw DataError(os.str());
    }
    for (std::size_t i = 0; i < m.bits.size(); ++i) {
        if (m.bits[i] > 1) {
            std::ostringstream os;
            os << "mask " << to_string(m.region) << ": byte not 0/1 at index " << i;
            throw DataError(os.str());
        }
    }
}

std::array<double, 6> clinical_values(const ClinicalRecord& r) {
    return {r.age, static_cast<double>(r.sex), r.stroop, r.sdmt, r.cvlt, r.fss};
}

void validate_clinical(const ClinicalRecord& r) {
    if (r.subject_id.empty()) throw DataError("clinical record: empty subject_id");
    if (!(std::isfinite(r.age) && r.age > 0)) {
        throw DataError("subject '" + r.subject_id + "': age must be finite and positive");
    }
    if (r.sex != 0 && r.sex != 1) {
        throw DataError("subject '" + r.subject_id + "': sex outside {0,1}");
    }
    if (r.label != 0 && r.label != 1) {
        throw DataError("subject '" + r.subject_id + "': label outside {0,1}");
    }
    for (double v : {r.stroop, r.sdmt, r.cvlt, r.fss}) {
        if (!std::isfinite(v)) {
            throw DataError("subject '" + r.subject_id + "': non-finite covariate");
        }
    }
}

std::string to_string(const FeatureKey& k) {
    return std::string(to_string(k.metric)) + "@" + std::string(to_string(k.region));
}

std::vector<FeatureKey> Dataset::keys() const {
    if (subjects.empty()) return {};
    std::vector<FeatureKey> out;
    out.reserve(subjects.front().data.size());
    for (const auto& [key, unused] : subjects.front().data) out.push_back(key);
    for (const auto& s : subjects) {
        if (s.data.size() != out.size()) {
            throw DataError("subject '" + s.clinical.subject_id +
                            "' has a different (metric, region) key set");
        }
        std::size_t i = 0;
        for (const auto& [key, unused] : s.data) {
            if (!(key == out[i++])) {
                throw DataError("subject '" + s.clinical.subject_id +
                                "' is missing pair " + to_string(out[i - 1]));
            }
        }
    }
    return out;
}

void Dataset::validate() const {
    std::set<std::string> ids;
    for (const auto& s : subjects) {
        validate_clinical(s.clinical);
        if (!ids.insert(s.clinical.subject_id).second) {
            throw DataError("duplicate subject '" + s.clinical.subject_id + "'");
        }
    }
    keys();  // uniform key sets
    for (const auto& s : subjects) {
        for (const auto& [key, kd] : s.data) {
            if (!kd.volume || !kd.mask) {
                throw DataError("subject '" + s.clinical.subject_id + "' pair " +
                                to_string(key) + ": missing volume or mask");
            }
            validate_volume(*kd.volume);
            validate_mask(*kd.mask);
            if (kd.volume->metric != key.metric || kd.mask->region != key.region) {
                throw DataError("subject '" + s.clinical.subject_id + "' pair " +
                                to_string(key) + ": key does not match contents");
            }
            if (!(kd.volume->dims == kd.mask->dims)) {
                throw DataError("subject '" + s.clinical.subject_id + "' pair " +
                                to_string(key) + ": volume/mask dims differ");
            }
        }
    }
}

std::vector<int> Dataset::labels() const {
    std::vector<int> out;
    out.reserve(subjects.size());
    for (const auto& s : subjects) out.push_back(s.clinical.label);
    return out;
}

}  // namespace mribow
