#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "mribow/types.hpp"

namespace mribow {

inline constexpr std::string_view kClinicalHeader =
    "subject_id,age,sex,stroop,sdmt,cvlt,fss,label";

/// Whole-file text helpers. Writing creates parent directories and
/// truncates; both throw DataError on failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Volume files come in pairs: `<stem>.vol.json` holds
/// {"subject_id":str,"metric":str,"dims":[nz,ny,nx]} and `<stem>.vol.raw`
/// holds nz*ny*nx little-endian float32, row-major. `path` may be the
/// stem or the .vol.json file. Doubles are narrowed to float32 on write
/// and widened losslessly on load; non-finite voxels are rejected.
MetricVolume load_volume(const std::filesystem::path& path);
void write_volume(const MetricVolume& v, const std::filesystem::path& path);

/// Mask files: `<stem>.mask.json` ({"region":str,"dims":[...]}) plus
/// `<stem>.mask.raw` with one byte (0/1) per voxel, same layout.
RoiMask load_mask(const std::filesystem::path& path);
void write_mask(const RoiMask& m, const std::filesystem::path& path);

/// CSV with the exact header `subject_id,age,sex,stroop,sdmt,cvlt,fss,label`
/// (sex: 0 = female, 1 = male; label: 0 = control, 1 = mtbi).
std::vector<ClinicalRecord> load_clinical(const std::filesystem::path& path);
void write_clinical(const std::vector<ClinicalRecord>& records,
                    const std::filesystem::path& path);

/// Dataset directory layout: clinical.csv, volumes/<subject>_<metric>.vol.*,
/// masks/<subject>_<region>.mask.*, and manifest.json tying them together.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace mribow
