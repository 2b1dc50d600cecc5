#include "mribow/patch.hpp"

#include <fstream>
#include <sstream>

#include "mribow/error.hpp"
#include "mribow/parallel.hpp"
#include "mribow/text.hpp"

namespace mribow {

void PatchConfig::validate() const {
    if (size < 2) throw ConfigError("patch size must be >= 2");
    if (stride < 1) throw ConfigError("patch stride must be >= 1");
    if (!(coverage_threshold > 0.0 && coverage_threshold <= 1.0)) {
        throw ConfigError("patch coverage threshold must be in (0, 1]");
    }
}

std::vector<Patch> extract_patches(const MetricVolume& vol, const RoiMask& mask,
                                   const PatchConfig& cfg) {
    cfg.validate();
    if (!(vol.dims == mask.dims)) {
        throw DataError("extract_patches: volume dims do not match mask dims for '" +
                        vol.subject_id + "'");
    }
    const std::size_t p = static_cast<std::size_t>(cfg.size);
    const std::size_t stride = static_cast<std::size_t>(cfg.stride);
    const auto [nz, ny, nx] = vol.dims;

    std::vector<Patch> out;
    if (ny < p || nx < p) return out;

    // Per-slice 2-D prefix sums give O(1) in-mask counts per window.
    std::vector<std::size_t> prefix((ny + 1) * (nx + 1));
    const double window_voxels = static_cast<double>(p * p);

    for (std::size_t z = 0; z < nz; ++z) {
        const std::uint8_t* slice_mask = mask.bits.data() + z * ny * nx;
        for (std::size_t y = 0; y < ny; ++y) {
            for (std::size_t x = 0; x < nx; ++x) {
                prefix[(y + 1) * (nx + 1) + (x + 1)] =
                    prefix[y * (nx + 1) + (x + 1)] + prefix[(y + 1) * (nx + 1) + x] -
                    prefix[y * (nx + 1) + x] + slice_mask[y * nx + x];
            }
        }
        auto window_count = [&](std::size_t y, std::size_t x) {
            return prefix[(y + p) * (nx + 1) + (x + p)] - prefix[y * (nx + 1) + (x + p)] -
                   prefix[(y + p) * (nx + 1) + x] + prefix[y * (nx + 1) + x];
        };

        const double* slice_vox = vol.voxels.data() + z * ny * nx;
        for (std::size_t y = 0; y + p <= ny; y += stride) {
            for (std::size_t x = 0; x + p <= nx; x += stride) {
                double coverage = static_cast<double>(window_count(y, x)) / window_voxels;
                if (coverage < cfg.coverage_threshold) continue;
                Patch patch;
                patch.values.reserve(p * p);
                for (std::size_t dy = 0; dy < p; ++dy) {
                    const double* row = slice_vox + (y + dy) * nx + x;
                    patch.values.insert(patch.values.end(), row, row + p);
                }
                patch.z = z;
                patch.y = y;
                patch.x = x;
                patch.key = {vol.metric, mask.region};
                patch.subject_id = vol.subject_id;
                out.push_back(std::move(patch));
            }
        }
    }
    return out;
}

PatchIndex extract_all(const Dataset& ds, const std::vector<FeatureKey>& keys,
                       const PatchConfig& cfg, unsigned workers) {
    PatchIndex index;
    index.per_subject.resize(ds.subjects.size());
    parallel_for(ds.subjects.size(), workers, [&](std::size_t si) {
        const auto& subject = ds.subjects[si];
        for (const auto& key : keys) {
            auto it = subject.data.find(key);
            if (it == subject.data.end()) {
                throw DataError("subject '" + subject.clinical.subject_id +
                                "' is missing pair " + to_string(key));
            }
            index.per_subject[si][key] =
                extract_patches(*it->second.volume, *it->second.mask, cfg);
        }
    });
    return index;
}

void write_patch_csv(const std::vector<Patch>& patches, int patch_size,
                     const std::filesystem::path& path) {
    const std::size_t len = static_cast<std::size_t>(patch_size) *
                            static_cast<std::size_t>(patch_size);
    std::ostringstream os;
    os << "subject_id,metric,region,z,y,x";
    for (std::size_t i = 0; i < len; ++i) os << ",v" << i;
    os << "\n";
    for (const auto& patch : patches) {
        if (patch.values.size() != len) {
            throw DataError("patch length does not match patch_size in CSV dump");
        }
        os << patch.subject_id << ',' << to_string(patch.key.metric) << ','
           << to_string(patch.key.region) << ',' << patch.z << ',' << patch.y << ','
           << patch.x;
        for (double v : patch.values) os << ',' << format_double(v);
        os << "\n";
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << os.str();
    if (!out) throw DataError("failed to write '" + path.string() + "'");
}

}  // namespace mribow
