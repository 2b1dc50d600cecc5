#include "mribow/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <set>

#include "mribow/error.hpp"
#include "mribow/parallel.hpp"
#include "mribow/rng.hpp"

namespace mribow {

namespace {

constexpr std::size_t kTile = 16;
constexpr double kBackgroundMean = 0.2;
constexpr double kTextureAmp = 0.2;

// Stream tags keep the per-purpose substreams disjoint.
constexpr std::uint64_t kTagClinical = 0xC1;
constexpr std::uint64_t kTagNoise = 0x70;
constexpr std::uint64_t kTagSign = 0x51;

double region_mean(MetricId m, std::size_t tile_index) {
    return 0.4 + 0.05 * static_cast<double>(m) + 0.03 * static_cast<double>(tile_index);
}

double pattern_value(Cohort cohort, std::size_t ly, std::size_t lx) {
    if (cohort == Cohort::Control) return (lx & 1) ? 1.0 : -1.0;
    return ((ly + lx) & 1) ? 1.0 : -1.0;
}

std::vector<MetricId> metrics_for_region(RegionId r,
                                         const std::vector<MetricId>& metrics) {
    if (r != RegionId::Thalamus) return metrics;
    static const std::set<MetricId> kThal = {MetricId::FA, MetricId::MD, MetricId::AK,
                                             MetricId::MK, MetricId::RK};
    std::vector<MetricId> out;
    for (MetricId m : metrics) {
        if (kThal.count(m)) out.push_back(m);
    }
    return out;
}

}  // namespace

void SynthConfig::validate() const {
    if (n_control < 2 || n_mtbi < 2) {
        throw ConfigError("synth: need at least 2 subjects per cohort");
    }
    if (dims.nz < 1) throw ConfigError("synth: nz must be >= 1");
    if (metrics.empty()) throw ConfigError("synth: no metrics");
    if (regions.empty()) throw ConfigError("synth: no regions");
    if (!(texture_contrast >= 0.0 && texture_contrast <= 1.0)) {
        throw ConfigError("synth: texture_contrast must be in [0, 1]");
    }
    if (!(noise_sigma > 0.0)) throw ConfigError("synth: noise_sigma must be > 0");
    std::set<RegionId> distinct(regions.begin(), regions.end());
    std::size_t tiles = (dims.ny / kTile) * (dims.nx / kTile);
    if (dims.ny < kTile || dims.nx < kTile || tiles < distinct.size()) {
        throw ConfigError("synth: dims (" + std::to_string(dims.ny) + "x" +
                          std::to_string(dims.nx) + ") cannot hold one 16x16 tile "
                          "per region for " + std::to_string(distinct.size()) +
                          " regions");
    }
}

Dataset generate(const SynthConfig& cfg, unsigned workers) {
    cfg.validate();

    std::vector<MetricId> metrics(cfg.metrics);
    std::sort(metrics.begin(), metrics.end());
    metrics.erase(std::unique(metrics.begin(), metrics.end()), metrics.end());
    std::vector<RegionId> regions(cfg.regions);
    std::sort(regions.begin(), regions.end());
    regions.erase(std::unique(regions.begin(), regions.end()), regions.end());

    const std::size_t tiles_x = cfg.dims.nx / kTile;
    auto tile_origin = [&](std::size_t tile) {
        return std::pair<std::size_t, std::size_t>{(tile / tiles_x) * kTile,
                                                   (tile % tiles_x) * kTile};
    };

    // One immutable mask per region, shared by every subject.
    std::vector<std::shared_ptr<const RoiMask>> masks;
    for (std::size_t t = 0; t < regions.size(); ++t) {
        auto mask = std::make_shared<RoiMask>();
        mask->region = regions[t];
        mask->dims = cfg.dims;
        mask->bits.assign(cfg.dims.total(), 0);
        auto [y0, x0] = tile_origin(t);
        for (std::size_t z = 0; z < cfg.dims.nz; ++z) {
            for (std::size_t y = y0; y < y0 + kTile; ++y) {
                for (std::size_t x = x0; x < x0 + kTile; ++x) {
                    mask->bits[(z * cfg.dims.ny + y) * cfg.dims.nx + x] = 1;
                }
            }
        }
        masks.push_back(std::move(mask));
    }

    const std::size_t n_total =
        static_cast<std::size_t>(cfg.n_control) + static_cast<std::size_t>(cfg.n_mtbi);
    Dataset ds;
    ds.subjects.resize(n_total);

    parallel_for(n_total, workers, [&](std::size_t idx) {
        const bool mtbi = idx >= static_cast<std::size_t>(cfg.n_control);
        const Cohort cohort = mtbi ? Cohort::Mtbi : Cohort::Control;
        const std::size_t within =
            mtbi ? idx - static_cast<std::size_t>(cfg.n_control) : idx;

        SubjectEntry& subj = ds.subjects[idx];
        char sid[16];
        std::snprintf(sid, sizeof sid, "%s%03zu", mtbi ? "mtbi" : "ctrl", within + 1);
        subj.clinical.subject_id = sid;
        subj.clinical.label = mtbi ? 1 : 0;

        // Keyed by within-cohort index so the two cohorts draw identical
        // clinical values; clinical columns carry no group signal.
        Rng crng(derive_stream(cfg.seed, {kTagClinical, within}));
        subj.clinical.age = 20.0 + 40.0 * crng.next_double();
        subj.clinical.sex = static_cast<int>(crng.next_u64() & 1);
        subj.clinical.stroop = 40.0 + 20.0 * crng.next_double();
        subj.clinical.sdmt = 35.0 + 20.0 * crng.next_double();
        subj.clinical.cvlt = 45.0 + 20.0 * crng.next_double();
        subj.clinical.fss = 2.0 + 4.0 * crng.next_double();

        for (MetricId m : metrics) {
            auto vol = std::make_shared<MetricVolume>();
            vol->subject_id = subj.clinical.subject_id;
            vol->metric = m;
            vol->dims = cfg.dims;
            vol->voxels.resize(cfg.dims.total());

            Rng noise(derive_stream(cfg.seed, {kTagNoise, idx,
                                               static_cast<std::uint64_t>(m)}));
            for (double& v : vol->voxels) {
                v = kBackgroundMean + cfg.noise_sigma * noise.next_symmetric();
            }

            for (std::size_t t = 0; t < regions.size(); ++t) {
                auto [y0, x0] = tile_origin(t);
                double mu = region_mean(m, t) + (mtbi ? cfg.mean_shift : 0.0);
                for (std::size_t z = 0; z < cfg.dims.nz; ++z) {
                    Rng srng(derive_stream(
                        cfg.seed, {kTagSign, idx, static_cast<std::uint64_t>(m),
                                   static_cast<std::uint64_t>(regions[t]), z}));
                    double sign = (srng.next_u64() & 1) ? 1.0 : -1.0;
                    double amp = kTextureAmp * cfg.texture_contrast * sign;
                    for (std::size_t ly = 0; ly < kTile; ++ly) {
                        for (std::size_t lx = 0; lx < kTile; ++lx) {
                            std::size_t i =
                                (z * cfg.dims.ny + y0 + ly) * cfg.dims.nx + x0 + lx;
                            vol->voxels[i] += mu - kBackgroundMean +
                                              amp * pattern_value(cohort, ly, lx);
                        }
                    }
                }
            }

            std::shared_ptr<const MetricVolume> shared = vol;
            for (std::size_t t = 0; t < regions.size(); ++t) {
                auto allowed = metrics_for_region(regions[t], metrics);
                if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) {
                    continue;
                }
                subj.data[{m, regions[t]}] = KeyData{shared, masks[t]};
            }
        }
    });

    ds.validate();
    return ds;
}

}  // namespace mribow
