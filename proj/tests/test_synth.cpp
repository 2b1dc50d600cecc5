#include <doctest.h>

#include <cmath>
#include <set>

#include "mribow/error.hpp"
#include "mribow/synth.hpp"

using namespace mribow;

namespace {

double roi_mean(const SubjectEntry& subj, FeatureKey key) {
    const auto& kd = subj.data.at(key);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < kd.volume->voxels.size(); ++i) {
        if (kd.mask->bits[i]) {
            sum += kd.volume->voxels[i];
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("generation is deterministic and worker-independent") {
    SynthConfig cfg;
    cfg.n_control = 3;
    cfg.n_mtbi = 3;
    cfg.dims = {2, 48, 32};
    cfg.seed = 77;
    Dataset a = generate(cfg, 1);
    Dataset b = generate(cfg, 4);
    REQUIRE(a.subjects.size() == b.subjects.size());
    for (std::size_t s = 0; s < a.subjects.size(); ++s) {
        CHECK(a.subjects[s].clinical.subject_id == b.subjects[s].clinical.subject_id);
        CHECK(a.subjects[s].clinical.age == b.subjects[s].clinical.age);
        for (const auto& [key, kd] : a.subjects[s].data) {
            CHECK(kd.volume->voxels == b.subjects[s].data.at(key).volume->voxels);
            CHECK(kd.mask->bits == b.subjects[s].data.at(key).mask->bits);
        }
    }

    SynthConfig other = cfg;
    other.seed = 78;
    Dataset c = generate(other);
    FeatureKey key = a.keys().front();
    CHECK(a.subjects[0].data.at(key).volume->voxels !=
          c.subjects[0].data.at(key).volume->voxels);
}

TEST_CASE("cohort naming, labels and key set") {
    SynthConfig cfg;
    cfg.n_control = 2;
    cfg.n_mtbi = 3;
    cfg.dims = {1, 48, 48};
    Dataset ds = generate(cfg);
    REQUIRE(ds.subjects.size() == 5);
    CHECK(ds.subjects[0].clinical.subject_id == "ctrl001");
    CHECK(ds.subjects[1].clinical.subject_id == "ctrl002");
    CHECK(ds.subjects[2].clinical.subject_id == "mtbi001");
    CHECK(ds.subjects[4].clinical.subject_id == "mtbi003");
    CHECK(ds.labels() == std::vector<int>{0, 0, 1, 1, 1});

    // 9 metrics in CC and the four baseline regions, 5 in the thalamus
    auto keys = ds.keys();
    CHECK(keys.size() == 9 * 5 + 5);
    std::set<MetricId> thal;
    for (FeatureKey k : keys) {
        if (k.region == RegionId::Thalamus) thal.insert(k.metric);
    }
    CHECK(thal == std::set<MetricId>{MetricId::FA, MetricId::MD, MetricId::AK,
                                     MetricId::MK, MetricId::RK});
}

TEST_CASE("masks are disjoint 16x16 tile prisms") {
    SynthConfig cfg;
    cfg.n_control = 2;
    cfg.n_mtbi = 2;
    cfg.dims = {2, 48, 32};
    Dataset ds = generate(cfg);
    const auto& subj = ds.subjects[0];

    std::vector<const RoiMask*> masks;
    std::set<RegionId> seen;
    for (const auto& [key, kd] : subj.data) {
        if (seen.insert(key.region).second) masks.push_back(kd.mask.get());
    }
    REQUIRE(masks.size() == 6);

    std::vector<std::size_t> cover(cfg.dims.total(), 0);
    for (const RoiMask* m : masks) {
        std::size_t on = 0;
        for (std::size_t i = 0; i < m->bits.size(); ++i) {
            on += m->bits[i];
            cover[i] += m->bits[i];
        }
        CHECK(on == 16 * 16 * cfg.dims.nz);
    }
    for (std::size_t c : cover) CHECK(c <= 1);
}

TEST_CASE("roi means sit at the region level regardless of texture") {
    SynthConfig cfg;
    cfg.n_control = 20;
    cfg.n_mtbi = 20;
    cfg.dims = {2, 32, 32};
    cfg.metrics = {MetricId::FA};
    cfg.regions = {RegionId::CorpusCallosum, RegionId::Thalamus};
    cfg.texture_contrast = 1.0;
    cfg.noise_sigma = 0.05;
    cfg.seed = 5;
    Dataset ds = generate(cfg);

    FeatureKey key{MetricId::FA, RegionId::CorpusCallosum};
    double ctrl_sum = 0.0, mtbi_sum = 0.0;
    for (std::size_t s = 0; s < 20; ++s) ctrl_sum += roi_mean(ds.subjects[s], key);
    for (std::size_t s = 20; s < 40; ++s) mtbi_sum += roi_mean(ds.subjects[s], key);
    double ctrl_mean = ctrl_sum / 20, mtbi_mean = mtbi_sum / 20;

    // se of a cohort mean: sigma / sqrt(subjects * voxels per roi)
    double se = cfg.noise_sigma / std::sqrt(20.0 * 512.0);
    CHECK(std::abs(ctrl_mean - mtbi_mean) < 3.0 * std::sqrt(2.0) * se);

    SynthConfig shifted = cfg;
    shifted.mean_shift = 0.1;
    Dataset ds2 = generate(shifted);
    double shifted_sum = 0.0;
    for (std::size_t s = 20; s < 40; ++s) shifted_sum += roi_mean(ds2.subjects[s], key);
    CHECK(shifted_sum / 20 - ctrl_mean == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("cohorts carry different tile textures") {
    SynthConfig cfg;
    cfg.n_control = 2;
    cfg.n_mtbi = 2;
    cfg.dims = {1, 16, 16};
    cfg.metrics = {MetricId::FA};
    cfg.regions = {RegionId::CorpusCallosum};
    cfg.texture_contrast = 1.0;
    cfg.noise_sigma = 0.001;
    Dataset ds = generate(cfg);
    FeatureKey key{MetricId::FA, RegionId::CorpusCallosum};

    // stripes: column means alternate; checkerboard: column means are flat
    auto column_mean_var = [&](const SubjectEntry& subj) {
        const auto& vox = subj.data.at(key).volume->voxels;
        std::vector<double> col_mean(16, 0.0);
        for (std::size_t y = 0; y < 16; ++y) {
            for (std::size_t x = 0; x < 16; ++x) col_mean[x] += vox[y * 16 + x];
        }
        double mean = 0.0;
        for (double& c : col_mean) {
            c /= 16.0;
            mean += c;
        }
        mean /= 16.0;
        double var = 0.0;
        for (double c : col_mean) var += (c - mean) * (c - mean);
        return var / 16.0;
    };
    double amp = 0.2;
    CHECK(column_mean_var(ds.subjects[0]) > 0.5 * amp * amp);
    CHECK(column_mean_var(ds.subjects[1]) > 0.5 * amp * amp);
    CHECK(column_mean_var(ds.subjects[2]) < 0.1 * amp * amp);
    CHECK(column_mean_var(ds.subjects[3]) < 0.1 * amp * amp);
}

TEST_CASE("clinical draws are paired across cohorts") {
    SynthConfig cfg;
    cfg.n_control = 4;
    cfg.n_mtbi = 4;
    cfg.dims = {1, 32, 32};
    cfg.metrics = {MetricId::FA};
    cfg.regions = {RegionId::CorpusCallosum};
    Dataset ds = generate(cfg);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& c = ds.subjects[i].clinical;
        const auto& m = ds.subjects[4 + i].clinical;
        CHECK(c.age == m.age);
        CHECK(c.sex == m.sex);
        CHECK(c.stroop == m.stroop);
        CHECK(c.fss == m.fss);
        CHECK(c.label == 0);
        CHECK(m.label == 1);
    }
}

TEST_CASE("config validation") {
    SynthConfig cfg;
    cfg.n_control = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.dims = {1, 16, 32};  // 2 tiles for 6 regions
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.noise_sigma = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.metrics.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.dims = {1, 48, 32};  // 6 tiles, exactly enough
    CHECK_NOTHROW(cfg.validate());
}

}  // TEST_SUITE synth
