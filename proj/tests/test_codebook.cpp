#include <doctest.h>

#include <cmath>

#include "mribow/codebook.hpp"
#include "mribow/error.hpp"
#include "mribow/patch.hpp"
#include "mribow/synth.hpp"
#include "support/tempdir.hpp"

using namespace mribow;
using mribow::test::TempDir;

namespace {

Patch make_patch(std::vector<double> values) {
    Patch p;
    p.values = std::move(values);
    p.key = {MetricId::FA, RegionId::CorpusCallosum};
    p.subject_id = "x";
    return p;
}

std::vector<Patch> cluster_around(double a, double b, int per_cluster) {
    std::vector<Patch> out;
    for (int i = 0; i < per_cluster; ++i) {
        double jitter = 0.01 * i;
        out.push_back(make_patch({a + jitter, a - jitter}));
        out.push_back(make_patch({b + jitter, b - jitter}));
    }
    return out;
}

}  // namespace

TEST_SUITE("codebook") {

TEST_CASE("words keep cohort provenance, control first") {
    auto ctrl = cluster_around(0.0, 1.0, 4);
    auto mtbi = cluster_around(5.0, 6.0, 4);
    KMeansConfig cfg;
    cfg.seed = 3;
    FeatureKey key{MetricId::FA, RegionId::CorpusCallosum};
    Codebook cb = learn_codebook(ctrl, mtbi, key, 2, cfg);
    cb.validate();
    REQUIRE(cb.k_total() == 4);
    CHECK(cb.provenance == std::vector<Cohort>{Cohort::Control, Cohort::Control,
                                               Cohort::Mtbi, Cohort::Mtbi});
    // control words near 0 and 1, mtbi words near 5 and 6
    CHECK(cb.words[0][0] == doctest::Approx(0.015).epsilon(0.5));
    CHECK(cb.words[1][0] == doctest::Approx(1.015).epsilon(0.5));
    CHECK(cb.words[2][0] == doctest::Approx(5.015).epsilon(0.5));
    CHECK(cb.words[3][0] == doctest::Approx(6.015).epsilon(0.5));
}

TEST_CASE("identical cohort patches give identical word blocks") {
    auto patches = cluster_around(0.0, 2.0, 3);
    KMeansConfig cfg;
    cfg.seed = 11;
    FeatureKey key{MetricId::MD, RegionId::Thalamus};
    Codebook cb = learn_codebook(patches, patches, key, 2, cfg);
    REQUIRE(cb.k_total() == 4);
    CHECK(cb.words[0] == cb.words[2]);
    CHECK(cb.words[1] == cb.words[3]);
}

TEST_CASE("nearest word breaks ties toward the lower index") {
    Codebook cb;
    cb.key = {MetricId::FA, RegionId::CorpusCallosum};
    cb.words = {{0.0}, {2.0}, {2.0}};
    cb.provenance = {Cohort::Control, Cohort::Control, Cohort::Mtbi};
    CHECK(nearest_word({1.0}, cb) == 0);  // exact tie with word 1
    CHECK(nearest_word({1.9}, cb) == 1);  // tie between equal words 1 and 2
    CHECK(nearest_word({-5.0}, cb) == 0);
}

TEST_CASE("empty cohort patch list is a data error") {
    auto ctrl = cluster_around(0.0, 1.0, 3);
    KMeansConfig cfg;
    FeatureKey key{MetricId::FA, RegionId::CorpusCallosum};
    CHECK_THROWS_AS(learn_codebook(ctrl, {}, key, 2, cfg), DataError);
    CHECK_THROWS_AS(learn_codebook({}, ctrl, key, 2, cfg), DataError);
}

TEST_CASE("json round-trip preserves every word exactly") {
    TempDir tmp;
    auto ctrl = cluster_around(0.1, 0.9, 4);
    auto mtbi = cluster_around(0.4, 1.7, 4);
    KMeansConfig cfg;
    cfg.seed = 21;
    FeatureKey key{MetricId::AK, RegionId::Thalamus};
    Codebook cb = learn_codebook(ctrl, mtbi, key, 2, cfg);
    CHECK(codebook_filename(key) == "AK_Thalamus.codebook.json");
    save_codebook(cb, tmp / codebook_filename(key));
    Codebook back = load_codebook(tmp / codebook_filename(key));
    CHECK(back.key == cb.key);
    CHECK(back.words == cb.words);
    CHECK(back.provenance == cb.provenance);
}

TEST_CASE("learn_codebooks uses only the requested training subjects") {
    SynthConfig cfg;
    cfg.n_control = 3;
    cfg.n_mtbi = 3;
    cfg.dims = {2, 32, 32};
    cfg.metrics = {MetricId::FA};
    cfg.regions = {RegionId::CorpusCallosum, RegionId::Thalamus};
    cfg.seed = 9;
    Dataset ds = generate(cfg);
    auto idx = extract_all(ds, ds.keys(), PatchConfig{});
    auto labels = ds.labels();

    KMeansConfig km;
    km.seed = 4;
    auto full = learn_codebooks(idx, labels, {0, 1, 2, 3, 4, 5}, 2, km);
    auto sub = learn_codebooks(idx, labels, {0, 1, 3, 4}, 2, km);
    REQUIRE(full.size() == 2);
    REQUIRE(sub.size() == 2);
    FeatureKey key{MetricId::FA, RegionId::CorpusCallosum};
    CHECK(full.at(key).words != sub.at(key).words);

    // training set with a single cohort cannot build per-cohort books
    CHECK_THROWS_AS(learn_codebooks(idx, labels, {0, 1, 2}, 2, km), DataError);
}

TEST_CASE("texture cohorts produce a distinctive mtbi word") {
    SynthConfig cfg;
    cfg.n_control = 4;
    cfg.n_mtbi = 4;
    cfg.dims = {2, 32, 32};
    cfg.metrics = {MetricId::FA};
    cfg.regions = {RegionId::CorpusCallosum};
    cfg.texture_contrast = 1.0;
    cfg.noise_sigma = 0.02;
    cfg.seed = 17;
    Dataset ds = generate(cfg);
    auto idx = extract_all(ds, ds.keys(), PatchConfig{});
    KMeansConfig km;
    km.seed = 30;
    auto books = learn_codebooks(idx, ds.labels(), {0, 1, 2, 3, 4, 5, 6, 7}, 2, km);
    const Codebook& cb = books.begin()->second;

    // stripe and checkerboard words differ by ~2*amp on half the pixels;
    // require at least one mtbi word beyond half that floor from every
    // control word
    double amp = 0.2 * cfg.texture_contrast;
    double floor_dist = 0.5 * std::sqrt(2.0 * 256.0) * amp;
    double best = 0.0;
    for (std::size_t wm = 0; wm < cb.k_total(); ++wm) {
        if (cb.provenance[wm] != Cohort::Mtbi) continue;
        double nearest = 1e300;
        for (std::size_t wc = 0; wc < cb.k_total(); ++wc) {
            if (cb.provenance[wc] != Cohort::Control) continue;
            double d2 = 0.0;
            for (std::size_t i = 0; i < cb.words[wm].size(); ++i) {
                double d = cb.words[wm][i] - cb.words[wc][i];
                d2 += d * d;
            }
            nearest = std::min(nearest, std::sqrt(d2));
        }
        best = std::max(best, nearest);
    }
    CHECK(best > floor_dist);
}

}  // TEST_SUITE codebook
