#include "mribow/pipeline.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mribow/codebook.hpp"
#include "mribow/error.hpp"
#include "mribow/hash.hpp"
#include "mribow/io.hpp"
#include "mribow/parallel.hpp"
#include "mribow/report.hpp"
#include "mribow/rng.hpp"
#include "mribow/selection.hpp"
#include "mribow/synth.hpp"

namespace mribow {

using nlohmann::json;

namespace {

constexpr std::uint64_t kSeedSynth = 1;
constexpr std::uint64_t kSeedKmeans = 2;
constexpr std::uint64_t kSeedCv = 3;
constexpr std::uint64_t kSeedHonest = 4;
constexpr std::uint64_t kSeedRatio = 5;

namespace fs = std::filesystem;

// Lines of the canonical config whose key starts with one of the prefixes.
std::string config_slice(const RunConfig& cfg,
                         std::initializer_list<std::string_view> prefixes) {
    std::istringstream is(canonical_config(cfg));
    std::string line, out;
    while (std::getline(is, line)) {
        for (auto p : prefixes) {
            if (std::string_view(line).starts_with(p)) {
                out += line;
                out += '\n';
                break;
            }
        }
    }
    return out;
}

std::string fingerprint_of(const std::string& slice, const std::string& upstream) {
    return to_hex(fnv1a64(slice + "|" + upstream));
}

// Content fingerprint of an externally supplied dataset directory.
std::string dataset_fingerprint(const fs::path& dir) {
    if (!fs::exists(dir / "manifest.json")) {
        throw DataError("dataset directory '" + dir.string() + "' has no manifest.json");
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::string acc;
    for (const auto& f : files) {
        acc += fs::relative(f, dir).generic_string();
        acc += ':';
        acc += to_hex(fnv1a64_file(f));
        acc += '\n';
    }
    return to_hex(fnv1a64(acc));
}

std::optional<StageOutcome> try_reuse(const RunConfig& cfg, const std::string& name,
                                      const std::string& fp) {
    fs::path stage_path = cfg.out_dir / (name + ".stage.json");
    if (!fs::exists(stage_path)) return std::nullopt;
    json j = json::parse(read_text_file(stage_path), nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    if (!j.contains("fingerprint") || j["fingerprint"] != fp) return std::nullopt;
    StageOutcome out;
    out.fingerprint = fp;
    out.reused = true;
    for (const auto& f : j.at("files")) {
        fs::path p = f.get<std::string>();
        if (!fs::exists(cfg.out_dir / p)) return std::nullopt;
        out.files.push_back(p);
    }
    return out;
}

void write_stage(const RunConfig& cfg, const std::string& name, const StageOutcome& o) {
    json j;
    j["fingerprint"] = o.fingerprint;
    json files = json::array();
    for (const auto& f : o.files) files.push_back(f.generic_string());
    j["files"] = std::move(files);
    write_text_file(cfg.out_dir / (name + ".stage.json"), j.dump(2) + "\n");
}

std::vector<FeatureKey> bow_keys(const Dataset& ds) {
    std::vector<FeatureKey> keys;
    for (FeatureKey k : ds.keys()) {
        if (is_bow_region(k.region)) keys.push_back(k);
    }
    if (keys.empty()) throw DataError("dataset has no BoW-region keys");
    return keys;
}

KMeansConfig kmeans_config(const RunConfig& cfg, std::uint64_t tag) {
    KMeansConfig km = cfg.kmeans;
    km.seed = derive_stream(cfg.seed, {tag});
    return km;
}

CvConfig cv_config(const RunConfig& cfg) {
    CvConfig cv = cfg.cv;
    cv.seed = derive_stream(cfg.seed, {kSeedCv});
    return cv;
}

SelectionTrace load_trace(const RunConfig& cfg) {
    return load_selection_trace(cfg.out_dir / "selection.json");
}

// Shared by stage_select and stage_evaluate: the scoring problem under the
// configured codebook protocol.
CvProblem build_problem(const RunConfig& cfg, const FeatureTable& features) {
    CvConfig cv = cv_config(cfg);
    if (cfg.mode == "bow" && cfg.honest_codebooks) {
        Dataset ds = load_dataset(cfg.dataset_path());
        PatchIndex idx = extract_all(ds, bow_keys(ds), cfg.patch, cfg.workers);
        FeatureLayout layout =
            FeatureLayout::for_keys(bow_keys(ds), 2 * cfg.k_per_cohort);
        return make_honest_bow_problem(ds, idx, layout, cfg.k_per_cohort,
                                       kmeans_config(cfg, kSeedHonest),
                                       cfg.normalized_histograms, cv, cfg.workers);
    }
    return make_cv_problem(features.x, features.labels, cv);
}

json cv_json(const GridResult& grid, const CvResult& cv) {
    json j;
    j["c"] = grid.c;
    j["gamma"] = grid.gamma;
    j["mean_accuracy"] = cv.mean_accuracy;
    if (cv.mean_sensitivity) j["mean_sensitivity"] = *cv.mean_sensitivity;
    if (cv.mean_specificity) j["mean_specificity"] = *cv.mean_specificity;
    j["tp"] = cv.totals.tp;
    j["fp"] = cv.totals.fp;
    j["tn"] = cv.totals.tn;
    j["fn"] = cv.totals.fn;
    return j;
}

}  // namespace

CvProblem make_honest_bow_problem(const Dataset& ds, const PatchIndex& idx,
                                  const FeatureLayout& layout, int k_per_cohort,
                                  const KMeansConfig& km, bool normalized,
                                  const CvConfig& cv, unsigned workers) {
    std::vector<int> labels = ds.labels();
    std::vector<ClinicalRecord> clinical;
    clinical.reserve(ds.subjects.size());
    for (const auto& s : ds.subjects) clinical.push_back(s.clinical);

    CvProblem p;
    p.splits = make_splits(labels, cv);
    p.labels = labels;
    p.per_repeat.resize(p.splits.size());
    parallel_for(p.splits.size(), workers, [&](std::size_t r) {
        KMeansConfig km_r = km;
        km_r.seed = derive_stream(km.seed, {r});
        auto codebooks =
            learn_codebooks(idx, labels, p.splits[r].train, k_per_cohort, km_r, 1);
        p.per_repeat[r] =
            encode_subjects(idx, clinical, codebooks, layout, normalized, 1).x;
    });
    p.validate();
    return p;
}

StageOutcome stage_synth(const RunConfig& cfg) {
    cfg.validate();
    if (!cfg.synth_enabled) {
        StageOutcome out;
        out.fingerprint = "ext-" + dataset_fingerprint(cfg.dataset_path());
        out.reused = true;
        return out;
    }
    std::string fp =
        fingerprint_of(config_slice(cfg, {"seed", "synth."}), "root");
    if (auto reused = try_reuse(cfg, "synth", fp)) return *reused;

    SynthConfig scfg = cfg.synth;
    scfg.seed = derive_stream(cfg.seed, {kSeedSynth});
    Dataset ds = generate(scfg, cfg.workers);
    fs::path dir = cfg.dataset_path();
    save_dataset(ds, dir);

    StageOutcome out;
    out.fingerprint = fp;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            out.files.push_back(fs::relative(e.path(), cfg.out_dir));
        }
    }
    std::sort(out.files.begin(), out.files.end());
    write_stage(cfg, "synth", out);
    return out;
}

StageOutcome stage_extract(const RunConfig& cfg) {
    StageOutcome up = stage_synth(cfg);
    std::string fp =
        fingerprint_of(config_slice(cfg, {"patch."}), up.fingerprint);
    if (auto reused = try_reuse(cfg, "extract", fp)) return *reused;

    Dataset ds = load_dataset(cfg.dataset_path());
    PatchIndex idx = extract_all(ds, bow_keys(ds), cfg.patch, cfg.workers);
    std::vector<Patch> flat;
    for (const auto& per_key : idx.per_subject) {
        for (const auto& [key, patches] : per_key) {
            flat.insert(flat.end(), patches.begin(), patches.end());
        }
    }
    write_patch_csv(flat, cfg.patch.size, cfg.out_dir / "patches.csv");

    StageOutcome out;
    out.fingerprint = fp;
    out.files = {"patches.csv"};
    write_stage(cfg, "extract", out);
    return out;
}

StageOutcome stage_codebook(const RunConfig& cfg) {
    StageOutcome up = stage_extract(cfg);
    std::string fp = fingerprint_of(
        config_slice(cfg, {"codebook.", "kmeans.", "seed"}), up.fingerprint);
    if (auto reused = try_reuse(cfg, "codebook", fp)) return *reused;

    Dataset ds = load_dataset(cfg.dataset_path());
    PatchIndex idx = extract_all(ds, bow_keys(ds), cfg.patch, cfg.workers);
    std::vector<std::size_t> all(ds.subjects.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    auto codebooks = learn_codebooks(idx, ds.labels(), all, cfg.k_per_cohort,
                                     kmeans_config(cfg, kSeedKmeans), cfg.workers);

    StageOutcome out;
    out.fingerprint = fp;
    for (const auto& [key, cb] : codebooks) {
        fs::path rel = fs::path("codebooks") / codebook_filename(key);
        save_codebook(cb, cfg.out_dir / rel);
        out.files.push_back(rel);
    }
    write_stage(cfg, "codebook", out);
    return out;
}

StageOutcome stage_encode(const RunConfig& cfg) {
    StageOutcome up =
        cfg.mode == "bow" ? stage_codebook(cfg) : stage_synth(cfg);
    std::string fp = fingerprint_of(
        config_slice(cfg, {"encode.", "mode", "baseline."}), up.fingerprint);
    if (auto reused = try_reuse(cfg, "encode", fp)) return *reused;

    Dataset ds = load_dataset(cfg.dataset_path());
    FeatureTable table;
    if (cfg.mode == "bow") {
        auto keys = bow_keys(ds);
        std::map<FeatureKey, Codebook> codebooks;
        for (FeatureKey k : keys) {
            codebooks[k] =
                load_codebook(cfg.out_dir / "codebooks" / codebook_filename(k));
        }
        PatchIndex idx = extract_all(ds, keys, cfg.patch, cfg.workers);
        std::vector<ClinicalRecord> clinical;
        for (const auto& s : ds.subjects) clinical.push_back(s.clinical);
        FeatureLayout layout = FeatureLayout::for_keys(keys, 2 * cfg.k_per_cohort);
        table = encode_subjects(idx, clinical, codebooks, layout,
                                cfg.normalized_histograms, cfg.workers);
    } else {
        table = mean_baseline_features(ds, cfg.baseline_regions);
    }
    save_feature_csv(table, cfg.out_dir / "features.csv");

    StageOutcome out;
    out.fingerprint = fp;
    out.files = {"features.csv"};
    write_stage(cfg, "encode", out);
    return out;
}

StageOutcome stage_select(const RunConfig& cfg) {
    StageOutcome up = stage_encode(cfg);
    std::string fp = fingerprint_of(
        config_slice(cfg, {"cv.", "grid.", "svm.", "select.", "honest_codebooks",
                           "codebook.", "kmeans.", "seed"}),
        up.fingerprint);
    if (auto reused = try_reuse(cfg, "select", fp)) return *reused;

    FeatureTable features = load_feature_csv(cfg.out_dir / "features.csv");
    CvProblem problem = build_problem(cfg, features);

    SelectionConfig scfg;
    scfg.max_size = cfg.select_max_size;
    scfg.grid = cfg.grid;
    scfg.base = cfg.svm;
    SelectionTrace trace =
        greedy_forward_select(problem, features.names, scfg, cfg.workers);
    save_selection_trace(trace, cfg.out_dir / "selection.json");
    write_selection_csv(trace, cfg.out_dir / "selection.csv");

    StageOutcome out;
    out.fingerprint = fp;
    out.files = {"selection.json", "selection.csv"};
    write_stage(cfg, "select", out);
    return out;
}

StageOutcome stage_evaluate(const RunConfig& cfg) {
    StageOutcome up = stage_select(cfg);
    std::string fp =
        fingerprint_of(config_slice(cfg, {"eval."}), up.fingerprint);
    if (auto reused = try_reuse(cfg, "evaluate", fp)) return *reused;

    FeatureTable features = load_feature_csv(cfg.out_dir / "features.csv");
    SelectionTrace trace = load_trace(cfg);
    CvProblem problem = build_problem(cfg, features);

    std::vector<std::size_t> selected = trace.chosen();
    std::vector<std::size_t> all_cols(features.x.cols);
    for (std::size_t i = 0; i < all_cols.size(); ++i) all_cols[i] = i;
    const std::vector<std::size_t>& final_cols =
        selected.empty() ? all_cols : selected;

    GridResult sel_grid = grid_search(problem, final_cols, cfg.grid, cfg.svm,
                                      cfg.workers);
    SvmSpec sel_spec = cfg.svm;
    sel_spec.c = sel_grid.c;
    sel_spec.gamma = sel_grid.gamma;
    CvResult sel_cv = evaluate_cv(problem, final_cols, sel_spec, cfg.workers);

    GridResult full_grid =
        grid_search(problem, all_cols, cfg.grid, cfg.svm, cfg.workers);
    SvmSpec full_spec = cfg.svm;
    full_spec.c = full_grid.c;
    full_spec.gamma = full_grid.gamma;
    CvResult full_cv = evaluate_cv(problem, all_cols, full_spec, cfg.workers);

    StageOutcome out;
    out.fingerprint = fp;
    auto emit = [&](const fs::path& rel) { out.files.push_back(rel); };

    if (!trace.steps.empty()) {
        auto curve = subset_size_curve(trace);
        write_subset_curve_csv(curve, cfg.out_dir / "subset_curve.csv");
        emit("subset_curve.csv");
        ChartSeries s{"cv accuracy", {}};
        for (const auto& row : curve) {
            s.points.emplace_back(static_cast<double>(row.size), row.accuracy);
        }
        write_line_chart(cfg.out_dir / "subset_curve.svg",
                         "Accuracy by feature subset size", "subset size",
                         "mean CV accuracy", {s});
        emit("subset_curve.svg");
    }

    {
        Matrix sub(features.x.rows, final_cols.size());
        for (std::size_t r = 0; r < sub.rows; ++r) {
            for (std::size_t c = 0; c < final_cols.size(); ++c) {
                sub.at(r, c) = features.x.at(r, final_cols[c]);
            }
        }
        CvConfig rc = cv_config(cfg);
        rc.seed = derive_stream(cfg.seed, {kSeedRatio});
        auto rows = training_ratio_curve(sub, features.labels, cfg.eval_ratios, rc,
                                         sel_spec, cfg.workers);
        write_ratio_curve_csv(rows, cfg.out_dir / "ratio_curve.csv");
        emit("ratio_curve.csv");
        ChartSeries acc{"accuracy", {}}, sens{"sensitivity", {}}, spec{"specificity", {}};
        for (const auto& row : rows) {
            acc.points.emplace_back(row.ratio, row.accuracy);
            if (row.sensitivity) sens.points.emplace_back(row.ratio, *row.sensitivity);
            if (row.specificity) spec.points.emplace_back(row.ratio, *row.specificity);
        }
        write_line_chart(cfg.out_dir / "ratio_curve.svg",
                         "Accuracy by training ratio", "training ratio", "mean value",
                         {acc, sens, spec});
        emit("ratio_curve.svg");
    }

    {
        auto rows = cohort_histogram_contrast(features.x, features.labels,
                                              features.names);
        write_contrast_csv(rows, cfg.out_dir / "contrast.csv");
        emit("contrast.csv");
        ChartSeries diff{"mtbi - control", {}};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            diff.points.emplace_back(static_cast<double>(i), rows[i].difference);
        }
        write_line_chart(cfg.out_dir / "contrast.svg",
                         "Cohort mean feature difference", "feature index",
                         "mean difference", {diff});
        emit("contrast.svg");
    }

    if (cfg.mode == "bow") {
        Dataset ds = load_dataset(cfg.dataset_path());
        for (FeatureKey k : bow_keys(ds)) {
            Codebook cb =
                load_codebook(cfg.out_dir / "codebooks" / codebook_filename(k));
            for (const auto& p : render_words(cb, cfg.out_dir / "words")) {
                emit(fs::relative(p, cfg.out_dir));
            }
        }
    }

    {
        Matrix sub(features.x.rows, final_cols.size());
        for (std::size_t r = 0; r < sub.rows; ++r) {
            for (std::size_t c = 0; c < final_cols.size(); ++c) {
                sub.at(r, c) = features.x.at(r, final_cols[c]);
            }
        }
        Scaler scaler = scaler_fit(sub);
        Matrix scaled = scaler_apply(scaler, sub);
        std::vector<int> y;
        for (int v : features.labels) y.push_back(v == 1 ? 1 : -1);
        SvmModel model = svm_train(scaled, y, sel_spec);
        save_model(model, cfg.out_dir / "model.json");
        emit("model.json");
        json js;
        js["mean"] = scaler.mean;
        js["sd"] = scaler.sd;
        json names = json::array();
        for (std::size_t c : final_cols) names.push_back(features.names[c]);
        js["features"] = std::move(names);
        write_text_file(cfg.out_dir / "scaler.json", js.dump(2) + "\n");
        emit("scaler.json");
    }

    json metrics;
    metrics["mode"] = cfg.mode;
    metrics["honest_codebooks"] = cfg.honest_codebooks;
    metrics["n_subjects"] = features.x.rows;
    metrics["n_features"] = features.x.cols;
    json sel_names = json::array();
    for (std::size_t c : final_cols) sel_names.push_back(features.names[c]);
    metrics["selected"] = std::move(sel_names);
    metrics["selected_cv"] = cv_json(sel_grid, sel_cv);
    metrics["full_cv"] = cv_json(full_grid, full_cv);
    write_text_file(cfg.out_dir / "metrics.json", metrics.dump(2) + "\n");
    emit("metrics.json");

    write_stage(cfg, "evaluate", out);
    return out;
}

StageOutcome run_pipeline(const RunConfig& cfg) { return stage_evaluate(cfg); }

void write_run_json(const RunConfig& cfg) {
    json j;
    j["config"] = canonical_config(cfg);
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    json artifacts = json::object();
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(cfg.out_dir)) {
        if (!e.is_regular_file()) continue;
        fs::path rel = fs::relative(e.path(), cfg.out_dir);
        if (rel == "run.json") continue;
        files.push_back(rel);
    }
    std::sort(files.begin(), files.end());
    for (const auto& rel : files) {
        artifacts[rel.generic_string()] = to_hex(fnv1a64_file(cfg.out_dir / rel));
    }
    j["artifacts"] = std::move(artifacts);
    write_text_file(cfg.out_dir / "run.json", j.dump(2) + "\n");
}

}  // namespace mribow
