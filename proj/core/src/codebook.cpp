#include "mribow/codebook.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mribow/error.hpp"
#include "mribow/io.hpp"
#include "mribow/parallel.hpp"

namespace mribow {

using nlohmann::json;

void Codebook::validate() const {
    if (words.empty()) throw DataError("codebook: no words");
    if (provenance.size() != words.size()) {
        throw DataError("codebook: provenance/word count mismatch");
    }
    const std::size_t dim = words.front().size();
    for (const auto& w : words) {
        if (w.size() != dim) throw DataError("codebook: words of unequal dimension");
        for (double v : w) {
            if (!std::isfinite(v)) throw DataError("codebook: non-finite word value");
        }
    }
}

Codebook learn_codebook(const std::vector<Patch>& patches_control,
                        const std::vector<Patch>& patches_mtbi, FeatureKey key,
                        int k_per_cohort, const KMeansConfig& cfg,
                        unsigned workers) {
    if (k_per_cohort < 1) throw ConfigError("learn_codebook: k_per_cohort must be >= 1");
    auto check = [&](const std::vector<Patch>& ps, Cohort c) {
        if (ps.size() < static_cast<std::size_t>(k_per_cohort)) {
            throw DataError("learn_codebook: cohort " + std::string(to_string(c)) +
                            " has " + std::to_string(ps.size()) + " patches for " +
                            to_string(key) + ", need >= " +
                            std::to_string(k_per_cohort));
        }
    };
    check(patches_control, Cohort::Control);
    check(patches_mtbi, Cohort::Mtbi);

    auto points_of = [](const std::vector<Patch>& ps) {
        std::vector<std::vector<double>> pts;
        pts.reserve(ps.size());
        for (const auto& p : ps) pts.push_back(p.values);
        return pts;
    };

    KMeansConfig run = cfg;
    run.k = k_per_cohort;
    auto control = kmeans(points_of(patches_control), run, workers);
    auto mtbi = kmeans(points_of(patches_mtbi), run, workers);

    Codebook cb;
    cb.key = key;
    for (auto& w : control.centroids) {
        cb.words.push_back(std::move(w));
        cb.provenance.push_back(Cohort::Control);
    }
    for (auto& w : mtbi.centroids) {
        cb.words.push_back(std::move(w));
        cb.provenance.push_back(Cohort::Mtbi);
    }
    cb.validate();
    return cb;
}

std::size_t nearest_word(const std::vector<double>& v, const Codebook& cb) {
    if (cb.words.empty()) throw DataError("nearest_word: empty codebook");
    if (v.size() != cb.words.front().size()) {
        throw DataError("nearest_word: dimension mismatch");
    }
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cb.words.size(); ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            double t = v[j] - cb.words[i][j];
            d += t * t;
        }
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::map<FeatureKey, Codebook> learn_codebooks(
    const PatchIndex& idx, const std::vector<int>& labels,
    const std::vector<std::size_t>& train_subjects, int k_per_cohort,
    const KMeansConfig& cfg, unsigned workers) {
    if (labels.size() != idx.per_subject.size()) {
        throw DataError("learn_codebooks: label/subject count mismatch");
    }

    std::vector<FeatureKey> keys;
    if (!idx.per_subject.empty()) {
        for (const auto& [key, patches] : idx.per_subject.front()) {
            if (is_bow_region(key.region)) keys.push_back(key);
        }
    }

    std::vector<Codebook> out(keys.size());
    parallel_for(keys.size(), workers, [&](std::size_t i) {
        std::vector<Patch> control, mtbi;
        for (std::size_t s : train_subjects) {
            if (s >= idx.per_subject.size()) {
                throw DataError("learn_codebooks: subject index out of range");
            }
            auto it = idx.per_subject[s].find(keys[i]);
            if (it == idx.per_subject[s].end()) continue;
            auto& dst = labels[s] == 0 ? control : mtbi;
            dst.insert(dst.end(), it->second.begin(), it->second.end());
        }
        out[i] = learn_codebook(control, mtbi, keys[i], k_per_cohort, cfg, 1);
    });

    std::map<FeatureKey, Codebook> result;
    for (std::size_t i = 0; i < keys.size(); ++i) result[keys[i]] = std::move(out[i]);
    return result;
}

std::string codebook_filename(FeatureKey key) {
    return std::string(to_string(key.metric)) + "_" +
           std::string(to_string(key.region)) + ".codebook.json";
}

void save_codebook(const Codebook& cb, const std::filesystem::path& path) {
    cb.validate();
    json j;
    j["metric"] = to_string(cb.key.metric);
    j["region"] = to_string(cb.key.region);
    j["k_total"] = cb.k_total();
    json prov = json::array();
    for (Cohort c : cb.provenance) prov.push_back(to_string(c));
    j["provenance"] = std::move(prov);
    j["words"] = cb.words;
    write_text_file(path, j.dump(2) + "\n");
}

Codebook load_codebook(const std::filesystem::path& path) {
    json j = json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded()) throw DataError("malformed JSON in '" + path.string() + "'");
    Codebook cb;
    try {
        cb.key.metric = parse_metric(j.at("metric").get<std::string>());
        cb.key.region = parse_region(j.at("region").get<std::string>());
        for (const auto& p : j.at("provenance")) {
            cb.provenance.push_back(parse_cohort(p.get<std::string>()));
        }
        cb.words = j.at("words").get<std::vector<std::vector<double>>>();
        if (j.at("k_total").get<std::size_t>() != cb.words.size()) {
            throw DataError("codebook: k_total does not match word count");
        }
    } catch (const json::exception& e) {
        throw DataError("bad codebook file '" + path.string() + "': " + e.what());
    }
    cb.validate();
    return cb;
}

}  // namespace mribow
