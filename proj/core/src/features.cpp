#include "mribow/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mribow/error.hpp"
#include "mribow/io.hpp"
#include "mribow/parallel.hpp"
#include "mribow/text.hpp"

namespace mribow {

namespace {

std::string word_name(FeatureKey key, int w) {
    std::string s(short_name(key.region));
    s += '.';
    s += to_string(key.metric);
    s += ".word";
    if (w < 10) s += '0';
    s += std::to_string(w);
    return s;
}

}  // namespace

std::size_t FeatureLayout::dim() const {
    std::size_t d = with_clinical ? kClinicalNames.size() : 0;
    for (const auto& b : blocks) d += static_cast<std::size_t>(b.k);
    return d;
}

std::vector<std::string> FeatureLayout::names() const {
    std::vector<std::string> out;
    out.reserve(dim());
    for (const auto& b : blocks) {
        for (int w = 0; w < b.k; ++w) out.push_back(word_name(b.key, w));
    }
    if (with_clinical) {
        for (auto n : kClinicalNames) out.push_back("clin." + std::string(n));
    }
    return out;
}

void FeatureLayout::validate() const {
    std::set<FeatureKey> seen;
    for (const auto& b : blocks) {
        if (b.k < 1) throw ConfigError("feature layout: block size must be >= 1");
        if (!is_bow_region(b.key.region)) {
            throw ConfigError("feature layout: region " +
                              std::string(to_string(b.key.region)) +
                              " is not a BoW region");
        }
        if (!seen.insert(b.key).second) {
            throw ConfigError("feature layout: duplicate key " + to_string(b.key));
        }
    }
}

FeatureLayout FeatureLayout::default_layout(int k_total) {
    std::vector<FeatureKey> keys;
    for (MetricId m : kAllMetrics) keys.push_back({m, RegionId::CorpusCallosum});
    for (MetricId m : {MetricId::FA, MetricId::MD, MetricId::AK, MetricId::MK,
                       MetricId::RK}) {
        keys.push_back({m, RegionId::Thalamus});
    }
    return for_keys(keys, k_total);
}

FeatureLayout FeatureLayout::for_keys(const std::vector<FeatureKey>& keys,
                                      int k_total, bool with_clinical) {
    FeatureLayout layout;
    layout.with_clinical = with_clinical;
    for (FeatureKey k : keys) layout.blocks.push_back({k, k_total});
    std::sort(layout.blocks.begin(), layout.blocks.end(),
              [](const Block& a, const Block& b) { return a.key < b.key; });
    layout.validate();
    return layout;
}

void FeatureTable::validate() const {
    if (ids.size() != labels.size() || ids.size() != x.rows) {
        throw DataError("feature table: row count mismatch");
    }
    if (names.size() != x.cols) throw DataError("feature table: column count mismatch");
}

std::vector<double> encode_histogram(const std::vector<Patch>& patches,
                                     const Codebook& cb, bool normalized) {
    if (patches.empty()) {
        throw DataError("no patches for key " + to_string(cb.key));
    }
    std::vector<double> h(cb.k_total(), 0.0);
    for (const auto& p : patches) h[nearest_word(p.values, cb)] += 1.0;
    if (normalized) {
        double total = static_cast<double>(patches.size());
        for (double& v : h) v /= total;
    }
    return h;
}

SubjectFeatureVector assemble_features(
    const std::map<FeatureKey, std::vector<double>>& histograms,
    const ClinicalRecord& clinical, const FeatureLayout& layout) {
    for (const auto& [key, hist] : histograms) {
        bool known = false;
        for (const auto& b : layout.blocks) known = known || b.key == key;
        if (!known) {
            throw DataError("assemble_features: key " + to_string(key) +
                            " not in layout");
        }
    }

    SubjectFeatureVector out;
    out.subject_id = clinical.subject_id;
    out.label = clinical.label;
    out.names = layout.names();
    out.values.reserve(layout.dim());
    for (const auto& b : layout.blocks) {
        auto it = histograms.find(b.key);
        if (it == histograms.end()) {
            throw DataError("assemble_features: missing histogram for " +
                            to_string(b.key));
        }
        if (it->second.size() != static_cast<std::size_t>(b.k)) {
            throw DataError("assemble_features: histogram for " + to_string(b.key) +
                            " has " + std::to_string(it->second.size()) +
                            " bins, layout expects " + std::to_string(b.k));
        }
        out.values.insert(out.values.end(), it->second.begin(), it->second.end());
    }
    if (layout.with_clinical) {
        for (double v : clinical_values(clinical)) out.values.push_back(v);
    }
    return out;
}

FeatureTable encode_subjects(const PatchIndex& idx,
                             const std::vector<ClinicalRecord>& clinical,
                             const std::map<FeatureKey, Codebook>& codebooks,
                             const FeatureLayout& layout, bool normalized,
                             unsigned workers) {
    if (clinical.size() != idx.per_subject.size()) {
        throw DataError("encode_subjects: clinical/subject count mismatch");
    }
    for (const auto& b : layout.blocks) {
        if (!codebooks.count(b.key)) {
            throw DataError("encode_subjects: no codebook for " + to_string(b.key));
        }
    }

    FeatureTable t;
    t.names = layout.names();
    t.x = Matrix(idx.per_subject.size(), layout.dim());
    t.ids.resize(clinical.size());
    t.labels.resize(clinical.size());

    parallel_for(clinical.size(), workers, [&](std::size_t s) {
        std::map<FeatureKey, std::vector<double>> hists;
        for (const auto& b : layout.blocks) {
            auto pit = idx.per_subject[s].find(b.key);
            const std::vector<Patch>* patches =
                pit == idx.per_subject[s].end() ? nullptr : &pit->second;
            if (!patches || patches->empty()) {
                throw DataError("no patches for key " + to_string(b.key) +
                                " (subject " + clinical[s].subject_id + ")");
            }
            hists[b.key] = encode_histogram(*patches, codebooks.at(b.key), normalized);
        }
        auto fv = assemble_features(hists, clinical[s], layout);
        t.ids[s] = fv.subject_id;
        t.labels[s] = fv.label;
        std::copy(fv.values.begin(), fv.values.end(), t.x.row(s).begin());
    });
    t.validate();
    return t;
}

FeatureTable mean_baseline_features(const Dataset& ds,
                                    const std::vector<RegionId>& regions) {
    std::set<RegionId> wanted(regions.begin(), regions.end());
    std::vector<FeatureKey> keys;
    for (FeatureKey k : ds.keys()) {
        if (wanted.count(k.region)) keys.push_back(k);
    }
    if (keys.empty()) throw DataError("mean_baseline_features: no matching keys");

    FeatureTable t;
    for (FeatureKey k : keys) {
        t.names.push_back("mean." + std::string(short_name(k.region)) + "." +
                          std::string(to_string(k.metric)));
    }
    for (auto n : kClinicalNames) t.names.push_back("clin." + std::string(n));

    t.x = Matrix(ds.subjects.size(), t.names.size());
    for (std::size_t s = 0; s < ds.subjects.size(); ++s) {
        const auto& subj = ds.subjects[s];
        t.ids.push_back(subj.clinical.subject_id);
        t.labels.push_back(subj.clinical.label);
        std::size_t col = 0;
        for (FeatureKey k : keys) {
            const auto& kd = subj.data.at(k);
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 0; i < kd.mask->bits.size(); ++i) {
                if (kd.mask->bits[i]) {
                    sum += kd.volume->voxels[i];
                    ++count;
                }
            }
            if (count == 0) {
                throw DataError("mean_baseline_features: empty mask for " +
                                to_string(k) + " (subject " +
                                subj.clinical.subject_id + ")");
            }
            t.x.at(s, col++) = sum / static_cast<double>(count);
        }
        for (double v : clinical_values(subj.clinical)) t.x.at(s, col++) = v;
    }
    t.validate();
    return t;
}

void save_feature_csv(const FeatureTable& t, const std::filesystem::path& path) {
    t.validate();
    std::ostringstream os;
    os << "subject_id,label";
    for (const auto& n : t.names) os << ',' << n;
    os << '\n';
    for (std::size_t r = 0; r < t.x.rows; ++r) {
        os << t.ids[r] << ',' << t.labels[r];
        for (std::size_t c = 0; c < t.x.cols; ++c) os << ',' << format_double(t.x.at(r, c));
        os << '\n';
    }
    write_text_file(path, os.str());
}

FeatureTable load_feature_csv(const std::filesystem::path& path) {
    std::string text = read_text_file(path);
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw DataError("empty feature CSV '" + path.string() + "'");
    auto header = split(line, ',');
    if (header.size() < 3 || header[0] != "subject_id" || header[1] != "label") {
        throw DataError("bad feature CSV header in '" + path.string() + "'");
    }

    FeatureTable t;
    for (std::size_t i = 2; i < header.size(); ++i) t.names.emplace_back(header[i]);

    std::vector<double> values;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != header.size()) {
            throw DataError("feature CSV row has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(header.size()));
        }
        t.ids.emplace_back(fields[0]);
        int label = static_cast<int>(parse_int_strict(fields[1]));
        if (label != 0 && label != 1) throw DataError("feature CSV label outside {0,1}");
        t.labels.push_back(label);
        for (std::size_t i = 2; i < fields.size(); ++i) {
            values.push_back(parse_double_strict(fields[i]));
        }
    }
    if (t.ids.empty()) {
        throw DataError("feature CSV '" + path.string() + "' has no subject rows");
    }
    t.x = Matrix(t.ids.size(), t.names.size());
    t.x.data = std::move(values);
    if (t.x.data.size() != t.x.rows * t.x.cols) {
        throw DataError("feature CSV size mismatch");
    }
    t.validate();
    return t;
}

}  // namespace mribow
