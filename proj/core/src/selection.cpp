#include "mribow/selection.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mribow/error.hpp"
#include "mribow/io.hpp"
#include "mribow/parallel.hpp"
#include "mribow/text.hpp"

namespace mribow {

using nlohmann::json;

std::string_view to_string(StopReason r) {
    return r == StopReason::MaxSize ? "max_size" : "no_improvement";
}

StopReason parse_stop_reason(std::string_view s) {
    if (s == "max_size") return StopReason::MaxSize;
    if (s == "no_improvement") return StopReason::NoImprovement;
    throw DataError("unknown stop reason '" + std::string(s) + "'");
}

std::vector<std::size_t> SelectionTrace::chosen() const {
    std::vector<std::size_t> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.feature_index);
    return out;
}

void SelectionTrace::validate() const {
    std::set<std::size_t> seen;
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& s : steps) {
        if (!seen.insert(s.feature_index).second) {
            throw DataError("selection trace: repeated feature index");
        }
        if (!(s.mean_cv_accuracy > prev)) {
            throw DataError("selection trace: accuracy not strictly increasing");
        }
        prev = s.mean_cv_accuracy;
    }
}

void SelectionConfig::validate() const {
    if (max_size < 0) throw ConfigError("selection: max_size must be >= 0");
    grid.validate();
}

SelectionTrace greedy_forward_select(const CvProblem& problem,
                                     const std::vector<std::string>& names,
                                     const SelectionConfig& cfg, unsigned workers) {
    cfg.validate();
    problem.validate();
    const std::size_t n_features = problem.per_repeat.front().cols;
    if (names.size() != n_features) {
        throw DataError("selection: name/column count mismatch");
    }
    if (static_cast<std::size_t>(cfg.max_size) > n_features) {
        throw ConfigError("selection: max_size exceeds feature count");
    }

    SelectionTrace trace;
    trace.stop_reason = StopReason::MaxSize;
    std::vector<std::size_t> chosen;
    std::vector<std::size_t> remaining(n_features);
    for (std::size_t i = 0; i < n_features; ++i) remaining[i] = i;
    double best_so_far = -std::numeric_limits<double>::infinity();

    while (chosen.size() < static_cast<std::size_t>(cfg.max_size)) {
        std::vector<GridResult> scores(remaining.size());
        parallel_for(remaining.size(), workers, [&](std::size_t i) {
            std::vector<std::size_t> cols = chosen;
            cols.push_back(remaining[i]);
            scores[i] = grid_search(problem, cols, cfg.grid, cfg.base, 1);
        });

        std::size_t best_i = 0;
        for (std::size_t i = 1; i < remaining.size(); ++i) {
            if (scores[i].accuracy > scores[best_i].accuracy) best_i = i;
        }
        if (!(scores[best_i].accuracy > best_so_far)) {
            trace.stop_reason = StopReason::NoImprovement;
            break;
        }

        std::size_t feature = remaining[best_i];
        chosen.push_back(feature);
        best_so_far = scores[best_i].accuracy;

        SvmSpec spec = cfg.base;
        spec.c = scores[best_i].c;
        spec.gamma = scores[best_i].gamma;
        CvResult detail = evaluate_cv(problem, chosen, spec, workers);

        SelectionStep step;
        step.feature_index = feature;
        step.feature_name = names[feature];
        step.mean_cv_accuracy = scores[best_i].accuracy;
        step.c = scores[best_i].c;
        step.gamma = scores[best_i].gamma;
        step.per_repeat = std::move(detail.per_repeat);
        trace.steps.push_back(std::move(step));

        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_i));
    }

    trace.validate();
    return trace;
}

void save_selection_trace(const SelectionTrace& t, const std::filesystem::path& path) {
    t.validate();
    json j;
    j["stop_reason"] = to_string(t.stop_reason);
    json steps = json::array();
    for (const auto& s : t.steps) {
        json js;
        js["feature_index"] = s.feature_index;
        js["feature_name"] = s.feature_name;
        js["mean_cv_accuracy"] = s.mean_cv_accuracy;
        js["c"] = s.c;
        js["gamma"] = s.gamma;
        js["per_repeat"] = s.per_repeat;
        steps.push_back(std::move(js));
    }
    j["steps"] = std::move(steps);
    write_text_file(path, j.dump(2) + "\n");
}

SelectionTrace load_selection_trace(const std::filesystem::path& path) {
    json j = json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded()) throw DataError("malformed JSON in '" + path.string() + "'");
    SelectionTrace t;
    try {
        t.stop_reason = parse_stop_reason(j.at("stop_reason").get<std::string>());
        for (const auto& js : j.at("steps")) {
            SelectionStep s;
            s.feature_index = js.at("feature_index").get<std::size_t>();
            s.feature_name = js.at("feature_name").get<std::string>();
            s.mean_cv_accuracy = js.at("mean_cv_accuracy").get<double>();
            s.c = js.at("c").get<double>();
            s.gamma = js.at("gamma").get<double>();
            s.per_repeat = js.at("per_repeat").get<std::vector<double>>();
            t.steps.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw DataError("bad selection trace '" + path.string() + "': " + e.what());
    }
    t.validate();
    return t;
}

void write_selection_csv(const SelectionTrace& t, const std::filesystem::path& path) {
    std::ostringstream os;
    os << "step,feature_name,mean_cv_accuracy\n";
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        os << (i + 1) << ',' << t.steps[i].feature_name << ','
           << format_double(t.steps[i].mean_cv_accuracy) << '\n';
    }
    write_text_file(path, os.str());
}

}  // namespace mribow
