#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mribow/cv.hpp"

namespace mribow {

enum class StopReason { MaxSize, NoImprovement };

std::string_view to_string(StopReason r);
StopReason parse_stop_reason(std::string_view s);

struct SelectionStep {
    std::size_t feature_index = 0;
    std::string feature_name;
    double mean_cv_accuracy = 0.0;
    double c = 0.0;
    double gamma = 0.0;
    std::vector<double> per_repeat;
};

struct SelectionTrace {
    std::vector<SelectionStep> steps;
    StopReason stop_reason = StopReason::MaxSize;

    std::vector<std::size_t> chosen() const;
    void validate() const;  // distinct indices, strictly increasing accuracy
};

struct SelectionConfig {
    int max_size = 10;
    GridConfig grid;
    SvmSpec base;  // c and gamma are overridden by the grid search

    void validate() const;
};

// Greedy forward selection: at each step every remaining feature is scored by
// grid-searched repeated-CV accuracy on the candidate set, all candidates on
// identical splits. The best feature joins the set (ties to the lowest
// index); selection stops at max_size or when the best candidate fails to
// strictly improve the previous step's accuracy. Candidates run in parallel.
SelectionTrace greedy_forward_select(const CvProblem& problem,
                                     const std::vector<std::string>& names,
                                     const SelectionConfig& cfg,
                                     unsigned workers = 1);

void save_selection_trace(const SelectionTrace& t, const std::filesystem::path& path);
SelectionTrace load_selection_trace(const std::filesystem::path& path);

// CSV with header `step,feature_name,mean_cv_accuracy`, steps numbered from 1.
void write_selection_csv(const SelectionTrace& t, const std::filesystem::path& path);

}  // namespace mribow
