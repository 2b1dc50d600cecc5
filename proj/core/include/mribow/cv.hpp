#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mribow/matrix.hpp"
#include "mribow/metrics.hpp"
#include "mribow/svm.hpp"

namespace mribow {

struct CvConfig {
    double validation_fraction = 0.2;
    int repeats = 50;
    bool stratified = true;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

// Repeated random splits of subjects with labels in {0,1}. Stratified mode
// moves floor(fraction * n_c) subjects of each class into validation; the
// remainder trains. Repeat r draws from a stream derived from (seed, r).
std::vector<Split> make_splits(const std::vector<int>& labels, const CvConfig& cfg);

// A CV instance: fixed splits plus the feature matrix to score. `per_repeat`
// holds one shared matrix, or one matrix per repeat when features themselves
// depend on the training half (codebooks re-learned inside each split).
struct CvProblem {
    std::vector<Split> splits;
    std::vector<int> labels;
    std::vector<Matrix> per_repeat;

    const Matrix& matrix(std::size_t repeat) const {
        return per_repeat.size() == 1 ? per_repeat.front() : per_repeat[repeat];
    }
    void validate() const;
};

CvProblem make_cv_problem(const Matrix& x, const std::vector<int>& y,
                          const CvConfig& cfg);

struct CvResult {
    double mean_accuracy = 0.0;
    std::vector<double> per_repeat;
    ConfusionCounts totals;
    std::optional<double> mean_sensitivity;
    std::optional<double> mean_specificity;
};

// Scores `columns` of the problem's matrix (empty = all columns). Each repeat
// fits the scaler and SVM on training rows only. Repeats run in parallel.
CvResult evaluate_cv(const CvProblem& problem, const std::vector<std::size_t>& columns,
                     const SvmSpec& spec, unsigned workers = 1);

// Convenience wrapper over make_cv_problem + evaluate_cv on all columns.
CvResult repeated_cv_accuracy(const Matrix& x, const std::vector<int>& y,
                              const CvConfig& cfg, const SvmSpec& spec,
                              unsigned workers = 1);

struct GridConfig {
    std::vector<double> c_values = {0.1, 1.0, 10.0, 100.0};
    std::vector<double> gamma_scales = {0.25, 0.5, 1.0, 2.0, 4.0};
    bool scale_by_dim = true;  // gamma = scale / active feature count

    void validate() const;
    std::vector<double> gammas_for(std::size_t dim) const;
};

struct GridResult {
    double c = 0.0;
    double gamma = 0.0;
    double accuracy = 0.0;
};

// Exhaustive (C, gamma) search maximizing mean CV accuracy on the given
// columns; ties prefer smaller C, then smaller gamma.
GridResult grid_search(const CvProblem& problem, const std::vector<std::size_t>& columns,
                       const GridConfig& grid, const SvmSpec& base,
                       unsigned workers = 1);

}  // namespace mribow
