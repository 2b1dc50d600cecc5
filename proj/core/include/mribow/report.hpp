#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mribow/codebook.hpp"
#include "mribow/cv.hpp"
#include "mribow/selection.hpp"

namespace mribow {

struct SubsetCurveRow {
    std::size_t size = 0;
    double accuracy = 0.0;
};

// One row per accepted selection step: subset size k and its CV accuracy.
std::vector<SubsetCurveRow> subset_size_curve(const SelectionTrace& trace);
void write_subset_curve_csv(const std::vector<SubsetCurveRow>& rows,
                            const std::filesystem::path& path);

struct RatioCurveRow {
    double ratio = 0.0;
    double accuracy = 0.0;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
};

// Repeated CV at validation_fraction = 1 - ratio for each training ratio.
// Every ratio must leave at least one subject per class on each side.
std::vector<RatioCurveRow> training_ratio_curve(
    const Matrix& x, const std::vector<int>& y, const std::vector<double>& ratios,
    CvConfig cfg, const SvmSpec& spec, unsigned workers = 1);
void write_ratio_curve_csv(const std::vector<RatioCurveRow>& rows,
                           const std::filesystem::path& path);

struct ContrastRow {
    std::string name;
    double mean_control = 0.0;
    double mean_mtbi = 0.0;
    double difference = 0.0;  // mtbi - control
};

// Per-dimension cohort means and their difference.
std::vector<ContrastRow> cohort_histogram_contrast(
    const Matrix& x, const std::vector<int>& labels,
    const std::vector<std::string>& names);
void write_contrast_csv(const std::vector<ContrastRow>& rows,
                        const std::filesystem::path& path);

// One 8-bit PGM per word, min-max scaled (constant words render mid-gray).
// Files are named `<metric>_<region>_word<NN>_<cohort>.pgm`; word vectors
// must be square (p*p values). Returns the written paths.
std::vector<std::filesystem::path> render_words(const Codebook& cb,
                                                const std::filesystem::path& dir);

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

// Minimal self-contained SVG line chart (axes, ticks, legend).
void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series);

}  // namespace mribow
