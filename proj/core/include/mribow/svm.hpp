#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "mribow/matrix.hpp"

namespace mribow {

// Column-wise z-scoring with population standard deviation, fit on training
// rows only. Zero-variance columns keep sd 1 so they pass through centered.
struct Scaler {
    std::vector<double> mean;
    std::vector<double> sd;
};

Scaler scaler_fit(const Matrix& train);
Matrix scaler_apply(const Scaler& s, const Matrix& x);
void scaler_apply_row(const Scaler& s, std::span<double> row);

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

struct SvmSpec {
    double c = 1.0;
    double gamma = 1.0;
    double tol = 1e-3;      // KKT violation tolerance
    int max_sweeps = 1000;  // cap on outer SMO sweeps

    void validate() const;
};

// Decision function: sum_i dual_coefs[i] * k(sv_i, x) + bias, with
// dual_coefs[i] = alpha_i * y_i over support vectors only.
struct SvmModel {
    Matrix support_vectors;
    std::vector<double> dual_coefs;
    double bias = 0.0;
    double gamma = 1.0;
    double c = 1.0;

    void validate() const;
};

struct SvmPrediction {
    int label = 1;  // -1 or +1; exact zero decision maps to +1
    double decision = 0.0;
};

struct SvmTrainReport {
    SvmModel model;
    std::vector<double> alphas;  // full training-set alphas
    double dual_objective = 0.0;
    int sweeps = 0;
    bool converged = false;
};

// Platt-style SMO on the dual of the soft-margin RBF SVM. Labels must be in
// {-1, +1} with both classes present. The observer, when set, receives the
// dual objective after every accepted pairwise step (it never decreases).
SvmTrainReport svm_train_report(
    const Matrix& x, const std::vector<int>& y, const SvmSpec& spec,
    const std::function<void(double)>& observer = nullptr);

SvmModel svm_train(const Matrix& x, const std::vector<int>& y, const SvmSpec& spec);

SvmPrediction svm_predict(const SvmModel& m, std::span<const double> x);

// W(alpha) = sum alpha_i - 1/2 sum_ij alpha_i alpha_j y_i y_j k(x_i, x_j).
double svm_dual_objective(const Matrix& x, const std::vector<int>& y,
                          const std::vector<double>& alphas, double gamma);

void save_model(const SvmModel& m, const std::filesystem::path& path);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace mribow
