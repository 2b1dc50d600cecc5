#pragma once

#include <cstddef>
#include <vector>

#include "mribow/matrix.hpp"

namespace mribow::test {

// Minimum within-cluster sum of squares over every assignment of the points
// to exactly k non-empty clusters. Exponential; for unit-scale inputs only.
double exhaustive_kmeans_wcss(const std::vector<std::vector<double>>& points, int k);

struct QpSolution {
    std::vector<double> alphas;
    double objective = 0.0;
    bool found = false;
};

// Globally optimal soft-margin RBF SVM dual, found by enumerating all 3^n
// bound patterns (alpha at 0, at C, or free) and solving the KKT system of
// each candidate. Exact up to linear-solve roundoff; n <= ~10.
QpSolution qp_svm_oracle(const Matrix& x, const std::vector<int>& y, double c,
                         double gamma);

// Dense Gaussian elimination with partial pivoting; returns false if the
// system is numerically singular.
bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& out);

}  // namespace mribow::test
