#include <doctest.h>

#include <cmath>

#include "mribow/error.hpp"
#include "mribow/rng.hpp"
#include "mribow/svm.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace mribow;
using mribow::test::TempDir;

namespace {

struct Problem {
    Matrix x;
    std::vector<int> y;
};

Problem random_problem(std::uint64_t seed, std::size_t n, std::size_t d) {
    Rng r(seed);
    Problem p;
    p.x = Matrix(n, d);
    for (auto& v : p.x.data) v = r.next_symmetric();
    for (std::size_t i = 0; i < n; ++i) p.y.push_back(i % 2 == 0 ? 1 : -1);
    return p;
}

Problem blobs(std::uint64_t seed, std::size_t per_class, double gap) {
    Rng r(seed);
    Problem p;
    p.x = Matrix(2 * per_class, 2);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        double center = i < per_class ? -gap : gap;
        p.x.at(i, 0) = center + 0.3 * r.next_symmetric();
        p.x.at(i, 1) = 0.3 * r.next_symmetric();
        p.y.push_back(i < per_class ? -1 : 1);
    }
    return p;
}

}  // namespace

TEST_SUITE("svm") {

TEST_CASE("scaler standardizes with population sd") {
    Matrix x(2, 3);
    x.at(0, 0) = 1.0;
    x.at(1, 0) = 3.0;
    x.at(0, 1) = 5.0;
    x.at(1, 1) = 5.0;  // constant column
    x.at(0, 2) = -2.0;
    x.at(1, 2) = 2.0;
    Scaler s = scaler_fit(x);
    CHECK(s.mean == std::vector<double>{2.0, 5.0, 0.0});
    CHECK(s.sd == std::vector<double>{1.0, 1.0, 2.0});  // zero variance -> 1

    Matrix z = scaler_apply(s, x);
    CHECK(z.at(0, 0) == -1.0);
    CHECK(z.at(1, 0) == 1.0);
    CHECK(z.at(0, 1) == 0.0);
    CHECK(z.at(1, 1) == 0.0);

    std::vector<double> row{1.0, 5.0, -2.0};
    scaler_apply_row(s, row);
    CHECK(row == std::vector<double>{z.at(0, 0), z.at(0, 1), z.at(0, 2)});
}

TEST_CASE("rbf kernel values") {
    std::vector<double> a{0.0, 0.0}, b{1.0, 2.0};
    CHECK(rbf_kernel(a, a, 0.7) == 1.0);
    CHECK(rbf_kernel(a, b, 0.5) == doctest::Approx(std::exp(-2.5)).epsilon(1e-12));
    CHECK(rbf_kernel(a, b, 0.5) == rbf_kernel(b, a, 0.5));
}

TEST_CASE("symmetric two-point problem solves in closed form") {
    Matrix x(2, 1);
    x.at(0, 0) = -1.0;
    x.at(1, 0) = 1.0;
    std::vector<int> y{-1, 1};
    SvmSpec spec;
    spec.c = 100.0;
    spec.gamma = 0.5;
    spec.tol = 1e-10;
    auto rep = svm_train_report(x, y, spec);

    double expected = 1.0 / (1.0 - std::exp(-2.0));
    CHECK(rep.converged);
    CHECK(rep.alphas[0] == doctest::Approx(expected).epsilon(1e-9));
    CHECK(rep.alphas[1] == doctest::Approx(expected).epsilon(1e-9));
    CHECK(rep.model.bias == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rep.dual_objective == doctest::Approx(expected).epsilon(1e-9));
    CHECK(svm_predict(rep.model, std::vector<double>{-2.0}).label == -1);
    CHECK(svm_predict(rep.model, std::vector<double>{2.0}).label == 1);
}

TEST_CASE("dual objective matches the exhaustive QP oracle") {
    int solved = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        Rng r(derive_stream(55, {seed}));
        std::size_t n = 4 + 2 * r.next_below(3);  // 4, 6, 8
        double c = r.next_below(2) == 0 ? 0.5 : 10.0;
        Problem p = random_problem(derive_stream(56, {seed}), n, 2);
        SvmSpec spec;
        spec.c = c;
        spec.gamma = 0.7;
        spec.tol = 1e-9;
        spec.max_sweeps = 20000;
        auto rep = svm_train_report(p.x, p.y, spec);
        auto oracle = mribow::test::qp_svm_oracle(p.x, p.y, c, 0.7);
        REQUIRE(oracle.found);
        double scale = std::max(1.0, std::abs(oracle.objective));
        CHECK(std::abs(rep.dual_objective - oracle.objective) <= 1e-6 * scale);
        CHECK(std::abs(svm_dual_objective(p.x, p.y, rep.alphas, 0.7) -
                       rep.dual_objective) <= 1e-9 * scale);
        ++solved;
    }
    CHECK(solved == 12);
}

TEST_CASE("observer sees a non-decreasing dual objective") {
    Problem p = random_problem(99, 8, 3);
    SvmSpec spec;
    spec.c = 5.0;
    spec.gamma = 0.4;
    spec.tol = 1e-8;
    std::vector<double> trace;
    svm_train_report(p.x, p.y, spec, [&](double w) { trace.push_back(w); });
    REQUIRE(trace.size() > 1);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        CHECK(trace[i] >= trace[i - 1] - 1e-8 * std::max(1.0, std::abs(trace[i - 1])));
    }
}

TEST_CASE("separable blobs train to zero error") {
    Problem p = blobs(4, 10, 2.0);
    SvmSpec spec;
    spec.c = 10.0;
    spec.gamma = 0.5;
    auto model = svm_train(p.x, p.y, spec);
    model.validate();
    for (std::size_t i = 0; i < p.x.rows; ++i) {
        CHECK(svm_predict(model, p.x.row(i)).label == p.y[i]);
    }
}

TEST_CASE("alphas respect the box and the balance constraint") {
    Problem p = random_problem(123, 8, 2);
    SvmSpec spec;
    spec.c = 1.5;
    spec.gamma = 1.0;
    spec.tol = 1e-8;
    auto rep = svm_train_report(p.x, p.y, spec);
    double sum = 0.0;
    for (std::size_t i = 0; i < rep.alphas.size(); ++i) {
        CHECK(rep.alphas[i] >= -1e-12);
        CHECK(rep.alphas[i] <= spec.c + 1e-12);
        sum += rep.alphas[i] * p.y[i];
    }
    CHECK(std::abs(sum) <= 1e-9);
}

TEST_CASE("zero decision maps to the positive class") {
    SvmModel m;
    m.support_vectors = Matrix(2, 1);
    m.support_vectors.at(0, 0) = -1.0;
    m.support_vectors.at(1, 0) = 1.0;
    m.dual_coefs = {-0.5, 0.5};
    m.bias = 0.0;
    m.gamma = 1.0;
    m.c = 1.0;
    auto pred = svm_predict(m, std::vector<double>{0.0});
    CHECK(pred.decision == 0.0);
    CHECK(pred.label == 1);
}

TEST_CASE("model json round-trip preserves predictions bitwise") {
    TempDir tmp;
    Problem p = blobs(8, 6, 1.5);
    SvmSpec spec;
    spec.c = 2.0;
    spec.gamma = 0.8;
    auto model = svm_train(p.x, p.y, spec);
    save_model(model, tmp / "model.json");
    auto back = load_model(tmp / "model.json");
    CHECK(back.bias == model.bias);
    CHECK(back.gamma == model.gamma);
    CHECK(back.c == model.c);
    CHECK(back.dual_coefs == model.dual_coefs);
    CHECK(back.support_vectors == model.support_vectors);
    for (std::size_t i = 0; i < p.x.rows; ++i) {
        CHECK(svm_predict(back, p.x.row(i)).decision ==
              svm_predict(model, p.x.row(i)).decision);
    }
}

TEST_CASE("sweep cap halts without convergence claim") {
    Problem p = random_problem(7, 8, 2);
    SvmSpec spec;
    spec.c = 10.0;
    spec.gamma = 2.0;
    spec.tol = 1e-12;
    spec.max_sweeps = 1;
    auto rep = svm_train_report(p.x, p.y, spec);
    CHECK_FALSE(rep.converged);
    CHECK(std::isfinite(rep.model.bias));
}

TEST_CASE("spec validation") {
    SvmSpec spec;
    spec.c = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = {};
    spec.gamma = -1.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = {};
    spec.tol = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = {};
    spec.max_sweeps = 0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    Matrix x(2, 1);
    x.at(0, 0) = 0.0;
    x.at(1, 0) = 1.0;
    CHECK_THROWS_AS(svm_train(x, {1, 1}, SvmSpec{}), DataError);
    CHECK_THROWS_AS(svm_train(x, {1}, SvmSpec{}), DataError);
    CHECK_THROWS_AS(svm_train(x, {1, 2}, SvmSpec{}), DataError);
}

}  // TEST_SUITE svm
