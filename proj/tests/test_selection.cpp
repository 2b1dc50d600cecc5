#include <doctest.h>

#include "mribow/error.hpp"
#include "mribow/io.hpp"
#include "mribow/rng.hpp"
#include "mribow/selection.hpp"
#include "support/tempdir.hpp"

using namespace mribow;
using mribow::test::TempDir;

namespace {

// col 0: weak signal, col 1: complements col 0, col 2: strong signal,
// col 3: pure noise
struct Pool {
    Matrix x;
    std::vector<int> y;
    std::vector<std::string> names{"weak", "partner", "strong", "noise"};
};

Pool make_pool(std::uint64_t seed) {
    Rng r(seed);
    const std::size_t per_class = 8;
    Pool p;
    p.y.assign(per_class, 0);
    p.y.insert(p.y.end(), per_class, 1);
    p.x = Matrix(2 * per_class, 4);
    for (std::size_t i = 0; i < p.x.rows; ++i) {
        double s = p.y[i] == 1 ? 1.0 : -1.0;
        bool corrupt = i % 4 == 0;  // flip a quarter of the weak column
        p.x.at(i, 0) = (corrupt ? -s : s) + 0.05 * r.next_symmetric();
        p.x.at(i, 1) = (corrupt ? 3.0 : 0.0) + 0.05 * r.next_symmetric();
        p.x.at(i, 2) = 2.0 * s + 0.05 * r.next_symmetric();
        p.x.at(i, 3) = r.next_symmetric();
    }
    return p;
}

SelectionConfig small_config() {
    SelectionConfig cfg;
    cfg.max_size = 4;
    cfg.grid.c_values = {1.0, 10.0};
    cfg.grid.gamma_scales = {0.5, 1.0};
    return cfg;
}

}  // namespace

TEST_SUITE("selection") {

TEST_CASE("first step matches the exhaustive singleton search") {
    Pool p = make_pool(3);
    CvConfig cv;
    cv.validation_fraction = 0.25;
    cv.repeats = 12;
    cv.seed = 40;
    auto problem = make_cv_problem(p.x, p.y, cv);
    SelectionConfig cfg = small_config();

    double best_acc = -1.0;
    std::size_t best_col = 0;
    for (std::size_t col = 0; col < p.x.cols; ++col) {
        double acc = grid_search(problem, {col}, cfg.grid, cfg.base).accuracy;
        if (acc > best_acc) {
            best_acc = acc;
            best_col = col;
        }
    }

    SelectionTrace trace = greedy_forward_select(problem, p.names, cfg);
    trace.validate();
    REQUIRE(!trace.steps.empty());
    CHECK(trace.steps[0].feature_index == best_col);
    CHECK(trace.steps[0].mean_cv_accuracy == best_acc);
    CHECK(trace.steps[0].feature_name == p.names[best_col]);
    CHECK(trace.steps[0].per_repeat.size() == 12);
}

TEST_CASE("stops when no candidate strictly improves") {
    Pool p = make_pool(5);
    CvConfig cv;
    cv.validation_fraction = 0.25;
    cv.repeats = 10;
    cv.seed = 8;
    auto problem = make_cv_problem(p.x, p.y, cv);
    SelectionConfig cfg = small_config();
    SelectionTrace trace = greedy_forward_select(problem, p.names, cfg);

    // the strong column alone reaches 1.0; nothing can improve on it
    REQUIRE(trace.steps.size() == 1);
    CHECK(trace.steps[0].feature_name == "strong");
    CHECK(trace.steps[0].mean_cv_accuracy == 1.0);
    CHECK(trace.stop_reason == StopReason::NoImprovement);
}

TEST_CASE("accuracies along the trace strictly increase") {
    Pool p = make_pool(7);
    // degrade the strong column so several steps are needed
    for (std::size_t i = 0; i < p.x.rows; ++i) {
        p.x.at(i, 2) = p.x.at(i, 3);
    }
    CvConfig cv;
    cv.validation_fraction = 0.25;
    cv.repeats = 16;
    cv.seed = 10;
    auto problem = make_cv_problem(p.x, p.y, cv);
    SelectionConfig cfg = small_config();
    SelectionTrace trace = greedy_forward_select(problem, p.names, cfg, 3);
    trace.validate();
    REQUIRE(trace.steps.size() >= 2);
    for (std::size_t i = 1; i < trace.steps.size(); ++i) {
        CHECK(trace.steps[i].mean_cv_accuracy >
              trace.steps[i - 1].mean_cv_accuracy);
    }
}

TEST_CASE("max_size zero returns an empty trace") {
    Pool p = make_pool(1);
    CvConfig cv;
    cv.validation_fraction = 0.25;
    cv.repeats = 4;
    auto problem = make_cv_problem(p.x, p.y, cv);
    SelectionConfig cfg = small_config();
    cfg.max_size = 0;
    SelectionTrace trace = greedy_forward_select(problem, p.names, cfg);
    CHECK(trace.steps.empty());
    CHECK(trace.stop_reason == StopReason::MaxSize);
    CHECK(trace.chosen().empty());
}

TEST_CASE("max_size caps the trace length") {
    Pool p = make_pool(2);
    CvConfig cv;
    cv.validation_fraction = 0.25;
    cv.repeats = 6;
    cv.seed = 2;
    auto problem = make_cv_problem(p.x, p.y, cv);
    SelectionConfig cfg = small_config();
    cfg.max_size = 1;
    SelectionTrace trace = greedy_forward_select(problem, p.names, cfg);
    CHECK(trace.steps.size() == 1);
    CHECK(trace.stop_reason == StopReason::MaxSize);
}

TEST_CASE("trace validation rejects corrupt traces") {
    SelectionTrace t;
    t.steps.resize(2);
    t.steps[0] = {0, "a", 0.8, 1.0, 0.5, {}};
    t.steps[1] = {0, "b", 0.9, 1.0, 0.5, {}};
    CHECK_THROWS_AS(t.validate(), DataError);  // duplicate index
    t.steps[1].feature_index = 1;
    t.steps[1].mean_cv_accuracy = 0.8;
    CHECK_THROWS_AS(t.validate(), DataError);  // not strictly increasing
    t.steps[1].mean_cv_accuracy = 0.9;
    CHECK_NOTHROW(t.validate());
}

TEST_CASE("trace json and csv round-trip") {
    TempDir tmp;
    Pool p = make_pool(6);
    CvConfig cv;
    cv.validation_fraction = 0.25;
    cv.repeats = 5;
    cv.seed = 3;
    auto problem = make_cv_problem(p.x, p.y, cv);
    SelectionConfig cfg = small_config();
    cfg.max_size = 2;
    SelectionTrace trace = greedy_forward_select(problem, p.names, cfg);

    save_selection_trace(trace, tmp / "sel.json");
    SelectionTrace back = load_selection_trace(tmp / "sel.json");
    REQUIRE(back.steps.size() == trace.steps.size());
    CHECK(back.stop_reason == trace.stop_reason);
    for (std::size_t i = 0; i < back.steps.size(); ++i) {
        CHECK(back.steps[i].feature_index == trace.steps[i].feature_index);
        CHECK(back.steps[i].feature_name == trace.steps[i].feature_name);
        CHECK(back.steps[i].mean_cv_accuracy == trace.steps[i].mean_cv_accuracy);
        CHECK(back.steps[i].c == trace.steps[i].c);
        CHECK(back.steps[i].gamma == trace.steps[i].gamma);
        CHECK(back.steps[i].per_repeat == trace.steps[i].per_repeat);
    }

    write_selection_csv(trace, tmp / "sel.csv");
    std::string text = read_text_file(tmp / "sel.csv");
    CHECK(text.starts_with("step,feature_name,mean_cv_accuracy\n"));
    CHECK(text.find("1," + trace.steps[0].feature_name + ",") != std::string::npos);
}

TEST_CASE("stop reason names round-trip") {
    CHECK(to_string(StopReason::MaxSize) == "max_size");
    CHECK(to_string(StopReason::NoImprovement) == "no_improvement");
    CHECK(parse_stop_reason("max_size") == StopReason::MaxSize);
    CHECK(parse_stop_reason("no_improvement") == StopReason::NoImprovement);
    CHECK_THROWS_AS(parse_stop_reason("?"), DataError);
}

}  // TEST_SUITE selection
