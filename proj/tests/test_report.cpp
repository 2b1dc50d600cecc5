#include <doctest.h>

#include <cmath>
#include <fstream>

#include "mribow/error.hpp"
#include "mribow/io.hpp"
#include "mribow/report.hpp"
#include "mribow/rng.hpp"
#include "support/tempdir.hpp"

using namespace mribow;
using mribow::test::TempDir;

TEST_SUITE("report") {

TEST_CASE("subset size curve mirrors the trace") {
    SelectionTrace t;
    t.steps.push_back({2, "a", 0.7, 1.0, 0.5, {}});
    t.steps.push_back({5, "b", 0.8, 1.0, 0.5, {}});
    t.steps.push_back({0, "c", 0.95, 1.0, 0.5, {}});
    auto rows = subset_size_curve(t);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].size == 1);
    CHECK(rows[2].size == 3);
    CHECK(rows[2].accuracy == 0.95);

    TempDir tmp;
    write_subset_curve_csv(rows, tmp / "c.csv");
    CHECK(read_text_file(tmp / "c.csv") ==
          "size,mean_cv_accuracy\n1,0.7\n2,0.8\n3,0.95\n");
}

TEST_CASE("training ratio curve on separable data") {
    Rng r(4);
    const std::size_t per_class = 8;
    Matrix x(2 * per_class, 2);
    std::vector<int> y;
    for (std::size_t i = 0; i < x.rows; ++i) {
        int label = i < per_class ? 0 : 1;
        y.push_back(label);
        x.at(i, 0) = (label == 1 ? 2.5 : -2.5) + 0.2 * r.next_symmetric();
        x.at(i, 1) = r.next_symmetric();
    }
    CvConfig cfg;
    cfg.repeats = 10;
    cfg.seed = 12;
    SvmSpec spec;
    spec.c = 10.0;
    spec.gamma = 0.5;
    auto rows = training_ratio_curve(x, y, {0.5, 0.75, 0.875}, cfg, spec);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        CHECK(row.accuracy == 1.0);
        REQUIRE(row.sensitivity.has_value());
        REQUIRE(row.specificity.has_value());
        CHECK(*row.sensitivity == 1.0);
        CHECK(*row.specificity == 1.0);
    }
    CHECK(rows[0].ratio == 0.5);
    CHECK(rows[2].ratio == 0.875);

    // 1 - 0.95 holds out nothing from an 8-subject class
    CHECK_THROWS_AS(training_ratio_curve(x, y, {0.95}, cfg, spec), DataError);
    CHECK_THROWS_AS(training_ratio_curve(x, y, {1.0}, cfg, spec), ConfigError);

    TempDir tmp;
    write_ratio_curve_csv(rows, tmp / "r.csv");
    std::string text = read_text_file(tmp / "r.csv");
    CHECK(text.starts_with("training_ratio,accuracy,sensitivity,specificity\n"));
    CHECK(text.find("0.5,1,1,1\n") != std::string::npos);
}

TEST_CASE("cohort contrast is the difference of class means") {
    Matrix x(4, 2);
    // controls: rows 0,1; mtbi: rows 2,3
    x.at(0, 0) = 1.0;
    x.at(1, 0) = 3.0;
    x.at(2, 0) = 5.0;
    x.at(3, 0) = 7.0;
    x.at(0, 1) = 0.5;
    x.at(1, 1) = 0.5;
    x.at(2, 1) = 0.5;
    x.at(3, 1) = 0.5;
    std::vector<int> labels{0, 0, 1, 1};
    auto rows = cohort_histogram_contrast(x, labels, {"f0", "f1"});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].mean_control == 2.0);
    CHECK(rows[0].mean_mtbi == 6.0);
    CHECK(rows[0].difference == 4.0);
    CHECK(rows[1].difference == 0.0);

    TempDir tmp;
    write_contrast_csv(rows, tmp / "d.csv");
    std::string text = read_text_file(tmp / "d.csv");
    CHECK(text.starts_with("feature,mean_control,mean_mtbi,difference\n"));
    CHECK(text.find("f0,2,6,4\n") != std::string::npos);
}

TEST_CASE("rendered words round-trip within 8-bit quantization") {
    TempDir tmp;
    Codebook cb;
    cb.key = {MetricId::FA, RegionId::CorpusCallosum};
    Rng r(6);
    std::vector<double> varied(16);
    for (auto& v : varied) v = r.next_double();
    cb.words = {varied, std::vector<double>(16, 0.3)};
    cb.provenance = {Cohort::Control, Cohort::Mtbi};

    auto paths = render_words(cb, tmp / "words");
    REQUIRE(paths.size() == 2);
    CHECK(paths[0].filename() == "FA_CorpusCallosum_word00_control.pgm");
    CHECK(paths[1].filename() == "FA_CorpusCallosum_word01_mtbi.pgm");

    std::ifstream in(paths[0], std::ios::binary);
    std::string magic, dims1, dims2, maxval;
    in >> magic >> dims1 >> dims2 >> maxval;
    CHECK(magic == "P5");
    CHECK(dims1 == "4");
    CHECK(dims2 == "4");
    CHECK(maxval == "255");
    in.get();
    std::vector<unsigned char> pixels(16);
    in.read(reinterpret_cast<char*>(pixels.data()), 16);
    REQUIRE(in.gcount() == 16);

    double lo = *std::min_element(varied.begin(), varied.end());
    double hi = *std::max_element(varied.begin(), varied.end());
    for (std::size_t i = 0; i < 16; ++i) {
        double back = lo + (hi - lo) * pixels[i] / 255.0;
        CHECK(std::abs(back - varied[i]) <= (hi - lo) / 255.0 + 1e-12);
    }

    // constant word renders mid-gray
    std::ifstream in2(paths[1], std::ios::binary);
    in2 >> magic >> dims1 >> dims2 >> maxval;
    in2.get();
    std::vector<unsigned char> flat(16);
    in2.read(reinterpret_cast<char*>(flat.data()), 16);
    for (unsigned char px : flat) CHECK(px == 128);
}

TEST_CASE("line chart svg has the advertised structure") {
    TempDir tmp;
    ChartSeries s1{"alpha", {{0.0, 0.5}, {1.0, 0.8}, {2.0, 0.9}}};
    ChartSeries s2{"beta", {{0.0, 0.4}, {2.0, 0.95}}};
    write_line_chart(tmp / "c.svg", "A title", "xs", "ys", {s1, s2});
    std::string svg = read_text_file(tmp / "c.svg");
    CHECK(svg.starts_with("<svg"));
    CHECK(svg.find("A title") != std::string::npos);
    CHECK(svg.find("xs") != std::string::npos);
    CHECK(svg.find("ys") != std::string::npos);
    CHECK(svg.find("alpha") != std::string::npos);
    CHECK(svg.find("beta") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK_THROWS_AS(write_line_chart(tmp / "e.svg", "t", "x", "y", {}), DataError);
}

}  // TEST_SUITE report
