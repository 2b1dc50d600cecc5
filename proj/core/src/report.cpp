#include "mribow/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mribow/error.hpp"
#include "mribow/io.hpp"
#include "mribow/text.hpp"

namespace mribow {

std::vector<SubsetCurveRow> subset_size_curve(const SelectionTrace& trace) {
    trace.validate();
    std::vector<SubsetCurveRow> rows;
    rows.reserve(trace.steps.size());
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        rows.push_back({i + 1, trace.steps[i].mean_cv_accuracy});
    }
    return rows;
}

void write_subset_curve_csv(const std::vector<SubsetCurveRow>& rows,
                            const std::filesystem::path& path) {
    std::ostringstream os;
    os << "size,mean_cv_accuracy\n";
    for (const auto& r : rows) os << r.size << ',' << format_double(r.accuracy) << '\n';
    write_text_file(path, os.str());
}

std::vector<RatioCurveRow> training_ratio_curve(const Matrix& x,
                                                const std::vector<int>& y,
                                                const std::vector<double>& ratios,
                                                CvConfig cfg, const SvmSpec& spec,
                                                unsigned workers) {
    std::size_t n_class[2] = {0, 0};
    for (int v : y) {
        if (v == 0 || v == 1) ++n_class[v];
    }
    std::vector<RatioCurveRow> rows;
    for (double ratio : ratios) {
        if (!(ratio > 0.0 && ratio < 1.0)) {
            throw ConfigError("training ratio must be in (0, 1)");
        }
        double frac = 1.0 - ratio;
        for (std::size_t n_c : n_class) {
            auto n_val = static_cast<std::size_t>(
                std::floor(frac * static_cast<double>(n_c)));
            if (n_val < 1 || n_val >= n_c) {
                throw DataError("degenerate training ratio " + format_double(ratio));
            }
        }
        cfg.validation_fraction = frac;
        CvResult cv = repeated_cv_accuracy(x, y, cfg, spec, workers);
        rows.push_back(
            {ratio, cv.mean_accuracy, cv.mean_sensitivity, cv.mean_specificity});
    }
    return rows;
}

void write_ratio_curve_csv(const std::vector<RatioCurveRow>& rows,
                           const std::filesystem::path& path) {
    std::ostringstream os;
    os << "training_ratio,accuracy,sensitivity,specificity\n";
    for (const auto& r : rows) {
        os << format_double(r.ratio) << ',' << format_double(r.accuracy) << ',';
        if (r.sensitivity) os << format_double(*r.sensitivity);
        os << ',';
        if (r.specificity) os << format_double(*r.specificity);
        os << '\n';
    }
    write_text_file(path, os.str());
}

std::vector<ContrastRow> cohort_histogram_contrast(
    const Matrix& x, const std::vector<int>& labels,
    const std::vector<std::string>& names) {
    if (x.rows != labels.size()) throw DataError("contrast: row/label count mismatch");
    if (x.cols != names.size()) throw DataError("contrast: column/name count mismatch");
    std::size_t n[2] = {0, 0};
    for (int v : labels) {
        if (v != 0 && v != 1) throw DataError("contrast: label outside {0,1}");
        ++n[v];
    }
    if (n[0] == 0 || n[1] == 0) throw DataError("contrast: both cohorts required");

    std::vector<ContrastRow> rows(x.cols);
    for (std::size_t c = 0; c < x.cols; ++c) rows[c].name = names[c];
    for (std::size_t r = 0; r < x.rows; ++r) {
        for (std::size_t c = 0; c < x.cols; ++c) {
            (labels[r] == 0 ? rows[c].mean_control : rows[c].mean_mtbi) += x.at(r, c);
        }
    }
    for (auto& row : rows) {
        row.mean_control /= static_cast<double>(n[0]);
        row.mean_mtbi /= static_cast<double>(n[1]);
        row.difference = row.mean_mtbi - row.mean_control;
    }
    return rows;
}

void write_contrast_csv(const std::vector<ContrastRow>& rows,
                        const std::filesystem::path& path) {
    std::ostringstream os;
    os << "feature,mean_control,mean_mtbi,difference\n";
    for (const auto& r : rows) {
        os << r.name << ',' << format_double(r.mean_control) << ','
           << format_double(r.mean_mtbi) << ',' << format_double(r.difference) << '\n';
    }
    write_text_file(path, os.str());
}

std::vector<std::filesystem::path> render_words(const Codebook& cb,
                                                const std::filesystem::path& dir) {
    cb.validate();
    const std::size_t dim = cb.words.front().size();
    const auto p = static_cast<std::size_t>(std::lround(std::sqrt(double(dim))));
    if (p * p != dim) throw DataError("render_words: word length is not a square");

    std::vector<std::filesystem::path> paths;
    for (std::size_t w = 0; w < cb.words.size(); ++w) {
        const auto& word = cb.words[w];
        double lo = *std::min_element(word.begin(), word.end());
        double hi = *std::max_element(word.begin(), word.end());

        std::string pgm = "P5\n" + std::to_string(p) + " " + std::to_string(p) + "\n255\n";
        for (double v : word) {
            int g = 128;
            if (hi > lo) g = static_cast<int>(std::lround((v - lo) / (hi - lo) * 255.0));
            pgm.push_back(static_cast<char>(static_cast<unsigned char>(g)));
        }

        std::string name = std::string(to_string(cb.key.metric)) + "_" +
                           std::string(to_string(cb.key.region)) + "_word";
        if (w < 10) name += '0';
        name += std::to_string(w);
        name += "_" + std::string(to_string(cb.provenance[w])) + ".pgm";
        auto path = dir / name;
        write_text_file(path, pgm);
        paths.push_back(std::move(path));
    }
    return paths;
}

namespace {

std::string svg_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt_tick(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series) {
    if (series.empty()) throw DataError("line chart: no series");
    double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
    bool first = true;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            if (first) {
                x_lo = x_hi = x;
                y_lo = y_hi = y;
                first = false;
            }
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (first) throw DataError("line chart: no points");
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;

    const double w = 640, h = 420, ml = 70, mr = 30, mt = 50, mb = 60;
    auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - y_lo) / (y_hi - y_lo) * (h - mt - mb); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
       << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
          "font-family=\"sans-serif\">"
       << svg_escape(title) << "</text>\n";

    for (int t = 0; t <= 4; ++t) {
        double fx = x_lo + (x_hi - x_lo) * t / 4.0;
        double fy = y_lo + (y_hi - y_lo) * t / 4.0;
        os << "<line x1=\"" << px(fx) << "\" y1=\"" << h - mb << "\" x2=\"" << px(fx)
           << "\" y2=\"" << h - mb + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px(fx) << "\" y=\"" << h - mb + 20
           << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
           << fmt_tick(fx) << "</text>\n";
        os << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml
           << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4
           << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
           << fmt_tick(fy) << "</text>\n";
    }
    os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
       << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
       << h - mb << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"" << h - 15
       << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
       << svg_escape(x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << h / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
          "transform=\"rotate(-90 18 "
       << h / 2 << ")\">" << svg_escape(y_label) << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = colors[i % 4];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (auto [x, y] : series[i].points) os << px(x) << ',' << py(y) << ' ';
        os << "\"/>\n";
        for (auto [x, y] : series[i].points) {
            os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\""
               << color << "\"/>\n";
        }
        if (!series[i].label.empty()) {
            double ly = mt + 16.0 * static_cast<double>(i);
            os << "<rect x=\"" << w - mr - 130 << "\" y=\"" << ly - 9
               << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
            os << "<text x=\"" << w - mr - 115 << "\" y=\"" << ly
               << "\" font-size=\"12\" font-family=\"sans-serif\">"
               << svg_escape(series[i].label) << "</text>\n";
        }
    }
    os << "</svg>\n";
    write_text_file(path, os.str());
}

}  // namespace mribow
