#include "mribow/cv.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mribow/error.hpp"
#include "mribow/parallel.hpp"
#include "mribow/rng.hpp"

namespace mribow {

void CvConfig::validate() const {
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
        throw ConfigError("cv: validation_fraction must be in (0, 1)");
    }
    if (repeats < 1) throw ConfigError("cv: repeats must be >= 1");
}

std::vector<Split> make_splits(const std::vector<int>& labels, const CvConfig& cfg) {
    cfg.validate();
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) {
            throw DataError("make_splits: label outside {0,1}");
        }
        by_class[labels[i]].push_back(i);
    }
    if (by_class[0].empty() || by_class[1].empty()) {
        throw DataError("make_splits: both classes required");
    }

    std::vector<Split> splits;
    splits.reserve(static_cast<std::size_t>(cfg.repeats));
    for (int r = 0; r < cfg.repeats; ++r) {
        Rng rng(derive_stream(cfg.seed, {static_cast<std::uint64_t>(r)}));
        Split s;
        if (cfg.stratified) {
            for (int c = 0; c < 2; ++c) {
                auto idx = by_class[c];
                std::size_t n_val = static_cast<std::size_t>(
                    std::floor(cfg.validation_fraction * static_cast<double>(idx.size())));
                if (n_val == 0) {
                    throw DataError("make_splits: validation fraction holds out "
                                    "nothing from class " +
                                    std::to_string(c));
                }
                if (n_val >= idx.size()) {
                    throw DataError("make_splits: validation swallows class " +
                                    std::to_string(c));
                }
                rng.shuffle(idx);
                s.validation.insert(s.validation.end(), idx.begin(), idx.begin() + n_val);
                s.train.insert(s.train.end(), idx.begin() + n_val, idx.end());
            }
        } else {
            std::vector<std::size_t> idx(labels.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::size_t n_val = static_cast<std::size_t>(
                std::floor(cfg.validation_fraction * static_cast<double>(idx.size())));
            if (n_val == 0) {
                throw DataError("make_splits: validation fraction holds out nothing");
            }
            rng.shuffle(idx);
            s.validation.assign(idx.begin(), idx.begin() + n_val);
            s.train.assign(idx.begin() + n_val, idx.end());
            bool pos = false, neg = false;
            for (std::size_t i : s.train) (labels[i] == 1 ? pos : neg) = true;
            if (!pos || !neg) {
                throw DataError("make_splits: training set lost a class (repeat " +
                                std::to_string(r) + ")");
            }
        }
        std::sort(s.train.begin(), s.train.end());
        std::sort(s.validation.begin(), s.validation.end());
        splits.push_back(std::move(s));
    }
    return splits;
}

void CvProblem::validate() const {
    if (splits.empty()) throw DataError("cv problem: no splits");
    if (per_repeat.empty()) throw DataError("cv problem: no feature matrix");
    if (per_repeat.size() != 1 && per_repeat.size() != splits.size()) {
        throw DataError("cv problem: matrix count must be 1 or one per repeat");
    }
    for (const auto& m : per_repeat) {
        if (m.rows != labels.size()) {
            throw DataError("cv problem: matrix rows do not match label count");
        }
    }
}

CvProblem make_cv_problem(const Matrix& x, const std::vector<int>& y,
                          const CvConfig& cfg) {
    if (x.rows != y.size()) throw DataError("cv: row/label count mismatch");
    CvProblem p;
    p.splits = make_splits(y, cfg);
    p.labels = y;
    p.per_repeat.push_back(x);
    p.validate();
    return p;
}

namespace {

Matrix take(const Matrix& x, const std::vector<std::size_t>& rows,
            const std::vector<std::size_t>& cols) {
    Matrix out(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out.at(r, c) = x.at(rows[r], cols[c]);
        }
    }
    return out;
}

struct RepeatScore {
    double accuracy = 0.0;
    ConfusionCounts counts;
};

RepeatScore score_repeat(const CvProblem& p, std::size_t repeat,
                         const std::vector<std::size_t>& columns,
                         const SvmSpec& spec) {
    const Matrix& x = p.matrix(repeat);
    const Split& s = p.splits[repeat];

    Matrix train = take(x, s.train, columns);
    Matrix val = take(x, s.validation, columns);
    Scaler scaler = scaler_fit(train);
    train = scaler_apply(scaler, train);
    val = scaler_apply(scaler, val);

    std::vector<int> y_train;
    y_train.reserve(s.train.size());
    for (std::size_t i : s.train) y_train.push_back(p.labels[i] == 1 ? 1 : -1);

    SvmModel model = svm_train(train, y_train, spec);

    std::vector<int> pred, truth;
    pred.reserve(s.validation.size());
    for (std::size_t r = 0; r < s.validation.size(); ++r) {
        pred.push_back(svm_predict(model, val.row(r)).label == 1 ? 1 : 0);
        truth.push_back(p.labels[s.validation[r]]);
    }
    RepeatScore out;
    out.counts = confusion(pred, truth);
    out.accuracy = accuracy(out.counts).value();
    return out;
}

}  // namespace

CvResult evaluate_cv(const CvProblem& problem, const std::vector<std::size_t>& columns,
                     const SvmSpec& spec, unsigned workers) {
    problem.validate();
    std::vector<std::size_t> cols = columns;
    if (cols.empty()) {
        cols.resize(problem.per_repeat.front().cols);
        for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
    }
    for (std::size_t c : cols) {
        if (c >= problem.per_repeat.front().cols) {
            throw DataError("evaluate_cv: column index out of range");
        }
    }

    std::vector<RepeatScore> scores(problem.splits.size());
    parallel_for(scores.size(), workers, [&](std::size_t r) {
        scores[r] = score_repeat(problem, r, cols, spec);
    });

    CvResult result;
    result.per_repeat.reserve(scores.size());
    double acc_sum = 0.0, sens_sum = 0.0, spec_sum = 0.0;
    std::size_t sens_n = 0, spec_n = 0;
    for (const auto& sc : scores) {
        result.per_repeat.push_back(sc.accuracy);
        acc_sum += sc.accuracy;
        result.totals += sc.counts;
        if (auto v = sensitivity(sc.counts)) {
            sens_sum += *v;
            ++sens_n;
        }
        if (auto v = specificity(sc.counts)) {
            spec_sum += *v;
            ++spec_n;
        }
    }
    result.mean_accuracy = acc_sum / static_cast<double>(scores.size());
    if (sens_n > 0) result.mean_sensitivity = sens_sum / static_cast<double>(sens_n);
    if (spec_n > 0) result.mean_specificity = spec_sum / static_cast<double>(spec_n);
    return result;
}

CvResult repeated_cv_accuracy(const Matrix& x, const std::vector<int>& y,
                              const CvConfig& cfg, const SvmSpec& spec,
                              unsigned workers) {
    return evaluate_cv(make_cv_problem(x, y, cfg), {}, spec, workers);
}

void GridConfig::validate() const {
    if (c_values.empty() || gamma_scales.empty()) {
        throw ConfigError("grid: empty C or gamma grid");
    }
    for (double c : c_values) {
        if (!(c > 0.0)) throw ConfigError("grid: C values must be > 0");
    }
    for (double g : gamma_scales) {
        if (!(g > 0.0)) throw ConfigError("grid: gamma values must be > 0");
    }
}

std::vector<double> GridConfig::gammas_for(std::size_t dim) const {
    std::vector<double> out = gamma_scales;
    if (scale_by_dim) {
        if (dim == 0) throw ConfigError("grid: zero feature dimension");
        for (double& g : out) g /= static_cast<double>(dim);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

GridResult grid_search(const CvProblem& problem,
                       const std::vector<std::size_t>& columns, const GridConfig& grid,
                       const SvmSpec& base, unsigned workers) {
    grid.validate();
    std::size_t dim = columns.empty() ? problem.per_repeat.front().cols : columns.size();
    std::vector<double> cs = grid.c_values;
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    std::vector<double> gammas = grid.gammas_for(dim);

    GridResult best;
    bool have = false;
    for (double c : cs) {
        for (double g : gammas) {
            SvmSpec spec = base;
            spec.c = c;
            spec.gamma = g;
            double acc = evaluate_cv(problem, columns, spec, workers).mean_accuracy;
            if (!have || acc > best.accuracy) {
                best = {c, g, acc};
                have = true;
            }
        }
    }
    return best;
}

}  // namespace mribow
