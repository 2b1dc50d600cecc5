#include "mribow/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "mribow/error.hpp"
#include "mribow/io.hpp"

namespace mribow {

using nlohmann::json;

Scaler scaler_fit(const Matrix& train) {
    if (train.rows < 2) throw DataError("scaler_fit: need at least 2 rows");
    Scaler s;
    s.mean.assign(train.cols, 0.0);
    s.sd.assign(train.cols, 0.0);
    for (std::size_t r = 0; r < train.rows; ++r) {
        for (std::size_t c = 0; c < train.cols; ++c) s.mean[c] += train.at(r, c);
    }
    for (double& m : s.mean) m /= static_cast<double>(train.rows);
    for (std::size_t r = 0; r < train.rows; ++r) {
        for (std::size_t c = 0; c < train.cols; ++c) {
            double d = train.at(r, c) - s.mean[c];
            s.sd[c] += d * d;
        }
    }
    for (double& v : s.sd) {
        v = std::sqrt(v / static_cast<double>(train.rows));
        if (v == 0.0) v = 1.0;
    }
    return s;
}

void scaler_apply_row(const Scaler& s, std::span<double> row) {
    if (row.size() != s.mean.size()) throw DataError("scaler: dimension mismatch");
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - s.mean[c]) / s.sd[c];
}

Matrix scaler_apply(const Scaler& s, const Matrix& x) {
    Matrix out = x;
    for (std::size_t r = 0; r < out.rows; ++r) scaler_apply_row(s, out.row(r));
    return out;
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
    if (x.size() != y.size()) throw DataError("rbf_kernel: dimension mismatch");
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - y[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

void SvmSpec::validate() const {
    if (!(c > 0.0)) throw ConfigError("svm: C must be > 0");
    if (!(gamma > 0.0)) throw ConfigError("svm: gamma must be > 0");
    if (!(tol > 0.0)) throw ConfigError("svm: tol must be > 0");
    if (max_sweeps < 1) throw ConfigError("svm: max_sweeps must be >= 1");
}

void SvmModel::validate() const {
    if (support_vectors.rows != dual_coefs.size()) {
        throw NumericError("svm model: coefficient/vector count mismatch");
    }
    double sum = 0.0;
    for (double a : dual_coefs) {
        sum += a;
        if (std::abs(a) > c + 1e-8) {
            throw NumericError("svm model: dual coefficient outside [0, C]");
        }
    }
    if (std::abs(sum) > 1e-8) {
        throw NumericError("svm model: sum of alpha_i y_i exceeds tolerance");
    }
}

namespace {

// SMO working state over a precomputed kernel matrix.
struct Smo {
    const Matrix& x;
    const std::vector<int>& y;
    const SvmSpec& spec;
    std::size_t n;
    Matrix k;
    std::vector<double> alpha;
    std::vector<double> err;  // f(x_i) - y_i
    double b = 0.0;
    const std::function<void(double)>& observer;

    Smo(const Matrix& x_, const std::vector<int>& y_, const SvmSpec& spec_,
        const std::function<void(double)>& obs)
        : x(x_), y(y_), spec(spec_), n(x_.rows), k(n, n), alpha(n, 0.0), err(n),
          observer(obs) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double v = rbf_kernel(x.row(i), x.row(j), spec.gamma);
                k.at(i, j) = v;
                k.at(j, i) = v;
            }
        }
        for (std::size_t i = 0; i < n; ++i) err[i] = -static_cast<double>(y[i]);
    }

    double objective() const {
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (alpha[i] == 0.0) continue;
            obj += alpha[i];
            for (std::size_t j = 0; j < n; ++j) {
                if (alpha[j] == 0.0) continue;
                obj -= 0.5 * alpha[i] * alpha[j] * y[i] * y[j] * k.at(i, j);
            }
        }
        return obj;
    }

    bool free_alpha(std::size_t i) const {
        return alpha[i] > 0.0 && alpha[i] < spec.c;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        double a1 = alpha[i1], a2 = alpha[i2];
        double y1 = y[i1], y2 = y[i2];
        double e1 = err[i1], e2 = err[i2];
        double s = y1 * y2;

        double lo, hi;
        if (s < 0.0) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(spec.c, spec.c + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - spec.c);
            hi = std::min(spec.c, a1 + a2);
        }
        if (lo >= hi) return false;

        double k11 = k.at(i1, i1), k12 = k.at(i1, i2), k22 = k.at(i2, i2);
        double eta = k11 + k22 - 2.0 * k12;
        double a2new;
        if (eta > 0.0) {
            a2new = a2 + y2 * (e1 - e2) / eta;
            a2new = std::clamp(a2new, lo, hi);
        } else {
            // Flat or concave direction: evaluate the objective at both ends.
            double f1 = y1 * e1 - a1 * k11 - s * a2 * k12;
            double f2 = y2 * e2 - a2 * k22 - s * a1 * k12;
            double l1 = a1 + s * (a2 - lo);
            double h1 = a1 + s * (a2 - hi);
            double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 +
                            0.5 * lo * lo * k22 + s * lo * l1 * k12;
            double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 +
                            0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if (obj_lo < obj_hi - 1e-12) {
                a2new = lo;
            } else if (obj_lo > obj_hi + 1e-12) {
                a2new = hi;
            } else {
                return false;
            }
        }
        if (std::abs(a2new - a2) < 1e-12 * (a2new + a2 + 1e-12)) return false;

        double a1new = a1 + s * (a2 - a2new);
        if (a1new < 0.0) a1new = 0.0;
        if (a1new > spec.c) a1new = spec.c;

        double d1 = y1 * (a1new - a1);
        double d2 = y2 * (a2new - a2);
        double b1 = b - e1 - d1 * k11 - d2 * k12;
        double b2 = b - e2 - d1 * k12 - d2 * k22;
        double bnew;
        if (a1new > 0.0 && a1new < spec.c) {
            bnew = b1;
        } else if (a2new > 0.0 && a2new < spec.c) {
            bnew = b2;
        } else {
            bnew = 0.5 * (b1 + b2);
        }

        double db = bnew - b;
        for (std::size_t i = 0; i < n; ++i) {
            err[i] += d1 * k.at(i1, i) + d2 * k.at(i2, i) + db;
        }
        alpha[i1] = a1new;
        alpha[i2] = a2new;
        b = bnew;
        if (observer) observer(objective());
        return true;
    }

    bool examine(std::size_t i2) {
        double y2 = y[i2];
        double a2 = alpha[i2];
        double r2 = err[i2] * y2;
        bool violates = (r2 < -spec.tol && a2 < spec.c) || (r2 > spec.tol && a2 > 0.0);
        if (!violates) return false;

        // Second-choice heuristic: maximize |e1 - e2| over free alphas.
        std::size_t best = n;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!free_alpha(i)) continue;
            double gap = std::abs(err[i] - err[i2]);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n && take_step(best, i2)) return true;

        for (std::size_t off = 0; off < n; ++off) {
            std::size_t i = (i2 + 1 + off) % n;
            if (free_alpha(i) && take_step(i, i2)) return true;
        }
        for (std::size_t off = 0; off < n; ++off) {
            std::size_t i = (i2 + 1 + off) % n;
            if (!free_alpha(i) && take_step(i, i2)) return true;
        }
        return false;
    }
};

}  // namespace

SvmTrainReport svm_train_report(const Matrix& x, const std::vector<int>& y,
                                const SvmSpec& spec,
                                const std::function<void(double)>& observer) {
    spec.validate();
    if (x.rows != y.size()) throw DataError("svm_train: row/label count mismatch");
    if (x.rows < 2) throw DataError("svm_train: need at least 2 examples");
    bool pos = false, neg = false;
    for (int v : y) {
        if (v == 1) pos = true;
        else if (v == -1) neg = true;
        else throw DataError("svm_train: labels must be -1 or +1");
    }
    if (!pos || !neg) throw DataError("svm_train: both classes required");

    Smo smo(x, y, spec, observer);
    int sweeps = 0;
    bool examine_all = true;
    bool converged = false;
    while (sweeps < spec.max_sweeps) {
        ++sweeps;
        std::size_t changed = 0;
        for (std::size_t i = 0; i < smo.n; ++i) {
            if (examine_all || smo.free_alpha(i)) changed += smo.examine(i) ? 1 : 0;
        }
        if (examine_all) {
            if (changed == 0) {
                converged = true;
                break;
            }
            examine_all = false;
        } else if (changed == 0) {
            examine_all = true;
        }
    }

    // Bias from free support vectors, else the midpoint of the KKT interval.
    // Clipped pairwise updates can leave an alpha a few ulps inside a bound,
    // so bound membership is decided with a tolerance relative to C.
    std::vector<double> g(smo.n, 0.0);
    for (std::size_t i = 0; i < smo.n; ++i) {
        for (std::size_t j = 0; j < smo.n; ++j) {
            if (smo.alpha[j] != 0.0) g[i] += smo.alpha[j] * y[j] * smo.k.at(i, j);
        }
    }
    const double bound_eps = 1e-8 * spec.c;
    double bias;
    std::size_t n_free = 0;
    double free_sum = 0.0;
    for (std::size_t i = 0; i < smo.n; ++i) {
        if (smo.alpha[i] > bound_eps && smo.alpha[i] < spec.c - bound_eps) {
            free_sum += y[i] - g[i];
            ++n_free;
        }
    }
    if (n_free > 0) {
        bias = free_sum / static_cast<double>(n_free);
    } else {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < smo.n; ++i) {
            double f = y[i] - g[i];
            bool lower = (smo.alpha[i] <= bound_eps && y[i] > 0) ||
                         (smo.alpha[i] >= spec.c - bound_eps && y[i] < 0);
            if (lower) lo = std::max(lo, f);
            else hi = std::min(hi, f);
        }
        if (!std::isfinite(lo)) bias = hi;
        else if (!std::isfinite(hi)) bias = lo;
        else bias = 0.5 * (lo + hi);
    }

    SvmTrainReport report;
    report.alphas = smo.alpha;
    report.dual_objective = smo.objective();
    report.sweeps = sweeps;
    report.converged = converged;

    SvmModel& m = report.model;
    m.gamma = spec.gamma;
    m.c = spec.c;
    m.bias = bias;
    std::size_t n_sv = 0;
    for (double a : smo.alpha) n_sv += a > 0.0 ? 1 : 0;
    m.support_vectors = Matrix(n_sv, x.cols);
    std::size_t r = 0;
    for (std::size_t i = 0; i < smo.n; ++i) {
        if (smo.alpha[i] <= 0.0) continue;
        auto src = x.row(i);
        std::copy(src.begin(), src.end(), m.support_vectors.row(r).begin());
        m.dual_coefs.push_back(smo.alpha[i] * y[i]);
        ++r;
    }
    m.validate();
    return report;
}

SvmModel svm_train(const Matrix& x, const std::vector<int>& y, const SvmSpec& spec) {
    return svm_train_report(x, y, spec).model;
}

SvmPrediction svm_predict(const SvmModel& m, std::span<const double> x) {
    if (x.size() != m.support_vectors.cols && m.support_vectors.rows > 0) {
        throw DataError("svm_predict: dimension mismatch");
    }
    double d = m.bias;
    for (std::size_t i = 0; i < m.support_vectors.rows; ++i) {
        d += m.dual_coefs[i] * rbf_kernel(m.support_vectors.row(i), x, m.gamma);
    }
    return {d >= 0.0 ? 1 : -1, d};
}

double svm_dual_objective(const Matrix& x, const std::vector<int>& y,
                          const std::vector<double>& alphas, double gamma) {
    if (x.rows != y.size() || x.rows != alphas.size()) {
        throw DataError("svm_dual_objective: size mismatch");
    }
    double obj = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        obj += alphas[i];
        if (alphas[i] == 0.0) continue;
        for (std::size_t j = 0; j < x.rows; ++j) {
            if (alphas[j] == 0.0) continue;
            obj -= 0.5 * alphas[i] * alphas[j] * y[i] * y[j] *
                   rbf_kernel(x.row(i), x.row(j), gamma);
        }
    }
    return obj;
}

void save_model(const SvmModel& m, const std::filesystem::path& path) {
    m.validate();
    json j;
    j["gamma"] = m.gamma;
    j["C"] = m.c;
    j["bias"] = m.bias;
    j["dual_coefs"] = m.dual_coefs;
    json svs = json::array();
    for (std::size_t r = 0; r < m.support_vectors.rows; ++r) {
        auto row = m.support_vectors.row(r);
        svs.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["support_vectors"] = std::move(svs);
    write_text_file(path, j.dump(2) + "\n");
}

SvmModel load_model(const std::filesystem::path& path) {
    json j = json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded()) throw DataError("malformed JSON in '" + path.string() + "'");
    SvmModel m;
    try {
        m.gamma = j.at("gamma").get<double>();
        m.c = j.at("C").get<double>();
        m.bias = j.at("bias").get<double>();
        m.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
        auto svs = j.at("support_vectors").get<std::vector<std::vector<double>>>();
        std::size_t cols = svs.empty() ? 0 : svs.front().size();
        m.support_vectors = Matrix(svs.size(), cols);
        for (std::size_t r = 0; r < svs.size(); ++r) {
            if (svs[r].size() != cols) {
                throw DataError("svm model: ragged support vectors");
            }
            std::copy(svs[r].begin(), svs[r].end(), m.support_vectors.row(r).begin());
        }
    } catch (const json::exception& e) {
        throw DataError("bad model file '" + path.string() + "': " + e.what());
    }
    m.validate();
    return m;
}

}  // namespace mribow
