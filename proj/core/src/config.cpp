#include "mribow/config.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "mribow/error.hpp"
#include "mribow/io.hpp"
#include "mribow/text.hpp"

namespace mribow {

namespace {

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

std::vector<double> parse_doubles(std::string_view s) {
    std::vector<double> out;
    for (auto part : split(s, ',')) out.push_back(parse_double_strict(trim(part)));
    if (out.empty()) throw ConfigError("empty number list");
    return out;
}

bool parse_bool(std::string_view s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ConfigError("expected true or false, got '" + std::string(s) + "'");
}

Dims parse_dims(std::string_view s) {
    auto parts = split(s, 'x');
    if (parts.size() != 3) throw ConfigError("dims must look like 2x48x32");
    Dims d;
    d.nz = static_cast<std::size_t>(parse_u64_strict(trim(parts[0])));
    d.ny = static_cast<std::size_t>(parse_u64_strict(trim(parts[1])));
    d.nx = static_cast<std::size_t>(parse_u64_strict(trim(parts[2])));
    return d;
}

std::string dims_string(Dims d) {
    return std::to_string(d.nz) + "x" + std::to_string(d.ny) + "x" +
           std::to_string(d.nx);
}

std::vector<MetricId> parse_metrics(std::string_view s) {
    std::vector<MetricId> out;
    for (auto part : split(s, ',')) out.push_back(parse_metric(trim(part)));
    return out;
}

std::vector<RegionId> parse_regions(std::string_view s) {
    std::vector<RegionId> out;
    for (auto part : split(s, ',')) out.push_back(parse_region(trim(part)));
    return out;
}

template <typename T>
std::string join_ids(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::string(to_string(v[i]));
    }
    return s;
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"out_dir", [](RunConfig& c, std::string_view v) { c.out_dir = std::string(v); }},
        {"dataset_dir",
         [](RunConfig& c, std::string_view v) { c.dataset_dir = std::string(v); }},
        {"mode", [](RunConfig& c, std::string_view v) { c.mode = std::string(v); }},
        {"honest_codebooks",
         [](RunConfig& c, std::string_view v) { c.honest_codebooks = parse_bool(v); }},
        {"seed", [](RunConfig& c, std::string_view v) { c.seed = parse_u64_strict(v); }},
        {"workers",
         [](RunConfig& c, std::string_view v) {
             c.workers = static_cast<unsigned>(parse_u64_strict(v));
         }},
        {"synth.enabled",
         [](RunConfig& c, std::string_view v) { c.synth_enabled = parse_bool(v); }},
        {"synth.n_control",
         [](RunConfig& c, std::string_view v) {
             c.synth.n_control = static_cast<int>(parse_int_strict(v));
         }},
        {"synth.n_mtbi",
         [](RunConfig& c, std::string_view v) {
             c.synth.n_mtbi = static_cast<int>(parse_int_strict(v));
         }},
        {"synth.dims",
         [](RunConfig& c, std::string_view v) { c.synth.dims = parse_dims(v); }},
        {"synth.metrics",
         [](RunConfig& c, std::string_view v) { c.synth.metrics = parse_metrics(v); }},
        {"synth.regions",
         [](RunConfig& c, std::string_view v) { c.synth.regions = parse_regions(v); }},
        {"synth.texture_contrast",
         [](RunConfig& c, std::string_view v) {
             c.synth.texture_contrast = parse_double_strict(v);
         }},
        {"synth.mean_shift",
         [](RunConfig& c, std::string_view v) {
             c.synth.mean_shift = parse_double_strict(v);
         }},
        {"synth.noise_sigma",
         [](RunConfig& c, std::string_view v) {
             c.synth.noise_sigma = parse_double_strict(v);
         }},
        {"patch.size",
         [](RunConfig& c, std::string_view v) {
             c.patch.size = static_cast<int>(parse_int_strict(v));
         }},
        {"patch.stride",
         [](RunConfig& c, std::string_view v) {
             c.patch.stride = static_cast<int>(parse_int_strict(v));
         }},
        {"patch.coverage",
         [](RunConfig& c, std::string_view v) {
             c.patch.coverage_threshold = parse_double_strict(v);
         }},
        {"codebook.k_per_cohort",
         [](RunConfig& c, std::string_view v) {
             c.k_per_cohort = static_cast<int>(parse_int_strict(v));
         }},
        {"kmeans.restarts",
         [](RunConfig& c, std::string_view v) {
             c.kmeans.n_restarts = static_cast<int>(parse_int_strict(v));
         }},
        {"kmeans.max_iter",
         [](RunConfig& c, std::string_view v) {
             c.kmeans.max_iter = static_cast<int>(parse_int_strict(v));
         }},
        {"kmeans.rel_tol",
         [](RunConfig& c, std::string_view v) {
             c.kmeans.rel_tol = parse_double_strict(v);
         }},
        {"encode.normalized",
         [](RunConfig& c, std::string_view v) {
             c.normalized_histograms = parse_bool(v);
         }},
        {"cv.fraction",
         [](RunConfig& c, std::string_view v) {
             c.cv.validation_fraction = parse_double_strict(v);
         }},
        {"cv.repeats",
         [](RunConfig& c, std::string_view v) {
             c.cv.repeats = static_cast<int>(parse_int_strict(v));
         }},
        {"cv.stratified",
         [](RunConfig& c, std::string_view v) { c.cv.stratified = parse_bool(v); }},
        {"grid.c",
         [](RunConfig& c, std::string_view v) { c.grid.c_values = parse_doubles(v); }},
        {"grid.gamma_scales",
         [](RunConfig& c, std::string_view v) {
             c.grid.gamma_scales = parse_doubles(v);
         }},
        {"grid.scale_by_dim",
         [](RunConfig& c, std::string_view v) {
             c.grid.scale_by_dim = parse_bool(v);
         }},
        {"svm.tol",
         [](RunConfig& c, std::string_view v) { c.svm.tol = parse_double_strict(v); }},
        {"svm.max_sweeps",
         [](RunConfig& c, std::string_view v) {
             c.svm.max_sweeps = static_cast<int>(parse_int_strict(v));
         }},
        {"select.max_size",
         [](RunConfig& c, std::string_view v) {
             c.select_max_size = static_cast<int>(parse_int_strict(v));
         }},
        {"eval.ratios",
         [](RunConfig& c, std::string_view v) { c.eval_ratios = parse_doubles(v); }},
        {"baseline.regions",
         [](RunConfig& c, std::string_view v) {
             c.baseline_regions = parse_regions(v);
         }},
    };
    return table;
}

}  // namespace

void RunConfig::validate() const {
    if (out_dir.empty()) throw ConfigError("config: out_dir is empty");
    if (mode != "bow" && mode != "mean_baseline") {
        throw ConfigError("config: mode must be bow or mean_baseline, got '" + mode +
                          "'");
    }
    if (workers < 1) throw ConfigError("config: workers must be >= 1");
    if (synth_enabled) synth.validate();
    patch.validate();
    if (k_per_cohort < 1) throw ConfigError("config: codebook.k_per_cohort must be >= 1");
    kmeans.validate();
    cv.validate();
    grid.validate();
    svm.validate();
    if (select_max_size < 0) throw ConfigError("config: select.max_size must be >= 0");
    if (eval_ratios.empty()) throw ConfigError("config: eval.ratios is empty");
    for (double r : eval_ratios) {
        if (!(r > 0.0 && r < 1.0)) {
            throw ConfigError("config: eval.ratios entries must be in (0, 1)");
        }
    }
    if (baseline_regions.empty()) throw ConfigError("config: baseline.regions is empty");
}

RunConfig parse_run_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto eq = sv.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        }
        std::string key(trim(sv.substr(0, eq)));
        std::string_view value = trim(sv.substr(eq + 1));
        auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
        try {
            it->second(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        } catch (const DataError& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    return parse_run_config_text(text);
}

std::string canonical_config(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv = {
        {"out_dir", cfg.out_dir.generic_string()},
        {"dataset_dir", cfg.dataset_dir.generic_string()},
        {"mode", cfg.mode},
        {"honest_codebooks", cfg.honest_codebooks ? "true" : "false"},
        {"seed", std::to_string(cfg.seed)},
        {"workers", std::to_string(cfg.workers)},
        {"synth.enabled", cfg.synth_enabled ? "true" : "false"},
        {"synth.n_control", std::to_string(cfg.synth.n_control)},
        {"synth.n_mtbi", std::to_string(cfg.synth.n_mtbi)},
        {"synth.dims", dims_string(cfg.synth.dims)},
        {"synth.metrics", join_ids(cfg.synth.metrics)},
        {"synth.regions", join_ids(cfg.synth.regions)},
        {"synth.texture_contrast", format_double(cfg.synth.texture_contrast)},
        {"synth.mean_shift", format_double(cfg.synth.mean_shift)},
        {"synth.noise_sigma", format_double(cfg.synth.noise_sigma)},
        {"patch.size", std::to_string(cfg.patch.size)},
        {"patch.stride", std::to_string(cfg.patch.stride)},
        {"patch.coverage", format_double(cfg.patch.coverage_threshold)},
        {"codebook.k_per_cohort", std::to_string(cfg.k_per_cohort)},
        {"kmeans.restarts", std::to_string(cfg.kmeans.n_restarts)},
        {"kmeans.max_iter", std::to_string(cfg.kmeans.max_iter)},
        {"kmeans.rel_tol", format_double(cfg.kmeans.rel_tol)},
        {"encode.normalized", cfg.normalized_histograms ? "true" : "false"},
        {"cv.fraction", format_double(cfg.cv.validation_fraction)},
        {"cv.repeats", std::to_string(cfg.cv.repeats)},
        {"cv.stratified", cfg.cv.stratified ? "true" : "false"},
        {"grid.c", join_doubles(cfg.grid.c_values)},
        {"grid.gamma_scales", join_doubles(cfg.grid.gamma_scales)},
        {"grid.scale_by_dim", cfg.grid.scale_by_dim ? "true" : "false"},
        {"svm.tol", format_double(cfg.svm.tol)},
        {"svm.max_sweeps", std::to_string(cfg.svm.max_sweeps)},
        {"select.max_size", std::to_string(cfg.select_max_size)},
        {"eval.ratios", join_doubles(cfg.eval_ratios)},
        {"baseline.regions", join_ids(cfg.baseline_regions)},
    };
    std::sort(kv.begin(), kv.end());
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

}  // namespace mribow
