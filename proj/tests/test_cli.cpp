#include <doctest.h>

#include <cstdlib>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "mribow/io.hpp"
#include "support/tempdir.hpp"

using mribow::read_text_file;
using mribow::write_text_file;
using mribow::test::TempDir;

namespace {

struct RunResult {
    int code = -1;
    std::string err;
};

RunResult run_cli(const TempDir& tmp, const std::string& args) {
    auto err_path = tmp / "stderr.txt";
    std::string cmd = std::string(MRIBOW_CLI_PATH) + " " + args + " >" +
                      (tmp / "stdout.txt").string() + " 2>" + err_path.string();
    int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    if (std::filesystem::exists(err_path)) r.err = read_text_file(err_path);
    return r;
}

std::string tiny_config_text(const std::filesystem::path& out) {
    return "out_dir = " + out.string() +
           "\n"
           "seed = 11\n"
           "synth.n_control = 3\n"
           "synth.n_mtbi = 3\n"
           "synth.dims = 1x32x32\n"
           "synth.metrics = FA\n"
           "synth.regions = CorpusCallosum,Thalamus\n"
           "codebook.k_per_cohort = 2\n"
           "kmeans.restarts = 2\n"
           "cv.fraction = 0.34\n"
           "cv.repeats = 3\n"
           "grid.c = 1\n"
           "grid.gamma_scales = 1\n"
           "select.max_size = 1\n"
           "eval.ratios = 0.5\n";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("pipeline command produces the full artifact set") {
    TempDir tmp;
    write_text_file(tmp / "run.cfg", tiny_config_text(tmp / "out"));
    RunResult r = run_cli(tmp, "pipeline --config " + (tmp / "run.cfg").string());
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    for (const char* f :
         {"dataset/manifest.json", "patches.csv", "features.csv", "selection.json",
          "selection.csv", "metrics.json", "model.json", "run.json",
          "subset_curve.csv", "ratio_curve.csv", "contrast.csv"}) {
        CHECK(std::filesystem::exists(tmp / "out" / f));
    }
}

TEST_CASE("stage commands run prerequisites on demand") {
    TempDir tmp;
    write_text_file(tmp / "run.cfg", tiny_config_text(tmp / "out"));
    RunResult r = run_cli(tmp, "encode --config " + (tmp / "run.cfg").string());
    CHECK(r.code == 0);
    CHECK(std::filesystem::exists(tmp / "out" / "dataset" / "manifest.json"));
    CHECK(std::filesystem::exists(tmp / "out" / "features.csv"));
    CHECK(std::filesystem::exists(tmp / "out" / "run.json"));
    CHECK_FALSE(std::filesystem::exists(tmp / "out" / "selection.json"));
}

TEST_CASE("missing config file exits 2 with a single-line error") {
    TempDir tmp;
    RunResult r = run_cli(tmp, "synth --config " + (tmp / "absent.cfg").string());
    CHECK(r.code == 2);
    CHECK(r.err.starts_with("error: config:"));
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

TEST_CASE("unknown config key exits 2") {
    TempDir tmp;
    write_text_file(tmp / "run.cfg", "dial = 11\n");
    RunResult r = run_cli(tmp, "synth --config " + (tmp / "run.cfg").string());
    CHECK(r.code == 2);
    CHECK(r.err.find("dial") != std::string::npos);
}

TEST_CASE("absent external dataset exits 3") {
    TempDir tmp;
    std::string cfg = tiny_config_text(tmp / "out") + "synth.enabled = false\n" +
                      "dataset_dir = " + (tmp / "nowhere").string() + "\n";
    write_text_file(tmp / "run.cfg", cfg);
    RunResult r = run_cli(tmp, "extract --config " + (tmp / "run.cfg").string());
    CHECK(r.code == 3);
    CHECK(r.err.starts_with("error: data:"));
}

TEST_CASE("seed override changes artifacts, worker override does not") {
    TempDir tmp;
    write_text_file(tmp / "run.cfg", tiny_config_text(tmp / "out_a"));
    CHECK(run_cli(tmp, "pipeline --config " + (tmp / "run.cfg").string()).code == 0);
    CHECK(run_cli(tmp, "pipeline --config " + (tmp / "run.cfg").string() +
                           " --out " + (tmp / "out_b").string() + " --workers 3")
              .code == 0);
    CHECK(run_cli(tmp, "pipeline --config " + (tmp / "run.cfg").string() +
                           " --out " + (tmp / "out_c").string() + " --seed 12")
              .code == 0);

    auto hash_of = [&](const std::string& dir, const std::string& file) {
        auto j = nlohmann::json::parse(
            read_text_file(tmp / dir / "run.json"));
        return j["artifacts"][file].get<std::string>();
    };
    CHECK(hash_of("out_a", "features.csv") == hash_of("out_b", "features.csv"));
    CHECK(hash_of("out_a", "features.csv") != hash_of("out_c", "features.csv"));
}

TEST_CASE("missing subcommand or flags fail fast") {
    TempDir tmp;
    CHECK(run_cli(tmp, "").code != 0);
    CHECK(run_cli(tmp, "synth").code != 0);
    CHECK(run_cli(tmp, "frobnicate --config x").code != 0);
}

}  // TEST_SUITE cli
