#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "mribow/error.hpp"
#include "mribow/pipeline.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("-c,--config", opts.config_path, "run config file")->required();
    cmd->add_option("-o,--out", opts.out_dir, "override out_dir");
    cmd->add_option("-s,--seed", opts.seed, "override seed");
    cmd->add_option("-w,--workers", opts.workers, "override worker count");
}

mribow::RunConfig load(const CommonOpts& opts) {
    mribow::RunConfig cfg = mribow::load_run_config(opts.config_path);
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.workers > 0) cfg.workers = static_cast<unsigned>(opts.workers);
    cfg.validate();
    return cfg;
}

int run_stage(const CommonOpts& opts,
              mribow::StageOutcome (*stage)(const mribow::RunConfig&)) {
    mribow::RunConfig cfg = load(opts);
    mribow::StageOutcome out = stage(cfg);
    mribow::write_run_json(cfg);
    std::printf("%s%s\n", out.reused ? "reused " : "",
                out.fingerprint.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"region-wise bag-of-visual-words study toolkit"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        mribow::StageOutcome (*stage)(const mribow::RunConfig&);
    };
    const Sub subs[] = {
        {"synth", "generate a synthetic cohort dataset", mribow::stage_synth},
        {"extract", "cut masked slice patches into patches.csv", mribow::stage_extract},
        {"codebook", "learn per-cohort visual word codebooks", mribow::stage_codebook},
        {"encode", "encode subjects into the feature table", mribow::stage_encode},
        {"select", "greedy forward feature selection", mribow::stage_select},
        {"evaluate", "cross-validated evaluation and reports", mribow::stage_evaluate},
        {"pipeline", "run every stage in order", mribow::run_pipeline},
    };

    CommonOpts opts;
    for (const Sub& s : subs) {
        CLI::App* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, opts);
        cmd->callback([&opts, stage = s.stage] {
            int rc = run_stage(opts, stage);
            if (rc != 0) throw CLI::RuntimeError(rc);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const mribow::ConfigError& e) {
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 2;
    } catch (const mribow::DataError& e) {
        std::fprintf(stderr, "error: data: %s\n", e.what());
        return 3;
    } catch (const mribow::NumericError& e) {
        std::fprintf(stderr, "error: numeric: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
