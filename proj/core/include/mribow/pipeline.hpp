#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mribow/config.hpp"
#include "mribow/cv.hpp"
#include "mribow/features.hpp"
#include "mribow/patch.hpp"

namespace mribow {

// Pipeline stages write their artifacts under cfg.out_dir and record a
// fingerprint (hash of the relevant config slice plus the upstream
// fingerprint) in <stage>.stage.json. A stage whose fingerprint matches and
// whose files all exist is reused instead of recomputed; any parameter or
// input change upstream invalidates everything downstream.
struct StageOutcome {
    std::string fingerprint;
    std::vector<std::filesystem::path> files;  // relative to out_dir
    bool reused = false;
};

StageOutcome stage_synth(const RunConfig& cfg);
StageOutcome stage_extract(const RunConfig& cfg);
StageOutcome stage_codebook(const RunConfig& cfg);
StageOutcome stage_encode(const RunConfig& cfg);
StageOutcome stage_select(const RunConfig& cfg);
StageOutcome stage_evaluate(const RunConfig& cfg);

// Runs every stage in order and returns the evaluate outcome.
StageOutcome run_pipeline(const RunConfig& cfg);

// Writes <out_dir>/run.json: the canonical config plus an `artifacts` map of
// relative path -> content hash for every file under out_dir (run.json
// itself excluded). Two runs are byte-equivalent iff these maps match.
void write_run_json(const RunConfig& cfg);

// CV problem whose per-repeat feature matrices come from codebooks learned
// on that repeat's training subjects only (the leakage-free protocol).
CvProblem make_honest_bow_problem(const Dataset& ds, const PatchIndex& idx,
                                  const FeatureLayout& layout, int k_per_cohort,
                                  const KMeansConfig& km, bool normalized,
                                  const CvConfig& cv, unsigned workers = 1);

}  // namespace mribow
