#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "suml/eval.hpp"
#include "suml/serialize.hpp"

namespace suml {

// Exit codes shared by the CLI surface: 0 success, 1 verification/training
// failure, 2 usage or config error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct CommonOpts {
    std::optional<std::uint64_t> seed;            // overrides the config seed
    std::optional<std::filesystem::path> out;     // overrides the run directory
};

// gen: synthesize train/test_easy/test_hard plus a manifest with the seed and
// cue statistics.
int cmd_gen(const std::filesystem::path& config_path, const CommonOpts& opts);

// analyze: cue report (records file) + plain-table summary on stdout.
int cmd_analyze(const std::filesystem::path& dataset_path, std::size_t top_k,
                const CommonOpts& opts);

// split: trains `n_seeds` contextless probes on train_path, splits eval_path,
// writes the split report and a subset-tagged copy of the eval set.
int cmd_split(const std::filesystem::path& train_path, const std::filesystem::path& eval_path,
              int n_seeds, const CommonOpts& opts);

// train: one run of erm/adversarial/suml per the config's train section;
// writes resolved_config.json, checkpoint.json, history.json.
int cmd_train(const std::filesystem::path& config_path, const CommonOpts& opts);

// eval: one report file per dataset + a comparison table on stdout.
int cmd_eval(const std::filesystem::path& checkpoint_path,
             const std::vector<std::filesystem::path>& dataset_paths, ReportFormat format,
             const CommonOpts& opts);

// Worst finite-difference relative error across the standard, contextless and
// adversarial objectives on a seeded random model and batch.
double gradcheck_max_rel_error(std::uint64_t seed);

// gradcheck: finite-difference verification of the ERM, contextless and
// adversarial gradients on a seeded random model; exit 0 iff all pass.
// inject_fault zeroes the analytic embedding gradient first (harness sanity).
int cmd_gradcheck(std::uint64_t seed, bool inject_fault, double* max_rel_error_out = nullptr);

// sweep: Cartesian grid over TrainConfig fields, one run directory per point,
// summary picks the best point by val loss. SUML_THREADS caps parallel points.
int cmd_sweep(const std::filesystem::path& config_path, const CommonOpts& opts);

// Grid expansion, exposed for tests and the sweep summary.
std::vector<Json> expand_grid(const Json& grid);

}  // namespace suml
