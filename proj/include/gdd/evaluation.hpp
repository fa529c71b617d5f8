#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdd/classifiers.hpp"
#include "gdd/dataset.hpp"
#include "gdd/fusion.hpp"
#include "gdd/pipeline.hpp"
#include "gdd/sampling.hpp"

namespace gdd {

// ---------------------------------------------------------------------------
// Game-disjoint cross-validation
// ---------------------------------------------------------------------------

struct CvPlan {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::map<std::string, std::size_t> assignment;  // game id -> fold

    // Game ids per fold, in dataset order.
    std::vector<std::vector<std::string>> folds(std::span<const Game> games) const;
};

// Seeded shuffle of the games, then round-robin fold assignment.
CvPlan make_cv_plan(std::span<const Game> games, std::size_t k, std::uint64_t seed);

struct FoldSplit {
    std::vector<std::string> train_games;
    std::vector<std::string> test_games;

    // Throws LeakageDetected if a game id appears on both sides.
    void check_disjoint() const;
};

std::vector<FoldSplit> fold_splits(const CvPlan& plan, std::span<const Game> games);

// ---------------------------------------------------------------------------
// Experiment
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    std::optional<std::string> dataset;  // manifest path, resolved by the CLI
    std::uint64_t seed = 0;
    std::size_t folds = 10;
    double validation_fraction = 0.2;
    double grid_step = 0.1;
    std::size_t top_n = 5;
    SamplingPolicy sampling;
    Hyperparams hyperparams;
    std::vector<ClassifierKind> kinds{kAllClassifierKinds.begin(), kAllClassifierKinds.end()};
    std::vector<FamilyConfig> families = default_families();
    std::size_t jobs = 1;  // not part of the report: results do not depend on it

    void validate() const;
};

// One family's outcome in one fold.
struct FamilyFoldResult {
    std::string family;
    FamilyChoice choice;
    std::vector<std::size_t> fv_dims;           // LiarRank families
    std::vector<double> validation_auc;         // per kind
    std::vector<double> test_auc;               // per kind
    MetricReport test;                          // of the best validation kind
    std::vector<std::string> fitted_on_games;   // encoder refit on all training games
};

struct FoldResult {
    std::size_t fold = 0;
    std::vector<std::string> train_games;
    std::vector<std::string> inner_train_games;
    std::vector<std::string> validation_games;
    std::vector<std::string> test_games;
    std::vector<FamilyFoldResult> families;
    // Ensemble chosen for this fold by validation AUC.
    std::vector<ClassifierKind> kinds;
    FusionWeights weights;
    double validation_auc = 0.0;
    MetricReport test;
};

struct EnsembleRow {
    std::vector<ClassifierKind> kinds;  // per family, in config order
    std::vector<bool> active;
    double mean_validation_auc = 0.0;
    MetricReport mean;  // fold-averaged test metrics
};

struct FamilySummary {
    std::string family;
    MetricReport mean;  // fold-averaged test metrics of each fold's best kind
    std::vector<double> fold_auc;
};

struct AblationRow {
    std::string removed;
    MetricReport mean;
    std::vector<double> fold_auc;
    double delta_auc = 0.0;  // full minus ablated
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<FoldResult> folds;
    MetricReport mean;  // headline ensemble, fold-averaged
    std::vector<FamilySummary> families;
    std::vector<EnsembleRow> top;
    std::vector<AblationRow> ablation;  // empty unless ablation was run
};

// Everything needed to rerun the ensemble stage without refitting.
struct ExperimentRun {
    ExperimentReport report;
    std::vector<FoldScores> scores;
};

// Samples clips for every player of `ds`.
std::map<std::string, PlayerClips, std::less<>> extract_clips(const GameDataset& ds, const SamplingPolicy& policy,
                                                              std::size_t jobs);

ExperimentRun run_experiment(const GameDataset& ds, const ExperimentConfig& config);

// Same with explicit folds; every split is checked for disjointness first.
ExperimentRun run_experiment(const GameDataset& ds, const ExperimentConfig& config,
                             std::span<const FoldSplit> splits);

// One row per family: the ensemble stage rerun without it on the same
// folds, seeds and cached family scores.
std::vector<AblationRow> ablate_leave_one_out(const ExperimentRun& run);

std::vector<AblationRow> ablate_leave_one_out(const GameDataset& ds, const ExperimentConfig& config);

}  // namespace gdd
