#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gdd/classifiers.hpp"
#include "gdd/types.hpp"

namespace gdd {

// Row indices into a training pool: fit on `train`, score on `validation`.
struct ValidationSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

// ---------------------------------------------------------------------------
// Feature selection
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxSubsetCandidates = 20;

// Builds the feature matrix (all pool rows) for a candidate subset, fitting
// any encoder state on `fit_rows` only.
using SubsetFeatureBuilder =
    std::function<Matrix(std::span<const std::size_t> subset, std::span<const std::size_t> fit_rows)>;

struct SubsetSearchResult {
    std::vector<std::size_t> subset;
    ClassifierKind kind = ClassifierKind::LogisticRegression;
    double auc = 0.0;
    std::size_t subsets_evaluated = 0;
};

// Exhaustive search over every non-empty subset of `candidates` and every
// kind, scored by mean validation AUC across `plan`. Ties prefer the smaller
// subset, then the lexicographically smaller one, then the earlier kind.
SubsetSearchResult select_channel_subset(std::span<const std::size_t> candidates, const SubsetFeatureBuilder& build,
                                         std::span<const int> labels, std::span<const ValidationSplit> plan,
                                         std::span<const ClassifierKind> kinds, const Hyperparams& hp,
                                         std::uint64_t seed);

// Per-dimension folded AUC, max(auc, 1 - auc), on `rows` (all rows if empty).
std::vector<double> dimension_scores(const Matrix& x, std::span<const int> labels, std::span<const std::size_t> rows = {});

// Univariate filter: the `max_dims` dimensions with the highest folded AUC,
// averaged over the training parts of `plan` (or over all rows when `plan`
// is empty). Returned in ascending index order.
std::vector<std::size_t> select_dims(const Matrix& x, std::span<const int> labels, std::size_t max_dims,
                                     std::span<const ValidationSplit> plan = {});

// ---------------------------------------------------------------------------
// Late fusion
// ---------------------------------------------------------------------------

struct FusionWeights {
    std::vector<double> alpha;

    void validate(std::size_t families) const;
};

// Per-player weighted sum of aligned score sets.
ScoreSet fuse(std::span<const ScoreSet> score_sets, const FusionWeights& weights);

// Number of weight tuples on a grid of `step` over `families` weights that
// sum to one: C(1/step + families - 1, families - 1).
std::size_t weight_grid_size(double step, std::size_t families);

// Calls `visit` with every grid tuple, in lexicographically ascending order.
void enumerate_weight_grid(double step, std::size_t families,
                           const std::function<void(const std::vector<double>&)>& visit);

struct GridSearchResult {
    FusionWeights weights;
    double auc = 0.0;
    std::size_t evaluated = 0;
};

// Maximises AUC of the fused scores over the weight grid; ties keep the
// lexicographically smallest tuple.
GridSearchResult grid_search_weights(std::span<const ScoreSet> score_sets, double step);

// ---------------------------------------------------------------------------
// Ensemble search over classifier assignments
// ---------------------------------------------------------------------------

// Scores of every (family, kind) pair for one outer fold. `validation` scores
// come from models fitted on the inner-training games, `test` scores from
// models fitted on all training games.
struct FoldScores {
    std::vector<std::vector<ScoreSet>> validation;  // [family][kind]
    std::vector<std::vector<ScoreSet>> test;        // [family][kind]
};

struct EnsembleFold {
    FusionWeights weights;
    double validation_auc = 0.0;
    MetricReport test;
};

struct EnsembleCandidate {
    std::vector<std::size_t> kinds;  // kind index per family
    std::vector<EnsembleFold> folds;
    double mean_validation_auc = 0.0;
    MetricReport mean_test;  // fold-averaged test metrics
};

// Every assignment of one kind per active family. For each fold the weights
// are grid-searched on validation scores, then applied to the test scores.
// Inactive families get weight 0 and kind index 0.
std::vector<EnsembleCandidate> ensemble_search(std::span<const FoldScores> folds, std::size_t kinds,
                                               std::span<const bool> active, double step);

// Index of the candidate with the best validation AUC for fold `fold`
// (ties: earliest candidate).
std::size_t select_candidate(std::span<const EnsembleCandidate> candidates, std::size_t fold);

}  // namespace gdd
