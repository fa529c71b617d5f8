#pragma once

#include <string>
#include <vector>

#include "gdd/evaluation.hpp"
#include "gdd/pipeline.hpp"

namespace gdd {

inline constexpr int kBundleVersion = 1;

struct BundledFamily {
    FamilyConfig config;
    FamilyChoice choice;
    FittedEncoder encoder;
    TrainedModel model;
};

// Everything needed to score new players: fitted encoders, one trained
// classifier per family, and the fusion weights.
struct ModelBundle {
    int version = kBundleVersion;
    SamplingPolicy sampling;
    std::vector<ChannelSpec> channels;
    std::vector<BundledFamily> families;
    FusionWeights weights;
    double validation_auc = 0.0;
    std::vector<std::string> trained_on_games;
};

// Selects representations, kinds and weights on an 80/20 game holdout of
// `ds`, then refits every encoder and classifier on all of `ds`.
ModelBundle train_bundle(const GameDataset& ds, const ExperimentConfig& config);

struct BundleScores {
    std::vector<ScoreSet> families;  // in bundle order
    ScoreSet fused;
};

BundleScores score_bundle(const ModelBundle& bundle, const GameDataset& ds, std::size_t jobs = 1);

struct EncodedFamily {
    std::string family;
    std::vector<std::string> player_ids;
    std::vector<int> labels;
    Matrix features;
};

struct EncodeResult {
    std::vector<FittedEncoder> encoders;
    std::vector<EncodedFamily> features;
};

// Fits every family's encoder on all of `ds` without any search: histogram
// families use their first mode and bin count over all candidate dims.
EncodeResult encode_dataset(const GameDataset& ds, const ExperimentConfig& config);

}  // namespace gdd
