#pragma once

// Small synthetic experiments that run in a few seconds.

#include <filesystem>

#include "gdd/evaluation.hpp"
#include "gdd/synthetic.hpp"

namespace gdd::test {

inline SyntheticSpec tiny_spec(std::uint64_t seed, double effect) {
    SyntheticSpec spec;
    spec.n_games = 6;
    spec.duration_min_s = 300.0;
    spec.duration_max_s = 420.0;
    spec.seed = seed;
    if (effect > 0.0) {
        for (const char* ch : {"fau", "emotion", "mfcc"}) spec.effects[ch] = effect;
    }
    return spec;
}

inline ExperimentConfig tiny_config(std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.folds = 3;
    cfg.grid_step = 0.25;
    cfg.kinds = {ClassifierKind::LogisticRegression, ClassifierKind::GaussianNB};
    for (auto& f : cfg.families) {
        f.bins = {4, 8};
        f.gmm_components = 4;
        f.max_dims = 8;
    }
    return cfg;
}

}  // namespace gdd::test
