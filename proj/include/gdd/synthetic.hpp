#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gdd/dataset.hpp"

namespace gdd {

// Default synthetic channels: the five extractor outputs at desk-scale rates
// and dimensions (frame channels at 1 fps, MFCC at a 0.5 s hop).
std::vector<ChannelSpec> default_synthetic_channels();

// Per player and per channel dimension, a latent mean drawn from N(0, 1),
// shifted by the effect size for spies; frames add an Ornstein-Uhlenbeck
// drift and white noise around it. Effect sizes are therefore in units of
// the between-player standard deviation.
struct SyntheticSpec {
    std::size_t n_games = 20;
    std::size_t players_min = 5;
    std::size_t players_max = 8;
    std::size_t spies_min = 2;
    std::size_t spies_max = 3;
    double duration_min_s = 1800.0;
    double duration_max_s = 3900.0;
    std::vector<ChannelSpec> channels = default_synthetic_channels();
    // "channel" shifts every dimension, "channel[i]" a single one.
    std::map<std::string, double> effects;
    double drift_sd = 0.5;
    double drift_tau_s = 120.0;
    double noise_sd = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
    double effect_for(const std::string& channel, std::size_t dim) const;
};

struct SyntheticData {
    GameDataset dataset;  // channel_files set, source_dir empty
    std::map<std::string, std::vector<FrameFeatureSeries>> series;  // player id -> one per channel
};

SyntheticData synthesize(const SyntheticSpec& spec);

// Writes `manifest.json` and one CSV per player and channel under `out_dir`
// and returns the dataset as loaded from there.
GameDataset generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

}  // namespace gdd
