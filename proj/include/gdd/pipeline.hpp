#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdd/classifiers.hpp"
#include "gdd/dataset.hpp"
#include "gdd/encoders.hpp"
#include "gdd/fusion.hpp"
#include "gdd/liarrank.hpp"
#include "gdd/sampling.hpp"

namespace gdd {

// How a family turns a player's clips into a fixed-length vector.
enum class FamilyType {
    Histogram,       // histograms over a searched subset of channel dims
    FisherVector,    // Fisher Vector of clip vectors
    LiarRankFisher,  // LiarRank of a dim-selected Fisher Vector
};

std::string_view to_string(FamilyType type) noexcept;
FamilyType family_type_from_string(std::string_view s);

struct FamilyConfig {
    std::string name;
    FamilyType type = FamilyType::Histogram;
    std::string channel;

    // Histogram families.
    std::vector<HistogramMode> modes{HistogramMode::Combined};
    std::vector<std::size_t> bins{4, 8, 16, 32};
    HistogramNorm normalize = HistogramNorm::Frequencies;
    std::optional<std::vector<std::size_t>> candidate_dims;  // all channel dims when unset

    // Fisher Vector families.
    std::size_t gmm_components = 32;
    std::size_t gmm_max_iters = 100;
    double gmm_tol = 1e-6;
    double gmm_variance_floor = 1e-6;
    bool fv_normalize = true;

    // LiarRank families.
    std::size_t max_dims = 16;
    bool normalize_ranks = false;

    bool operator==(const FamilyConfig&) const = default;
};

// Five families: FAU, MFCC, emotion and eye/head histograms or FVs, plus
// LiarRank over face-embedding Fisher Vectors.
std::vector<FamilyConfig> default_families();

// Representation hyperparameters chosen for one family in one fold.
struct FamilyChoice {
    HistogramMode mode = HistogramMode::Combined;
    std::size_t bins = 0;
    std::vector<std::size_t> dims;  // histogram subset
    ClassifierKind best_kind = ClassifierKind::LogisticRegression;
    double validation_auc = 0.0;
};

// Training pool handed to family fitting: games, their players, and every
// player's clips.
struct PlayerPool {
    std::vector<const Game*> games;
    std::vector<const PlayerRecord*> players;  // flattened in game order
    std::vector<int> labels;
    const std::map<std::string, PlayerClips, std::less<>>* clips = nullptr;

    static PlayerPool from_games(std::vector<const Game*> games,
                                 const std::map<std::string, PlayerClips, std::less<>>& clips);
    std::vector<std::string> game_ids() const;
    std::vector<std::string> player_ids() const;
    const ChannelClips& channel(std::size_t player, const std::string& channel) const;
};

// Encoder state fitted on a set of training games.
struct FittedEncoder {
    std::string family;
    FamilyType type = FamilyType::Histogram;
    std::string channel;
    std::optional<HistogramEncoding> histogram;
    std::optional<GmmModel> gmm;
    bool fv_normalize = true;
    std::vector<std::size_t> fv_dims;  // LiarRank: selected Fisher Vector dims
    std::optional<LiarRankCorpus> corpus;
    bool normalize_ranks = false;
    std::vector<std::string> fitted_on_games;

    // One row per player. `player_ids` enables LiarRank self-exclusion.
    Matrix encode(std::span<const ChannelClips* const> players, std::span<const std::string> player_ids) const;
};

FittedEncoder fit_encoder(const FamilyConfig& cfg, const FamilyChoice& choice, const PlayerPool& pool,
                          std::uint64_t seed);

Matrix encode_pool(const FittedEncoder& enc, const PlayerPool& pool);

// A family's encoder plus a trained classifier: scores unseen players.
struct FittedFamily {
    FittedEncoder encoder;
    TrainedModel model;

    ScoreSet score(const PlayerPool& players) const;
};

// Throws LeakageDetected if any game in `scored` was used to fit `encoder`.
void assert_not_fitted_on(const FittedEncoder& encoder, const PlayerPool& scored);

// Picks the family's representation (histogram mode, bins, dim subset) and
// its best single kind using `inner` (fit on inner.train, score
// inner.validation; indices into `pool`).
FamilyChoice choose_representation(const FamilyConfig& cfg, const PlayerPool& pool, const ValidationSplit& inner,
                                   std::span<const ClassifierKind> kinds, const Hyperparams& hp, std::uint64_t seed);

}  // namespace gdd
