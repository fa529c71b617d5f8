#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gdd/dataset.hpp"
#include "gdd/types.hpp"

namespace gdd {

// Per training game and per selected scalar feature, the values of that
// game's players, sorted in descending order.
struct LiarRankCorpus {
    std::vector<std::size_t> dims;      // indices into player feature vectors
    std::vector<std::string> game_ids;  // order of the rank vector
    // sorted_values[dim position][game position], descending
    std::vector<std::vector<std::vector<double>>> sorted_values;
    // Training players: their game position and their stored values per dim position.
    std::map<std::string, std::size_t, std::less<>> member_game;
    std::map<std::string, std::vector<double>, std::less<>> member_values;

    std::size_t games() const { return game_ids.size(); }
    std::size_t game_size(std::size_t game) const;
    std::size_t game_index(std::string_view game_id) const;
};

struct LiarRankVector {
    std::string player_id;
    std::size_t dims = 0;
    std::size_t games = 0;
    std::vector<int> ranks;  // dims x games, row-major

    int at(std::size_t dim, std::size_t game) const { return ranks[dim * games + game]; }
};

LiarRankCorpus build_corpus(std::span<const Game> training_games,
                            const std::map<std::string, Vector, std::less<>>& player_features,
                            std::vector<std::size_t> dims);

// 1 + number of values in game `game` (for dim position `dim`) strictly
// greater than `value`: the query's position in the descending sort of the
// union, placed ahead of equal values.
int liarrank_scalar(const LiarRankCorpus& corpus, std::size_t game, std::size_t dim, double value);
int liarrank_scalar(const LiarRankCorpus& corpus, std::string_view game_id, std::size_t dim, double value);

// Ranks of `values` (a full player feature vector) against every training
// game for every corpus dim. If `player_id` names a training player, its own
// stored value is removed from its game before ranking.
LiarRankVector liarrank_vector(const LiarRankCorpus& corpus, const Vector& values,
                               std::optional<std::string_view> player_id = std::nullopt);

// Converts ranks to a feature vector. With `normalize`, each rank is divided
// by (game size + 1).
Vector liarrank_features(const LiarRankCorpus& corpus, const LiarRankVector& v, bool normalize);

}  // namespace gdd
