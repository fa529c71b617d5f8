#include "gdd/liarrank.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gdd/error.hpp"

namespace gdd {

std::size_t LiarRankCorpus::game_size(std::size_t game) const {
    return sorted_values.empty() ? 0 : sorted_values.front().at(game).size();
}

std::size_t LiarRankCorpus::game_index(std::string_view game_id) const {
    const auto it = std::find(game_ids.begin(), game_ids.end(), game_id);
    if (it == game_ids.end()) throw Error(ErrorCode::UnknownGame, std::string(game_id));
    return static_cast<std::size_t>(it - game_ids.begin());
}

LiarRankCorpus build_corpus(std::span<const Game> training_games,
                            const std::map<std::string, Vector, std::less<>>& player_features,
                            std::vector<std::size_t> dims) {
    LiarRankCorpus corpus;
    corpus.dims = std::move(dims);
    corpus.sorted_values.assign(corpus.dims.size(), std::vector<std::vector<double>>(training_games.size()));

    for (std::size_t g = 0; g < training_games.size(); ++g) {
        const Game& game = training_games[g];
        corpus.game_ids.push_back(game.game_id);
        for (const auto& p : game.players) {
            const auto it = player_features.find(p.player_id);
            if (it == player_features.end()) {
                throw Error(ErrorCode::MissingFeature, "player '" + p.player_id + "' has no feature vector");
            }
            std::vector<double> own(corpus.dims.size());
            for (std::size_t j = 0; j < corpus.dims.size(); ++j) {
                const auto d = corpus.dims[j];
                if (d >= static_cast<std::size_t>(it->second.size())) {
                    throw Error(ErrorCode::MissingFeature,
                                "player '" + p.player_id + "' lacks dim " + std::to_string(d));
                }
                const double v = it->second(static_cast<Eigen::Index>(d));
                if (!std::isfinite(v)) {
                    throw Error(ErrorCode::NonFiniteInput, "player '" + p.player_id + "' dim " + std::to_string(d));
                }
                own[j] = v;
                corpus.sorted_values[j][g].push_back(v);
            }
            corpus.member_game.emplace(p.player_id, g);
            corpus.member_values.emplace(p.player_id, std::move(own));
        }
    }
    for (auto& per_dim : corpus.sorted_values) {
        for (auto& vals : per_dim) std::sort(vals.begin(), vals.end(), std::greater<>());
    }
    return corpus;
}

int liarrank_scalar(const LiarRankCorpus& corpus, std::size_t game, std::size_t dim, double value) {
    if (game >= corpus.games()) throw Error(ErrorCode::UnknownGame, "game position " + std::to_string(game));
    if (!std::isfinite(value)) throw Error(ErrorCode::NonFiniteInput, "LiarRank query must be finite");
    const auto& vals = corpus.sorted_values.at(dim)[game];
    // First element not strictly greater than `value`.
    const auto it = std::lower_bound(vals.begin(), vals.end(), value, std::greater<>());
    return 1 + static_cast<int>(it - vals.begin());
}

int liarrank_scalar(const LiarRankCorpus& corpus, std::string_view game_id, std::size_t dim, double value) {
    return liarrank_scalar(corpus, corpus.game_index(game_id), dim, value);
}

LiarRankVector liarrank_vector(const LiarRankCorpus& corpus, const Vector& values,
                               std::optional<std::string_view> player_id) {
    LiarRankVector out;
    out.dims = corpus.dims.size();
    out.games = corpus.games();
    out.ranks.resize(out.dims * out.games);
    if (player_id) out.player_id = std::string(*player_id);

    std::optional<std::size_t> own_game;
    const std::vector<double>* own_values = nullptr;
    if (player_id) {
        if (const auto it = corpus.member_game.find(*player_id); it != corpus.member_game.end()) {
            own_game = it->second;
            own_values = &corpus.member_values.find(*player_id)->second;
        }
    }

    for (std::size_t j = 0; j < out.dims; ++j) {
        const auto d = corpus.dims[j];
        if (d >= static_cast<std::size_t>(values.size())) {
            throw Error(ErrorCode::MissingFeature, "query vector lacks dim " + std::to_string(d));
        }
        const double v = values(static_cast<Eigen::Index>(d));
        for (std::size_t g = 0; g < out.games; ++g) {
            int r = liarrank_scalar(corpus, g, j, v);
            if (own_game && *own_game == g && (*own_values)[j] > v) --r;
            out.ranks[j * out.games + g] = r;
        }
    }
    return out;
}

Vector liarrank_features(const LiarRankCorpus& corpus, const LiarRankVector& v, bool normalize) {
    Vector out(static_cast<Eigen::Index>(v.ranks.size()));
    for (std::size_t j = 0; j < v.dims; ++j) {
        for (std::size_t g = 0; g < v.games; ++g) {
            const double r = v.at(j, g);
            const double scale = normalize ? 1.0 / static_cast<double>(corpus.game_size(g) + 1) : 1.0;
            out(static_cast<Eigen::Index>(j * v.games + g)) = r * scale;
        }
    }
    return out;
}

}  // namespace gdd
