#include "gdd/pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "gdd/error.hpp"
#include "gdd/rng.hpp"

namespace gdd {

namespace {

std::vector<const ChannelClips*> channel_view(const PlayerPool& pool, const std::string& channel,
                                              std::span<const std::size_t> rows) {
    std::vector<const ChannelClips*> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(&pool.channel(r, channel));
    return out;
}

std::vector<std::size_t> all_rows(const PlayerPool& pool) {
    std::vector<std::size_t> rows(pool.players.size());
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

RowMatrix stacked_clips(const PlayerPool& pool, const std::string& channel) {
    Eigen::Index total = 0;
    Eigen::Index dim = 0;
    for (std::size_t i = 0; i < pool.players.size(); ++i) {
        const auto& cc = pool.channel(i, channel);
        total += static_cast<Eigen::Index>(cc.clips.size());
        dim = cc.frames.cols();
    }
    RowMatrix out(total, dim);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < pool.players.size(); ++i) {
        for (const auto& c : pool.channel(i, channel).clips) out.row(row++) = c.vector.transpose();
    }
    return out;
}

GmmModel fit_family_gmm(const FamilyConfig& cfg, const PlayerPool& pool, std::uint64_t seed) {
    GmmOptions opt;
    opt.components = cfg.gmm_components;
    opt.max_iters = cfg.gmm_max_iters;
    opt.tol = cfg.gmm_tol;
    opt.variance_floor = cfg.gmm_variance_floor;
    opt.seed = seed;
    return fit_gmm(stacked_clips(pool, cfg.channel), opt);
}

}  // namespace

std::string_view to_string(FamilyType type) noexcept {
    switch (type) {
        case FamilyType::Histogram: return "histogram";
        case FamilyType::FisherVector: return "fisher";
        case FamilyType::LiarRankFisher: return "liarrank_fisher";
    }
    return "histogram";
}

FamilyType family_type_from_string(std::string_view s) {
    if (s == "histogram") return FamilyType::Histogram;
    if (s == "fisher") return FamilyType::FisherVector;
    if (s == "liarrank_fisher") return FamilyType::LiarRankFisher;
    throw Error(ErrorCode::InvalidArgument, "unknown family type '" + std::string(s) + "'");
}

std::vector<FamilyConfig> default_families() {
    std::vector<FamilyConfig> out;
    auto hist = [](std::string name, std::string channel) {
        FamilyConfig f;
        f.name = std::move(name);
        f.type = FamilyType::Histogram;
        f.channel = std::move(channel);
        return f;
    };
    out.push_back(hist("fau_hist", "fau"));
    {
        FamilyConfig f;
        f.name = "mfcc_fv";
        f.type = FamilyType::FisherVector;
        f.channel = "mfcc";
        out.push_back(std::move(f));
    }
    out.push_back(hist("emotion_hist", "emotion"));
    out.push_back(hist("eyehead_hist", "eye_head"));
    {
        FamilyConfig f;
        f.name = "liarrank_fv";
        f.type = FamilyType::LiarRankFisher;
        f.channel = "face_embedding";
        out.push_back(std::move(f));
    }
    return out;
}

PlayerPool PlayerPool::from_games(std::vector<const Game*> games,
                                  const std::map<std::string, PlayerClips, std::less<>>& clips) {
    PlayerPool pool;
    pool.games = std::move(games);
    pool.clips = &clips;
    for (const Game* g : pool.games) {
        for (const auto& p : g->players) {
            pool.players.push_back(&p);
            pool.labels.push_back(p.is_spy() ? 1 : 0);
        }
    }
    return pool;
}

std::vector<std::string> PlayerPool::game_ids() const {
    std::vector<std::string> out;
    for (const Game* g : games) out.push_back(g->game_id);
    return out;
}

std::vector<std::string> PlayerPool::player_ids() const {
    std::vector<std::string> out;
    for (const auto* p : players) out.push_back(p->player_id);
    return out;
}

const ChannelClips& PlayerPool::channel(std::size_t player, const std::string& channel) const {
    const auto& id = players.at(player)->player_id;
    const auto it = clips->find(id);
    if (it == clips->end()) throw Error(ErrorCode::MissingFeature, "no clips for player '" + id + "'");
    const auto ch = it->second.channels.find(channel);
    if (ch == it->second.channels.end()) {
        throw Error(ErrorCode::MissingFeature, "player '" + id + "' has no clips for channel '" + channel + "'");
    }
    return ch->second;
}

Matrix FittedEncoder::encode(std::span<const ChannelClips* const> players, std::span<const std::string> player_ids) const {
    if (players.size() != player_ids.size()) throw Error(ErrorCode::DimMismatch, "players and ids differ in length");
    std::vector<Vector> rows;
    rows.reserve(players.size());
    for (std::size_t i = 0; i < players.size(); ++i) {
        const ChannelClips& cc = *players[i];
        switch (type) {
            case FamilyType::Histogram:
                if (!histogram) throw Error(ErrorCode::EdgesMissing, "family '" + family + "' has no histogram encoder");
                rows.push_back(encode_histogram(cc, *histogram));
                break;
            case FamilyType::FisherVector:
                if (!gmm) throw Error(ErrorCode::InvalidArgument, "family '" + family + "' has no GMM");
                rows.push_back(encode_fisher_vector(cc.clip_matrix(), *gmm, fv_normalize));
                break;
            case FamilyType::LiarRankFisher: {
                if (!gmm || !corpus) throw Error(ErrorCode::InvalidArgument, "family '" + family + "' is not fitted");
                const Vector fv = encode_fisher_vector(cc.clip_matrix(), *gmm, fv_normalize);
                const auto ranks = liarrank_vector(*corpus, fv, player_ids[i]);
                rows.push_back(liarrank_features(*corpus, ranks, normalize_ranks));
                break;
            }
        }
    }
    Matrix out(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return out;
}

FittedEncoder fit_encoder(const FamilyConfig& cfg, const FamilyChoice& choice, const PlayerPool& pool,
                          std::uint64_t seed) {
    if (pool.players.empty()) throw Error(ErrorCode::EmptyInput, "no training players for family '" + cfg.name + "'");
    FittedEncoder enc;
    enc.family = cfg.name;
    enc.type = cfg.type;
    enc.channel = cfg.channel;
    enc.fv_normalize = cfg.fv_normalize;
    enc.normalize_ranks = cfg.normalize_ranks;
    enc.fitted_on_games = pool.game_ids();

    switch (cfg.type) {
        case FamilyType::Histogram: {
            const auto rows = all_rows(pool);
            const auto view = channel_view(pool, cfg.channel, rows);
            enc.histogram = fit_histogram_encoding(view, cfg.channel, choice.dims, choice.mode, choice.bins, cfg.normalize);
            break;
        }
        case FamilyType::FisherVector:
            enc.gmm = fit_family_gmm(cfg, pool, seed);
            break;
        case FamilyType::LiarRankFisher: {
            enc.gmm = fit_family_gmm(cfg, pool, seed);
            std::map<std::string, Vector, std::less<>> fvs;
            Matrix fv_matrix;
            for (std::size_t i = 0; i < pool.players.size(); ++i) {
                Vector fv = encode_fisher_vector(pool.channel(i, cfg.channel).clip_matrix(), *enc.gmm, enc.fv_normalize);
                if (fv_matrix.size() == 0) fv_matrix.resize(static_cast<Eigen::Index>(pool.players.size()), fv.size());
                fv_matrix.row(static_cast<Eigen::Index>(i)) = fv.transpose();
                fvs.emplace(pool.players[i]->player_id, std::move(fv));
            }
            enc.fv_dims = select_dims(fv_matrix, pool.labels, cfg.max_dims);
            std::vector<Game> games;
            for (const Game* g : pool.games) games.push_back(*g);
            enc.corpus = build_corpus(games, fvs, enc.fv_dims);
            break;
        }
    }
    return enc;
}

Matrix encode_pool(const FittedEncoder& enc, const PlayerPool& pool) {
    const auto rows = all_rows(pool);
    const auto view = channel_view(pool, enc.channel, rows);
    const auto ids = pool.player_ids();
    return enc.encode(view, ids);
}

void assert_not_fitted_on(const FittedEncoder& encoder, const PlayerPool& scored) {
    const std::set<std::string> fitted(encoder.fitted_on_games.begin(), encoder.fitted_on_games.end());
    for (const Game* g : scored.games) {
        if (fitted.count(g->game_id)) {
            throw Error(ErrorCode::LeakageDetected,
                        "family '" + encoder.family + "' was fitted on scored game '" + g->game_id + "'");
        }
    }
}

ScoreSet FittedFamily::score(const PlayerPool& players) const {
    ScoreSet s;
    s.player_ids = players.player_ids();
    s.labels = players.labels;
    s.scores = predict_scores(model, encode_pool(encoder, players));
    return s;
}

FamilyChoice choose_representation(const FamilyConfig& cfg, const PlayerPool& pool, const ValidationSplit& inner,
                                   std::span<const ClassifierKind> kinds, const Hyperparams& hp, std::uint64_t seed) {
    FamilyChoice best;
    if (cfg.type != FamilyType::Histogram) return best;
    if (cfg.modes.empty() || cfg.bins.empty()) {
        throw Error(ErrorCode::InvalidArgument, "family '" + cfg.name + "' needs histogram modes and bin counts");
    }

    std::vector<std::size_t> candidates;
    if (cfg.candidate_dims) {
        candidates = *cfg.candidate_dims;
    } else {
        candidates.resize(static_cast<std::size_t>(pool.channel(0, cfg.channel).frames.cols()));
        std::iota(candidates.begin(), candidates.end(), 0);
    }

    const auto rows = all_rows(pool);
    const auto view = channel_view(pool, cfg.channel, rows);
    const ValidationSplit plan[] = {inner};
    bool have = false;
    for (const auto mode : cfg.modes) {
        for (const auto bins : cfg.bins) {
            SubsetFeatureBuilder build = [&](std::span<const std::size_t> subset, std::span<const std::size_t> fit_rows) {
                std::vector<const ChannelClips*> fit_view;
                for (auto r : fit_rows) fit_view.push_back(view[r]);
                const auto enc = fit_histogram_encoding(fit_view, cfg.channel, {subset.begin(), subset.end()}, mode,
                                                        bins, cfg.normalize);
                Matrix x(static_cast<Eigen::Index>(view.size()), static_cast<Eigen::Index>(enc.output_length()));
                for (std::size_t i = 0; i < view.size(); ++i) {
                    x.row(static_cast<Eigen::Index>(i)) = encode_histogram(*view[i], enc).transpose();
                }
                return x;
            };
            const auto r = select_channel_subset(candidates, build, pool.labels, plan, kinds, hp, seed);
            if (!have || r.auc > best.validation_auc) {
                best.mode = mode;
                best.bins = bins;
                best.dims = r.subset;
                best.best_kind = r.kind;
                best.validation_auc = r.auc;
                have = true;
            }
        }
    }
    return best;
}

}  // namespace gdd
