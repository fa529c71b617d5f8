#include "gdd/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <set>

#include "gdd/error.hpp"
#include "gdd/rng.hpp"

namespace gdd {

namespace {

std::vector<const Game*> games_of(const GameDataset& ds) {
    std::vector<const Game*> out;
    for (const auto& g : ds.games) out.push_back(&g);
    return out;
}

ScoreSet scores_for(const PlayerPool& pool, std::vector<double> scores) {
    ScoreSet s;
    s.player_ids = pool.player_ids();
    s.labels = pool.labels;
    s.scores = std::move(scores);
    return s;
}

}  // namespace

ModelBundle train_bundle(const GameDataset& ds, const ExperimentConfig& config) {
    config.validate();
    if (ds.games.size() < 2) throw Error(ErrorCode::TooFewGames, "training needs at least 2 games");
    const auto clips = extract_clips(ds, config.sampling, config.jobs);

    std::vector<std::string> ids;
    for (const auto& g : ds.games) ids.push_back(g.game_id);
    std::vector<std::string> shuffled = ids;
    Rng rng(Rng::derive(config.seed, 0xb0d1e));
    rng.shuffle(std::span<std::string>(shuffled));
    const auto n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(config.validation_fraction * static_cast<double>(ids.size()))));
    if (n_val >= ids.size()) throw Error(ErrorCode::TooFewGames, "no games left for inner training");
    const std::set<std::string> val_set(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_val));

    std::vector<const Game*> a_games;
    std::vector<const Game*> v_games;
    for (const auto& g : ds.games) (val_set.count(g.game_id) ? v_games : a_games).push_back(&g);
    const PlayerPool pool_t = PlayerPool::from_games(games_of(ds), clips);
    const PlayerPool pool_a = PlayerPool::from_games(a_games, clips);
    const PlayerPool pool_v = PlayerPool::from_games(v_games, clips);

    ValidationSplit inner;
    for (std::size_t i = 0, row = 0; i < ds.games.size(); ++i) {
        for (std::size_t p = 0; p < ds.games[i].players.size(); ++p, ++row) {
            (val_set.count(ds.games[i].game_id) ? inner.validation : inner.train).push_back(row);
        }
    }

    ModelBundle bundle;
    bundle.sampling = config.sampling;
    bundle.channels = ds.channels;
    bundle.trained_on_games = ids;

    FoldScores scores;
    std::vector<FamilyChoice> choices;
    for (std::size_t f = 0; f < config.families.size(); ++f) {
        const auto& fam = config.families[f];
        const std::uint64_t seed = Rng::derive(config.seed, f + 1);
        FamilyChoice choice = choose_representation(fam, pool_t, inner, config.kinds, config.hyperparams, seed);
        const FittedEncoder enc = fit_encoder(fam, choice, pool_a, seed);
        assert_not_fitted_on(enc, pool_v);
        const Matrix xa = encode_pool(enc, pool_a);
        const Matrix xv = encode_pool(enc, pool_v);
        std::vector<ScoreSet> sets;
        for (std::size_t k = 0; k < config.kinds.size(); ++k) {
            const auto model = train(config.kinds[k], xa, pool_a.labels, config.hyperparams, Rng::derive(seed, 100 + k));
            sets.push_back(scores_for(pool_v, predict_scores(model, xv)));
        }
        scores.validation.push_back(sets);
        scores.test.push_back(std::move(sets));
        choices.push_back(std::move(choice));
    }

    // Joint kind assignment and weights on the validation games.
    const std::size_t families = config.families.size();
    const auto active = std::make_unique<bool[]>(families);
    std::fill_n(active.get(), families, true);
    const FoldScores one[] = {scores};
    const auto candidates = ensemble_search(one, config.kinds.size(), {active.get(), families}, config.grid_step);
    const auto& best = candidates[select_candidate(candidates, 0)];
    bundle.weights = best.folds[0].weights;
    bundle.validation_auc = best.folds[0].validation_auc;

    for (std::size_t f = 0; f < families; ++f) {
        const auto& fam = config.families[f];
        const std::uint64_t seed = Rng::derive(config.seed, f + 1);
        BundledFamily b;
        b.config = fam;
        b.choice = choices[f];
        b.choice.best_kind = config.kinds[best.kinds[f]];
        b.choice.validation_auc = auc(scores.validation[f][best.kinds[f]].scores, pool_v.labels);
        b.encoder = fit_encoder(fam, b.choice, pool_t, seed);
        const Matrix xt = encode_pool(b.encoder, pool_t);
        b.model = train(b.choice.best_kind, xt, pool_t.labels, config.hyperparams, Rng::derive(seed, 200 + best.kinds[f]));
        bundle.families.push_back(std::move(b));
    }
    return bundle;
}

BundleScores score_bundle(const ModelBundle& bundle, const GameDataset& ds, std::size_t jobs) {
    if (bundle.families.empty()) throw Error(ErrorCode::InvalidArgument, "bundle has no families");
    for (const auto& f : bundle.families) {
        const auto& want = f.encoder.channel;
        const bool present = std::any_of(ds.channels.begin(), ds.channels.end(),
                                         [&](const ChannelSpec& c) { return c.name == want; });
        if (!present) throw Error(ErrorCode::MissingFeature, "dataset has no channel '" + want + "'");
    }
    const auto clips = extract_clips(ds, bundle.sampling, jobs);
    const PlayerPool pool = PlayerPool::from_games(games_of(ds), clips);
    BundleScores out;
    for (const auto& f : bundle.families) {
        out.families.push_back(scores_for(pool, predict_scores(f.model, encode_pool(f.encoder, pool))));
    }
    out.fused = fuse(out.families, bundle.weights);
    return out;
}

EncodeResult encode_dataset(const GameDataset& ds, const ExperimentConfig& config) {
    config.validate();
    const auto clips = extract_clips(ds, config.sampling, config.jobs);
    const PlayerPool pool = PlayerPool::from_games(games_of(ds), clips);
    EncodeResult out;
    for (std::size_t f = 0; f < config.families.size(); ++f) {
        const auto& fam = config.families[f];
        FamilyChoice choice;
        choice.mode = fam.modes.front();
        choice.bins = fam.bins.front();
        if (fam.candidate_dims) {
            choice.dims = *fam.candidate_dims;
        } else {
            choice.dims.resize(ds.channel(fam.channel).dim);
            std::iota(choice.dims.begin(), choice.dims.end(), 0);
        }
        FittedEncoder enc = fit_encoder(fam, choice, pool, Rng::derive(config.seed, f + 1));
        EncodedFamily e;
        e.family = fam.name;
        e.player_ids = pool.player_ids();
        e.labels = pool.labels;
        e.features = encode_pool(enc, pool);
        out.features.push_back(std::move(e));
        out.encoders.push_back(std::move(enc));
    }
    return out;
}

}  // namespace gdd
