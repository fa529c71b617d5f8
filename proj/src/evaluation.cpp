#include "gdd/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <memory>
#include <numeric>
#include <set>
#include <thread>

#include "gdd/error.hpp"
#include "gdd/rng.hpp"

namespace gdd {

namespace {

// Runs task(i) for i in [0, n) on up to `jobs` threads. Failures are kept
// per index so callers can report which items completed.
std::vector<std::exception_ptr> parallel_for(std::size_t n, std::size_t jobs,
                                             const std::function<void(std::size_t)>& task) {
    std::vector<std::exception_ptr> errors(n);
    auto run_one = [&](std::size_t i) {
        try {
            task(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) run_one(i);
        return errors;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) run_one(i);
        });
    }
    for (auto& t : pool) t.join();
    return errors;
}

MetricReport mean_of(std::span<const MetricReport> reports) {
    MetricReport m;
    if (reports.empty()) return m;
    for (const auto& r : reports) {
        m.auc += r.auc;
        m.f1 += r.f1;
        m.fnr += r.fnr;
        m.fpr += r.fpr;
        m.precision += r.precision;
        m.recall += r.recall;
        m.threshold = r.threshold;
    }
    const auto n = static_cast<double>(reports.size());
    m.auc /= n;
    m.f1 /= n;
    m.fnr /= n;
    m.fpr /= n;
    m.precision /= n;
    m.recall /= n;
    return m;
}

std::vector<const Game*> pick_games(const GameDataset& ds, std::span<const std::string> ids) {
    std::vector<const Game*> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(&ds.game(id));
    return out;
}

// Row indices of `sub` players within `pool`, which must contain them.
std::vector<std::size_t> rows_of(const PlayerPool& pool, const PlayerPool& sub) {
    std::map<const PlayerRecord*, std::size_t> index;
    for (std::size_t i = 0; i < pool.players.size(); ++i) index.emplace(pool.players[i], i);
    std::vector<std::size_t> out;
    out.reserve(sub.players.size());
    for (const auto* p : sub.players) out.push_back(index.at(p));
    return out;
}

ScoreSet make_scores(const PlayerPool& pool, std::vector<double> scores) {
    ScoreSet s;
    s.player_ids = pool.player_ids();
    s.labels = pool.labels;
    s.scores = std::move(scores);
    return s;
}

struct FoldOutput {
    FoldResult result;
    FoldScores scores;
};

FoldOutput run_fold(const GameDataset& ds, const ExperimentConfig& cfg, const FoldSplit& split, std::size_t fold,
                    const std::map<std::string, PlayerClips, std::less<>>& clips) {
    split.check_disjoint();
    const std::uint64_t fold_seed = Rng::derive(cfg.seed, fold);

    FoldOutput out;
    FoldResult& res = out.result;
    res.fold = fold;
    res.train_games = split.train_games;
    res.test_games = split.test_games;

    // Inner holdout by games for every selection step.
    std::vector<std::string> shuffled = split.train_games;
    Rng rng(Rng::derive(fold_seed, 0x5eed));
    rng.shuffle(std::span<std::string>(shuffled));
    const auto n_train = shuffled.size();
    const auto n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(cfg.validation_fraction * static_cast<double>(n_train))));
    if (n_train < 2 || n_val >= n_train) {
        throw Error(ErrorCode::TooFewGames, "fold " + std::to_string(fold) + " has " + std::to_string(n_train) +
                                                " training games; nested validation needs at least 2");
    }
    const std::set<std::string> val_set(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_val));
    for (const auto& g : split.train_games) {
        (val_set.count(g) ? res.validation_games : res.inner_train_games).push_back(g);
    }

    const PlayerPool pool_t = PlayerPool::from_games(pick_games(ds, res.train_games), clips);
    const PlayerPool pool_a = PlayerPool::from_games(pick_games(ds, res.inner_train_games), clips);
    const PlayerPool pool_v = PlayerPool::from_games(pick_games(ds, res.validation_games), clips);
    const PlayerPool pool_e = PlayerPool::from_games(pick_games(ds, res.test_games), clips);
    const ValidationSplit inner{rows_of(pool_t, pool_a), rows_of(pool_t, pool_v)};

    const auto& kinds = cfg.kinds;
    for (std::size_t f = 0; f < cfg.families.size(); ++f) {
        const FamilyConfig& fam = cfg.families[f];
        const std::uint64_t fam_seed = Rng::derive(fold_seed, f + 1);
        FamilyFoldResult fr;
        fr.family = fam.name;
        fr.choice = choose_representation(fam, pool_t, inner, kinds, cfg.hyperparams, fam_seed);

        std::vector<ScoreSet> val_sets;
        std::vector<ScoreSet> test_sets;
        {
            const FittedEncoder enc = fit_encoder(fam, fr.choice, pool_a, fam_seed);
            assert_not_fitted_on(enc, pool_v);
            assert_not_fitted_on(enc, pool_e);
            const Matrix xa = encode_pool(enc, pool_a);
            const Matrix xv = encode_pool(enc, pool_v);
            for (std::size_t k = 0; k < kinds.size(); ++k) {
                const auto model = train(kinds[k], xa, pool_a.labels, cfg.hyperparams, Rng::derive(fam_seed, 100 + k));
                val_sets.push_back(make_scores(pool_v, predict_scores(model, xv)));
                fr.validation_auc.push_back(auc(val_sets.back().scores, val_sets.back().labels));
            }
        }
        {
            const FittedEncoder enc = fit_encoder(fam, fr.choice, pool_t, fam_seed);
            assert_not_fitted_on(enc, pool_e);
            fr.fv_dims = enc.fv_dims;
            fr.fitted_on_games = enc.fitted_on_games;
            const Matrix xt = encode_pool(enc, pool_t);
            const Matrix xe = encode_pool(enc, pool_e);
            for (std::size_t k = 0; k < kinds.size(); ++k) {
                const auto model = train(kinds[k], xt, pool_t.labels, cfg.hyperparams, Rng::derive(fam_seed, 200 + k));
                test_sets.push_back(make_scores(pool_e, predict_scores(model, xe)));
                fr.test_auc.push_back(auc(test_sets.back().scores, test_sets.back().labels));
            }
        }
        const auto best = static_cast<std::size_t>(
            std::max_element(fr.validation_auc.begin(), fr.validation_auc.end()) - fr.validation_auc.begin());
        fr.choice.best_kind = kinds[best];
        fr.choice.validation_auc = fr.validation_auc[best];
        fr.test = classification_metrics(test_sets[best].scores, test_sets[best].labels);

        out.scores.validation.push_back(std::move(val_sets));
        out.scores.test.push_back(std::move(test_sets));
        res.families.push_back(std::move(fr));
    }
    return out;
}

struct Headline {
    std::vector<std::size_t> chosen;  // candidate per fold
    MetricReport mean;
    std::vector<double> fold_auc;
};

Headline headline(std::span<const EnsembleCandidate> candidates, std::size_t folds) {
    Headline h;
    std::vector<MetricReport> per_fold;
    for (std::size_t f = 0; f < folds; ++f) {
        const auto c = select_candidate(candidates, f);
        h.chosen.push_back(c);
        per_fold.push_back(candidates[c].folds[f].test);
        h.fold_auc.push_back(per_fold.back().auc);
    }
    h.mean = mean_of(per_fold);
    return h;
}

}  // namespace

std::vector<std::vector<std::string>> CvPlan::folds(std::span<const Game> games) const {
    std::vector<std::vector<std::string>> out(k);
    for (const auto& g : games) {
        const auto it = assignment.find(g.game_id);
        if (it == assignment.end()) throw Error(ErrorCode::UnknownGame, "game '" + g.game_id + "' is not in the plan");
        out.at(it->second).push_back(g.game_id);
    }
    return out;
}

CvPlan make_cv_plan(std::span<const Game> games, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "cross-validation needs k >= 2");
    if (k > games.size()) {
        throw Error(ErrorCode::TooFewGames,
                    std::to_string(games.size()) + " games cannot fill " + std::to_string(k) + " folds");
    }
    std::vector<std::size_t> order(games.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));
    CvPlan plan;
    plan.k = k;
    plan.seed = seed;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& id = games[order[i]].game_id;
        if (!plan.assignment.emplace(id, i % k).second) {
            throw Error(ErrorCode::SchemaViolation, "duplicate game id '" + id + "'");
        }
    }
    return plan;
}

void FoldSplit::check_disjoint() const {
    const std::set<std::string> train(train_games.begin(), train_games.end());
    for (const auto& g : test_games) {
        if (train.count(g)) throw Error(ErrorCode::LeakageDetected, "game '" + g + "' is in both train and test");
    }
}

std::vector<FoldSplit> fold_splits(const CvPlan& plan, std::span<const Game> games) {
    plan.folds(games);  // every game must be assigned
    std::vector<FoldSplit> out(plan.k);
    for (std::size_t f = 0; f < plan.k; ++f) {
        for (const auto& g : games) {
            (plan.assignment.at(g.game_id) == f ? out[f].test_games : out[f].train_games).push_back(g.game_id);
        }
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (folds < 2) throw Error(ErrorCode::InvalidArgument, "folds must be >= 2");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "validation_fraction must be in (0, 1)");
    }
    weight_grid_size(grid_step, 1);
    if (kinds.empty()) throw Error(ErrorCode::InvalidArgument, "no classifier kinds configured");
    if (families.empty()) throw Error(ErrorCode::InvalidArgument, "no feature families configured");
    std::set<std::string> names;
    for (const auto& f : families) {
        if (f.name.empty() || !names.insert(f.name).second) {
            throw Error(ErrorCode::InvalidArgument, "family names must be unique and non-empty ('" + f.name + "')");
        }
        if (f.channel.empty()) throw Error(ErrorCode::InvalidArgument, "family '" + f.name + "' has no channel");
        if (f.type == FamilyType::Histogram) {
            if (f.modes.empty() || f.bins.empty()) {
                throw Error(ErrorCode::InvalidArgument, "family '" + f.name + "' needs histogram modes and bins");
            }
            for (auto b : f.bins) {
                if (b < 2) throw Error(ErrorCode::InvalidArgument, "family '" + f.name + "' has a bin count below 2");
            }
            if (f.candidate_dims && f.candidate_dims->size() > kMaxSubsetCandidates) {
                throw Error(ErrorCode::TooManyChannels, "family '" + f.name + "' has " +
                                                            std::to_string(f.candidate_dims->size()) +
                                                            " candidate dims");
            }
        } else if (f.gmm_components < 1) {
            throw Error(ErrorCode::InvalidArgument, "family '" + f.name + "' needs at least one GMM component");
        }
    }
    sampling.validate();
}

std::map<std::string, PlayerClips, std::less<>> extract_clips(const GameDataset& ds, const SamplingPolicy& policy,
                                                              std::size_t jobs) {
    std::vector<const PlayerRecord*> players;
    for (const auto& g : ds.games) {
        for (const auto& p : g.players) players.push_back(&p);
    }
    std::vector<PlayerClips> clips(players.size());
    const auto errors = parallel_for(players.size(), jobs, [&](std::size_t i) {
        clips[i] = clips_for_player(ds, *players[i], ds.channels, policy);
    });
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::map<std::string, PlayerClips, std::less<>> out;
    for (std::size_t i = 0; i < players.size(); ++i) out.emplace(players[i]->player_id, std::move(clips[i]));
    return out;
}

ExperimentRun run_experiment(const GameDataset& ds, const ExperimentConfig& config) {
    config.validate();
    const CvPlan plan = make_cv_plan(ds.games, config.folds, config.seed);
    const auto splits = fold_splits(plan, ds.games);
    return run_experiment(ds, config, splits);
}

ExperimentRun run_experiment(const GameDataset& ds, const ExperimentConfig& config, std::span<const FoldSplit> splits) {
    config.validate();
    if (splits.empty()) throw Error(ErrorCode::InvalidArgument, "no folds");
    for (const auto& s : splits) {
        s.check_disjoint();
        for (const auto& g : s.train_games) ds.game(g);
        for (const auto& g : s.test_games) ds.game(g);
    }

    const auto clips = extract_clips(ds, config.sampling, config.jobs);

    std::vector<FoldOutput> outputs(splits.size());
    const auto errors = parallel_for(splits.size(), config.jobs, [&](std::size_t f) {
        outputs[f] = run_fold(ds, config, splits[f], f, clips);
    });
    for (std::size_t f = 0; f < errors.size(); ++f) {
        if (!errors[f]) continue;
        std::string done;
        for (std::size_t j = 0; j < errors.size(); ++j) {
            if (!errors[j]) done += (done.empty() ? "" : ",") + std::to_string(j);
        }
        if (done.empty()) done = "none";
        try {
            std::rethrow_exception(errors[f]);
        } catch (const Error& e) {
            throw Error(e.code(), "fold " + std::to_string(f) + " failed (completed folds: " + done + "): " + e.what());
        } catch (const std::exception& e) {
            throw Error(ErrorCode::InvalidArgument,
                        "fold " + std::to_string(f) + " failed (completed folds: " + done + "): " + e.what());
        }
    }

    ExperimentRun run;
    ExperimentReport& rep = run.report;
    rep.config = config;
    for (auto& o : outputs) {
        rep.folds.push_back(std::move(o.result));
        run.scores.push_back(std::move(o.scores));
    }

    const std::vector<bool> active_v(config.families.size(), true);
    const auto active = std::make_unique<bool[]>(active_v.size());
    std::fill_n(active.get(), active_v.size(), true);
    const auto candidates =
        ensemble_search(run.scores, config.kinds.size(), {active.get(), active_v.size()}, config.grid_step);

    const Headline h = headline(candidates, rep.folds.size());
    rep.mean = h.mean;
    for (std::size_t f = 0; f < rep.folds.size(); ++f) {
        const auto& cand = candidates[h.chosen[f]];
        auto& fr = rep.folds[f];
        for (auto k : cand.kinds) fr.kinds.push_back(config.kinds[k]);
        fr.weights = cand.folds[f].weights;
        fr.validation_auc = cand.folds[f].validation_auc;
        fr.test = cand.folds[f].test;
    }

    for (std::size_t fam = 0; fam < config.families.size(); ++fam) {
        FamilySummary s;
        s.family = config.families[fam].name;
        std::vector<MetricReport> per_fold;
        for (const auto& fr : rep.folds) {
            per_fold.push_back(fr.families[fam].test);
            s.fold_auc.push_back(fr.families[fam].test.auc);
        }
        s.mean = mean_of(per_fold);
        rep.families.push_back(std::move(s));
    }

    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return candidates[a].mean_test.auc > candidates[b].mean_test.auc;
    });
    for (std::size_t i = 0; i < std::min(config.top_n, order.size()); ++i) {
        const auto& c = candidates[order[i]];
        EnsembleRow row;
        for (auto k : c.kinds) row.kinds.push_back(config.kinds[k]);
        row.active = active_v;
        row.mean_validation_auc = c.mean_validation_auc;
        row.mean = c.mean_test;
        rep.top.push_back(std::move(row));
    }
    return run;
}

std::vector<AblationRow> ablate_leave_one_out(const ExperimentRun& run) {
    const auto& cfg = run.report.config;
    const std::size_t families = cfg.families.size();
    if (families < 2) throw Error(ErrorCode::InvalidArgument, "ablation needs at least two families");
    std::vector<AblationRow> rows;
    for (std::size_t removed = 0; removed < families; ++removed) {
        const auto active = std::make_unique<bool[]>(families);
        for (std::size_t f = 0; f < families; ++f) active[f] = f != removed;
        const auto candidates = ensemble_search(run.scores, cfg.kinds.size(), {active.get(), families}, cfg.grid_step);
        const Headline h = headline(candidates, run.scores.size());
        AblationRow row;
        row.removed = cfg.families[removed].name;
        row.mean = h.mean;
        row.fold_auc = h.fold_auc;
        row.delta_auc = run.report.mean.auc - h.mean.auc;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<AblationRow> ablate_leave_one_out(const GameDataset& ds, const ExperimentConfig& config) {
    return ablate_leave_one_out(run_experiment(ds, config));
}

}  // namespace gdd
