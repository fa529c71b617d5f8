#include "gdd/fusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "gdd/error.hpp"
#include "gdd/rng.hpp"

namespace gdd {

namespace {

// AUC by pairwise comparison with precomputed class indices; exact and
// faster than sorting for the small validation sets used in the searches.
class PairwiseAuc {
public:
    explicit PairwiseAuc(std::span<const int> labels) {
        for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos_ : neg_).push_back(i);
        if (pos_.empty() || neg_.empty()) throw Error(ErrorCode::SingleClassEval, "AUC needs both classes");
    }

    double operator()(const double* s) const {
        double wins = 0.0;
        for (std::size_t p : pos_) {
            const double sp = s[p];
            for (std::size_t n : neg_) {
                const double sn = s[n];
                wins += sp > sn ? 1.0 : (sp == sn ? 0.5 : 0.0);
            }
        }
        return wins / (static_cast<double>(pos_.size()) * static_cast<double>(neg_.size()));
    }

private:
    std::vector<std::size_t> pos_;
    std::vector<std::size_t> neg_;
};

std::size_t grid_units(double step) {
    if (!(step > 0.0) || step > 1.0) throw Error(ErrorCode::InvalidArgument, "grid step must be in (0, 1]");
    const double units = std::round(1.0 / step);
    if (std::abs(units * step - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "grid step must divide 1");
    }
    return static_cast<std::size_t>(units);
}

void compositions(std::size_t units, std::size_t parts, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() + 1 == parts) {
        cur.push_back(units);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (std::size_t c = 0; c <= units; ++c) {
        cur.push_back(c);
        compositions(units - c, parts, cur, out);
        cur.pop_back();
    }
}

// Grid tuples as doubles, lexicographically ascending.
std::vector<std::vector<double>> weight_grid(double step, std::size_t families) {
    if (families == 0) throw Error(ErrorCode::InvalidArgument, "no families to weight");
    const std::size_t units = grid_units(step);
    std::vector<std::vector<std::size_t>> comps;
    std::vector<std::size_t> cur;
    compositions(units, families, cur, comps);
    std::vector<std::vector<double>> out;
    out.reserve(comps.size());
    for (const auto& c : comps) {
        std::vector<double> a(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) a[i] = static_cast<double>(c[i]) / static_cast<double>(units);
        out.push_back(std::move(a));
    }
    return out;
}

void check_aligned(std::span<const ScoreSet> sets) {
    if (sets.empty()) throw Error(ErrorCode::MisalignedPlayers, "no score sets");
    for (const auto& s : sets) {
        s.validate();
        if (s.player_ids != sets.front().player_ids) {
            throw Error(ErrorCode::MisalignedPlayers, "score sets cover different players");
        }
        if (s.labels != sets.front().labels) throw Error(ErrorCode::MisalignedPlayers, "score sets disagree on labels");
    }
}

double fused_value(const std::vector<double>& alpha, const double* row) {
    double s = 0.0;
    for (std::size_t f = 0; f < alpha.size(); ++f) s += alpha[f] * row[f];
    return s;
}

MetricReport average(std::span<const EnsembleFold> folds) {
    MetricReport m;
    for (const auto& f : folds) {
        m.auc += f.test.auc;
        m.f1 += f.test.f1;
        m.fnr += f.test.fnr;
        m.fpr += f.test.fpr;
        m.precision += f.test.precision;
        m.recall += f.test.recall;
        m.threshold = f.test.threshold;
    }
    const auto n = static_cast<double>(folds.size());
    m.auc /= n;
    m.f1 /= n;
    m.fnr /= n;
    m.fpr /= n;
    m.precision /= n;
    m.recall /= n;
    return m;
}

}  // namespace

SubsetSearchResult select_channel_subset(std::span<const std::size_t> candidates, const SubsetFeatureBuilder& build,
                                         std::span<const int> labels, std::span<const ValidationSplit> plan,
                                         std::span<const ClassifierKind> kinds, const Hyperparams& hp,
                                         std::uint64_t seed) {
    if (candidates.empty()) throw Error(ErrorCode::InvalidArgument, "no candidate channels");
    if (candidates.size() > kMaxSubsetCandidates) {
        throw Error(ErrorCode::TooManyChannels, std::to_string(candidates.size()) + " candidates exceed the limit of " +
                                                    std::to_string(kMaxSubsetCandidates));
    }
    if (plan.empty()) throw Error(ErrorCode::InvalidArgument, "empty validation plan");
    if (kinds.empty()) throw Error(ErrorCode::InvalidArgument, "no classifier kinds");

    SubsetSearchResult best;
    bool have_best = false;
    const std::uint32_t limit = std::uint32_t{1} << candidates.size();
    std::vector<int> y_train;
    std::vector<int> y_val;
    for (std::uint32_t mask = 1; mask < limit; ++mask) {
        std::vector<std::size_t> subset;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (mask & (std::uint32_t{1} << i)) subset.push_back(candidates[i]);
        }
        ++best.subsets_evaluated;

        std::vector<double> auc_sum(kinds.size(), 0.0);
        for (std::size_t s = 0; s < plan.size(); ++s) {
            const auto& split = plan[s];
            const Matrix x = build(subset, split.train);
            Matrix xt(static_cast<Eigen::Index>(split.train.size()), x.cols());
            Matrix xv(static_cast<Eigen::Index>(split.validation.size()), x.cols());
            y_train.clear();
            y_val.clear();
            for (std::size_t i = 0; i < split.train.size(); ++i) {
                xt.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(split.train[i]));
                y_train.push_back(labels[split.train[i]]);
            }
            for (std::size_t i = 0; i < split.validation.size(); ++i) {
                xv.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(split.validation[i]));
                y_val.push_back(labels[split.validation[i]]);
            }
            for (std::size_t k = 0; k < kinds.size(); ++k) {
                const auto model = train(kinds[k], xt, y_train, hp, Rng::derive(seed, s));
                auc_sum[k] += auc(predict_scores(model, xv), y_val);
            }
        }
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            const double a = auc_sum[k] / static_cast<double>(plan.size());
            const bool better = !have_best || a > best.auc ||
                                (a == best.auc && (subset.size() < best.subset.size() ||
                                                   (subset.size() == best.subset.size() && subset < best.subset)));
            if (better) {
                best.subset = subset;
                best.kind = kinds[k];
                best.auc = a;
                have_best = true;
            }
        }
    }
    return best;
}

std::vector<double> dimension_scores(const Matrix& x, std::span<const int> labels, std::span<const std::size_t> rows) {
    std::vector<std::size_t> all;
    if (rows.empty()) {
        all.resize(static_cast<std::size_t>(x.rows()));
        std::iota(all.begin(), all.end(), 0);
        rows = all;
    }
    std::vector<int> y;
    y.reserve(rows.size());
    for (auto r : rows) y.push_back(labels[r]);
    std::vector<double> col(rows.size());
    std::vector<double> out(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index d = 0; d < x.cols(); ++d) {
        for (std::size_t i = 0; i < rows.size(); ++i) col[i] = x(static_cast<Eigen::Index>(rows[i]), d);
        const double a = auc(col, y);
        out[static_cast<std::size_t>(d)] = std::max(a, 1.0 - a);
    }
    return out;
}

std::vector<std::size_t> select_dims(const Matrix& x, std::span<const int> labels, std::size_t max_dims,
                                     std::span<const ValidationSplit> plan) {
    const auto d = static_cast<std::size_t>(x.cols());
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    if (max_dims >= d) return idx;

    std::vector<double> score(d, 0.0);
    if (plan.empty()) {
        score = dimension_scores(x, labels);
    } else {
        for (const auto& split : plan) {
            const auto s = dimension_scores(x, labels, split.train);
            for (std::size_t j = 0; j < d; ++j) score[j] += s[j] / static_cast<double>(plan.size());
        }
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    idx.resize(max_dims);
    std::sort(idx.begin(), idx.end());
    return idx;
}

void FusionWeights::validate(std::size_t families) const {
    if (alpha.size() != families) {
        throw Error(ErrorCode::BadWeights, std::to_string(alpha.size()) + " weights for " + std::to_string(families) +
                                               " score sets");
    }
    double sum = 0.0;
    for (double a : alpha) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw Error(ErrorCode::BadWeights, "weights must be finite and >= 0");
        sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::BadWeights, "weights must sum to 1");
}

ScoreSet fuse(std::span<const ScoreSet> score_sets, const FusionWeights& weights) {
    check_aligned(score_sets);
    weights.validate(score_sets.size());
    ScoreSet out;
    out.player_ids = score_sets.front().player_ids;
    out.labels = score_sets.front().labels;
    out.scores.resize(out.player_ids.size());
    std::vector<double> row(score_sets.size());
    for (std::size_t j = 0; j < out.scores.size(); ++j) {
        for (std::size_t f = 0; f < score_sets.size(); ++f) row[f] = score_sets[f].scores[j];
        out.scores[j] = std::clamp(fused_value(weights.alpha, row.data()), 0.0, 1.0);
    }
    return out;
}

std::size_t weight_grid_size(double step, std::size_t families) {
    if (families == 0) return 0;
    const std::size_t units = grid_units(step);
    // C(units + families - 1, families - 1), computed incrementally.
    std::size_t r = 1;
    for (std::size_t i = 1; i < families; ++i) r = r * (units + i) / i;
    return r;
}

void enumerate_weight_grid(double step, std::size_t families,
                           const std::function<void(const std::vector<double>&)>& visit) {
    for (const auto& a : weight_grid(step, families)) visit(a);
}

GridSearchResult grid_search_weights(std::span<const ScoreSet> score_sets, double step) {
    check_aligned(score_sets);
    const auto grid = weight_grid(step, score_sets.size());
    const std::size_t n = score_sets.front().size();
    const std::size_t f = score_sets.size();
    std::vector<double> rows(n * f);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < f; ++i) rows[j * f + i] = score_sets[i].scores[j];
    }
    const PairwiseAuc auc_of(score_sets.front().labels);
    std::vector<double> fused(n);

    GridSearchResult best;
    best.auc = -1.0;
    for (const auto& alpha : grid) {
        for (std::size_t j = 0; j < n; ++j) fused[j] = std::clamp(fused_value(alpha, &rows[j * f]), 0.0, 1.0);
        const double a = auc_of(fused.data());
        ++best.evaluated;
        if (a > best.auc) {
            best.auc = a;
            best.weights.alpha = alpha;
        }
    }
    return best;
}

std::vector<EnsembleCandidate> ensemble_search(std::span<const FoldScores> folds, std::size_t kinds,
                                               std::span<const bool> active, double step) {
    if (folds.empty()) throw Error(ErrorCode::InvalidArgument, "no folds");
    const std::size_t families = active.size();
    std::vector<std::size_t> active_idx;
    for (std::size_t i = 0; i < families; ++i) {
        if (active[i]) active_idx.push_back(i);
    }
    if (active_idx.empty()) throw Error(ErrorCode::InvalidArgument, "no active families");
    for (const auto& fold : folds) {
        if (fold.validation.size() != families || fold.test.size() != families) {
            throw Error(ErrorCode::MisalignedPlayers, "fold scores do not cover every family");
        }
        for (std::size_t i : active_idx) {
            if (fold.validation[i].size() != kinds || fold.test[i].size() != kinds) {
                throw Error(ErrorCode::MisalignedPlayers, "fold scores do not cover every kind");
            }
            check_aligned(fold.validation[i]);
            check_aligned(fold.test[i]);
        }
    }

    // Weight grid over active families, expanded to full length with zeros.
    std::vector<std::vector<double>> grid;
    for (auto& sub : weight_grid(step, active_idx.size())) {
        std::vector<double> full(families, 0.0);
        for (std::size_t i = 0; i < active_idx.size(); ++i) full[active_idx[i]] = sub[i];
        grid.push_back(std::move(full));
    }

    std::size_t assignments = 1;
    for (std::size_t i = 0; i < active_idx.size(); ++i) assignments *= kinds;

    struct FoldCache {
        PairwiseAuc val_auc;
        std::size_t n_val;
        std::size_t n_test;
    };
    std::vector<FoldCache> caches;
    for (const auto& fold : folds) {
        const auto& v0 = fold.validation[active_idx.front()][0];
        const auto& t0 = fold.test[active_idx.front()][0];
        caches.push_back({PairwiseAuc(v0.labels), v0.size(), t0.size()});
    }

    std::vector<EnsembleCandidate> out;
    out.reserve(assignments);
    std::vector<double> val_rows;
    std::vector<double> fused;
    for (std::size_t code = 0; code < assignments; ++code) {
        EnsembleCandidate cand;
        cand.kinds.assign(families, 0);
        std::size_t rem = code;
        for (std::size_t i = active_idx.size(); i-- > 0;) {
            cand.kinds[active_idx[i]] = rem % kinds;
            rem /= kinds;
        }

        for (std::size_t fi = 0; fi < folds.size(); ++fi) {
            const auto& fold = folds[fi];
            const auto& cache = caches[fi];
            val_rows.assign(cache.n_val * families, 0.0);
            for (std::size_t f : active_idx) {
                const auto& s = fold.validation[f][cand.kinds[f]].scores;
                for (std::size_t j = 0; j < cache.n_val; ++j) val_rows[j * families + f] = s[j];
            }
            fused.resize(cache.n_val);
            EnsembleFold ef;
            ef.validation_auc = -1.0;
            for (const auto& alpha : grid) {
                for (std::size_t j = 0; j < cache.n_val; ++j) {
                    fused[j] = std::clamp(fused_value(alpha, &val_rows[j * families]), 0.0, 1.0);
                }
                const double a = cache.val_auc(fused.data());
                if (a > ef.validation_auc) {
                    ef.validation_auc = a;
                    ef.weights.alpha = alpha;
                }
            }
            std::vector<ScoreSet> test_sets;
            test_sets.reserve(families);
            for (std::size_t f = 0; f < families; ++f) {
                test_sets.push_back(active[f] ? fold.test[f][cand.kinds[f]] : fold.test[active_idx.front()][0]);
            }
            const ScoreSet fused_test = fuse(test_sets, ef.weights);
            ef.test = classification_metrics(fused_test.scores, fused_test.labels);
            cand.folds.push_back(std::move(ef));
        }
        cand.mean_test = average(cand.folds);
        double v = 0.0;
        for (const auto& f : cand.folds) v += f.validation_auc;
        cand.mean_validation_auc = v / static_cast<double>(cand.folds.size());
        out.push_back(std::move(cand));
    }
    return out;
}

std::size_t select_candidate(std::span<const EnsembleCandidate> candidates, std::size_t fold) {
    if (candidates.empty()) throw Error(ErrorCode::InvalidArgument, "no ensemble candidates");
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (candidates[i].folds.at(fold).validation_auc > candidates[best].folds.at(fold).validation_auc) best = i;
    }
    return best;
}

}  // namespace gdd
