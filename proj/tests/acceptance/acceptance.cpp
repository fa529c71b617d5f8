// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. `--only N[,M...]` runs a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "../support.hpp"
#include "gdd/classifiers.hpp"
#include "gdd/encoders.hpp"
#include "gdd/error.hpp"
#include "gdd/evaluation.hpp"
#include "gdd/fusion.hpp"
#include "gdd/liarrank.hpp"
#include "gdd/report.hpp"
#include "gdd/serialize.hpp"
#include "gdd/synthetic.hpp"

using namespace gdd;

namespace {

// Tolerances and sizes.
constexpr int kRankInstances = 1000;
constexpr double kRankSeconds = 5.0;
constexpr int kInvarianceInstances = 100;
constexpr int kInvarianceTransforms = 5;
constexpr int kAucSets = 1000;
constexpr double kAucTol = 1e-12;
constexpr int kHistogramCases = 200;
constexpr int kGmmDatasets = 50;
constexpr double kEmTol = 1e-9;
constexpr std::size_t kFvClips = 10000;
constexpr double kFvStderrs = 3.0;
constexpr double kFvFraction = 0.99;
constexpr double kFloorAuc = 0.95;
constexpr double kNullLo = 0.38;
constexpr double kNullHi = 0.62;
constexpr std::size_t kNullGames = 12;
constexpr int kNullSeeds = 20;
constexpr std::size_t kNullFolds = 5;
constexpr std::size_t kE2eGames = 20;
constexpr std::size_t kE2eFolds = 5;
constexpr int kE2eSeeds = 5;
constexpr double kE2eEffect = 1.5;
constexpr double kE2eAuc = 0.85;
constexpr double kInformativeDrop = 0.05;
constexpr double kNoiseChange = 0.03;
constexpr double kE2eMinutes = 10.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome liarrank_oracle() {
    Rng rng(1);
    const auto t0 = std::chrono::steady_clock::now();
    int mismatches = 0;
    for (int i = 0; i < kRankInstances; ++i) {
        const auto inst = test::random_rank_instance(rng, 6, 4);
        const auto corpus = build_corpus(inst.games, inst.features, inst.dims);
        Vector q(static_cast<Eigen::Index>(inst.width));
        for (auto& x : q) x = rng.below(2) ? static_cast<double>(rng.below(5)) : rng.normal();
        std::optional<std::string> member;
        if (rng.below(2) == 0) {
            const auto& g = inst.games[rng.below(inst.games.size())];
            member = g.players[rng.below(g.players.size())].player_id;
            q = inst.features.at(*member);
        }
        const auto got = member ? liarrank_vector(corpus, q, *member) : liarrank_vector(corpus, q);
        if (got.ranks != test::brute_force_ranks(inst.games, inst.features, inst.dims, q, member)) ++mismatches;
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < kRankSeconds,
            fmt("%d instances, %d mismatches, %.2f s (limit %.0f s)", kRankInstances, mismatches, secs, kRankSeconds)};
}

Outcome liarrank_invariance() {
    Rng rng(2);
    int broken = 0;
    int checked = 0;
    for (int i = 0; i < kInvarianceInstances; ++i) {
        const auto inst = test::random_rank_instance(rng, 6, 4);
        const auto base = build_corpus(inst.games, inst.features, inst.dims);
        Vector q(static_cast<Eigen::Index>(inst.width));
        for (auto& x : q) x = rng.normal();
        const auto& g = inst.games[rng.below(inst.games.size())];
        const std::string member = g.players[rng.below(g.players.size())].player_id;
        const auto r_out = liarrank_vector(base, q).ranks;
        const auto r_in = liarrank_vector(base, inst.features.at(member), member).ranks;
        for (int t = 0; t < kInvarianceTransforms; ++t) {
            const int family = static_cast<int>(rng.below(3));
            const double a = rng.uniform(0.1, 5.0);
            const double b = rng.uniform(-5.0, 5.0);
            std::function<double(double)> f;
            if (family == 0) f = [=](double x) { return a * x + b; };
            else if (family == 1) f = [=](double x) { return std::exp(a * x / 5.0); };
            else f = [=](double x) { return x * x * x + a * x + b; };
            auto moved = inst.features;
            for (auto& [id, v] : moved) v = v.unaryExpr(f);
            const auto corpus = build_corpus(inst.games, moved, inst.dims);
            ++checked;
            if (liarrank_vector(corpus, q.unaryExpr(f)).ranks != r_out ||
                liarrank_vector(corpus, moved.at(member), member).ranks != r_in) {
                ++broken;
            }
        }
    }
    return {broken == 0, fmt("%d instance/transform pairs, %d rank vectors changed", checked, broken)};
}

Outcome auc_oracle() {
    Rng rng(3);
    double worst = 0.0;
    for (int i = 0; i < kAucSets; ++i) {
        const std::size_t n = 2 + rng.below(49);
        std::vector<double> s(n);
        std::vector<int> y(n);
        const std::uint64_t levels = 2 + rng.below(10);
        for (std::size_t j = 0; j < n; ++j) {
            s[j] = static_cast<double>(rng.below(levels)) / static_cast<double>(levels);
            y[j] = static_cast<int>(rng.below(2));
        }
        y[rng.below(n)] = 1;
        std::size_t z = rng.below(n);
        while (y[z] == 1 && std::count(y.begin(), y.end(), 1) == 1) z = rng.below(n);
        y[z] = 0;
        if (std::count(y.begin(), y.end(), 1) == 0) y[(z + 1) % n] = 1;
        worst = std::max(worst, std::abs(auc(s, y) - test::pairwise_auc(s, y)));
    }
    return {worst <= kAucTol, fmt("%d sets, max |auc - pairwise| = %.3g (tol %.0e)", kAucSets, worst, kAucTol)};
}

// Player data pooled into clips of `per_clip` frames.
ChannelClips make_player(Rng& rng, Eigen::Index frames, Eigen::Index dims, std::size_t per_clip) {
    ChannelClips cc;
    cc.frames.resize(frames, dims);
    for (Eigen::Index r = 0; r < frames; ++r) {
        for (Eigen::Index c = 0; c < dims; ++c) cc.frames(r, c) = rng.normal(double(c), 1.0);
    }
    for (Eigen::Index start = 0; start < frames; start += static_cast<Eigen::Index>(per_clip)) {
        const Eigen::Index n = std::min<Eigen::Index>(static_cast<Eigen::Index>(per_clip), frames - start);
        ClipFeature c;
        c.vector = cc.frames.middleRows(start, n).colwise().mean().transpose();
        c.frames_used = static_cast<std::size_t>(n);
        cc.clips.push_back(std::move(c));
    }
    return cc;
}

Outcome histogram_laws() {
    Rng rng(4);
    int failures = 0;
    for (int i = 0; i < kHistogramCases; ++i) {
        const auto dims = static_cast<Eigen::Index>(1 + rng.below(6));
        const std::size_t bins = 2 + rng.below(31);
        std::vector<ChannelClips> train;
        for (int p = 0; p < 5; ++p) {
            train.push_back(make_player(rng, static_cast<Eigen::Index>(1 + rng.below(80)), dims, 1 + rng.below(10)));
        }
        std::vector<const ChannelClips*> view;
        for (const auto& p : train) view.push_back(&p);
        std::vector<std::size_t> selected;
        for (Eigen::Index d = 0; d < dims; ++d) {
            if (rng.below(2) || selected.empty()) selected.push_back(static_cast<std::size_t>(d));
        }
        auto enc = [&](HistogramMode m) { return fit_histogram_encoding(view, "c", selected, m, bins, HistogramNorm::Counts); };
        const auto fe = enc(HistogramMode::FrameLevel);
        const auto ce = enc(HistogramMode::ClipLevel);
        const auto be = enc(HistogramMode::Combined);
        const auto probe = make_player(rng, static_cast<Eigen::Index>(1 + rng.below(100)), dims, 1 + rng.below(10));
        const Vector vf = encode_histogram(probe, fe);
        const Vector vc = encode_histogram(probe, ce);
        const Vector vb = encode_histogram(probe, be);
        bool ok = vb.size() == vf.size() + vc.size() && vf.size() == static_cast<Eigen::Index>(bins * selected.size()) &&
                  vc.size() == vf.size();
        const auto b = static_cast<Eigen::Index>(bins);
        for (std::size_t h = 0; ok && h < selected.size(); ++h) {
            const auto at = static_cast<Eigen::Index>(h) * b;
            ok = vf.segment(at, b).sum() == static_cast<double>(probe.frames.rows()) &&
                 vc.segment(at, b).sum() == static_cast<double>(probe.clips.size());
        }
        if (!ok) ++failures;
    }
    return {failures == 0, fmt("%d random cases, %d violations of count conservation or length laws", kHistogramCases, failures)};
}

// Per-clip Fisher score terms computed with scalar loops; column j of the
// result holds FV entry j's contribution from each clip.
RowMatrix fisher_terms(const RowMatrix& x, const GmmModel& g) {
    const auto K = static_cast<Eigen::Index>(g.components());
    const auto D = static_cast<Eigen::Index>(g.dim());
    RowMatrix out(x.rows(), 2 * K * D);
    std::vector<double> logp(static_cast<std::size_t>(K));
    for (Eigen::Index n = 0; n < x.rows(); ++n) {
        double mx = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < K; ++k) {
            double lp = std::log(g.weights(k));
            for (Eigen::Index d = 0; d < D; ++d) {
                const double v = g.variances(k, d);
                const double diff = x(n, d) - g.means(k, d);
                lp += -0.5 * (std::log(2.0 * M_PI * v) + diff * diff / v);
            }
            logp[static_cast<std::size_t>(k)] = lp;
            mx = std::max(mx, lp);
        }
        double z = 0.0;
        for (double lp : logp) z += std::exp(lp - mx);
        for (Eigen::Index k = 0; k < K; ++k) {
            const double gamma = std::exp(logp[static_cast<std::size_t>(k)] - mx) / z;
            for (Eigen::Index d = 0; d < D; ++d) {
                const double u = (x(n, d) - g.means(k, d)) / std::sqrt(g.variances(k, d));
                out(n, k * D + d) = gamma * u / std::sqrt(g.weights(k));
                out(n, K * D + k * D + d) = gamma * (u * u - 1.0) / std::sqrt(2.0 * g.weights(k));
            }
        }
    }
    return out;
}

Outcome gmm_fv() {
    Rng rng(5);
    int em_violations = 0;
    int length_violations = 0;
    for (int i = 0; i < kGmmDatasets; ++i) {
        const auto D = static_cast<Eigen::Index>(1 + rng.below(5));
        const auto N = static_cast<Eigen::Index>(100 + rng.below(400));
        const std::size_t centers = 1 + rng.below(4);
        RowMatrix x(N, D);
        for (Eigen::Index r = 0; r < N; ++r) {
            const double c = 4.0 * static_cast<double>(rng.below(centers));
            for (Eigen::Index d = 0; d < D; ++d) x(r, d) = rng.normal(c, rng.uniform(0.3, 2.0));
        }
        GmmOptions opt;
        opt.components = 1 + rng.below(8);
        opt.seed = rng.next();
        const auto g = fit_gmm(x, opt);
        for (std::size_t t = 1; t < g.log_likelihood_trace.size(); ++t) {
            if (g.log_likelihood_trace[t] < g.log_likelihood_trace[t - 1] - kEmTol) {
                ++em_violations;
                break;
            }
        }
        if (encode_fisher_vector(x, g, false).size() != static_cast<Eigen::Index>(2 * opt.components * static_cast<std::size_t>(D))) {
            ++length_violations;
        }
    }

    // Monte Carlo: clips drawn from the model have zero expected Fisher score.
    RowMatrix train(2000, 3);
    for (Eigen::Index r = 0; r < train.rows(); ++r) {
        const double c = r % 3 == 0 ? -3.0 : 2.0;
        for (Eigen::Index d = 0; d < 3; ++d) train(r, d) = rng.normal(c + double(d), 1.0 + 0.3 * double(d));
    }
    GmmOptions opt;
    opt.components = 4;
    opt.seed = 17;
    const auto g = fit_gmm(train, opt);
    const RowMatrix clips = g.sample(kFvClips, 99);
    const Vector fv = encode_fisher_vector(clips, g, false);
    const RowMatrix terms = fisher_terms(clips, g);
    std::size_t within = 0;
    for (Eigen::Index j = 0; j < fv.size(); ++j) {
        const double mean = terms.col(j).mean();
        const double sd = std::sqrt((terms.col(j).array() - mean).square().sum() / double(terms.rows() - 1));
        const double se = sd / std::sqrt(double(terms.rows()));
        if (std::abs(fv(j)) <= kFvStderrs * se) ++within;
    }
    const double frac = static_cast<double>(within) / static_cast<double>(fv.size());
    return {em_violations == 0 && length_violations == 0 && frac >= kFvFraction,
            fmt("EM decreases on %d/%d datasets (tol %.0e); FV length errors %d; %zu/%td FV entries within %.0f SE of 0 (%.1f%%, need %.0f%%)",
                em_violations, kGmmDatasets, kEmTol, length_violations, within, static_cast<std::ptrdiff_t>(fv.size()),
                kFvStderrs, 100.0 * frac, 100.0 * kFvFraction)};
}

Outcome classifier_floor() {
    double worst = 1.0;
    std::string worst_kind;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(1000 + seed);
        auto draw = [&](Matrix& x, std::vector<int>& y) {
            x.resize(400, 1);
            y.resize(400);
            for (Eigen::Index i = 0; i < 400; ++i) {
                y[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
                x(i, 0) = rng.normal(y[static_cast<std::size_t>(i)] ? 2.0 : -2.0, 1.0);
            }
        };
        Matrix xt, xe;
        std::vector<int> yt, ye;
        draw(xt, yt);
        draw(xe, ye);
        for (auto kind : kAllClassifierKinds) {
            const double a = auc(predict_scores(train(kind, xt, yt, Hyperparams{}, seed), xe), ye);
            if (a < worst) {
                worst = a;
                worst_kind = std::string(to_string(kind));
            }
        }
    }
    return {worst >= kFloorAuc, fmt("worst held-out AUC %.4f (%s) over 5 kinds x 5 seeds, floor %.2f", worst,
                                     worst_kind.c_str(), kFloorAuc)};
}

Outcome fusion_identities() {
    Rng rng(7);
    int identity_failures = 0;
    for (int t = 0; t < 100; ++t) {
        std::vector<ScoreSet> sets(5);
        const std::size_t n = 2 + rng.below(40);
        for (auto& s : sets) {
            for (std::size_t i = 0; i < n; ++i) {
                s.player_ids.push_back("p" + std::to_string(i));
                s.scores.push_back(rng.uniform());
                s.labels.push_back(static_cast<int>(i % 2));
            }
        }
        for (std::size_t f = 0; f < 5; ++f) {
            FusionWeights w{std::vector<double>(5, 0.0)};
            w.alpha[f] = 1.0;
            const auto out = fuse(sets, w);
            if (out.scores != sets[f].scores || out.player_ids != sets[f].player_ids) ++identity_failures;
        }
    }
    std::string counts;
    bool counts_ok = true;
    for (double step : {0.5, 0.25, 0.1}) {
        std::size_t n = 0;
        enumerate_weight_grid(step, 5, [&](const std::vector<double>&) { ++n; });
        const std::size_t expected = test::binomial(static_cast<std::size_t>(std::lround(1.0 / step)) + 4, 4);
        counts_ok = counts_ok && n == expected && weight_grid_size(step, 5) == expected;
        counts += fmt("%s%.2f->%zu/%zu", counts.empty() ? "" : ", ", step, n, expected);
    }
    return {identity_failures == 0 && counts_ok,
            fmt("one-hot mismatches %d/500; grid counts (step->got/expected) %s", identity_failures, counts.c_str())};
}

// ---------------------------------------------------------------------------
// End-to-end runs on synthetic data

GameDataset make_dataset(const test::TempDir& dir, std::size_t games, double effect, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.n_games = games;
    spec.seed = seed;
    if (effect > 0.0) {
        for (const char* ch : {"fau", "emotion", "mfcc"}) spec.effects[ch] = effect;
    }
    return generate_synthetic(spec, dir.path());
}

std::size_t jobs_from_env() {
    if (const char* env = std::getenv("GDD_JOBS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    return 1;
}

Outcome null_calibration() {
    double sum = 0.0;
    double lo = 1.0;
    double hi = 0.0;
    for (int seed = 1; seed <= kNullSeeds; ++seed) {
        test::TempDir dir("null");
        const auto ds = make_dataset(dir, kNullGames, 0.0, static_cast<std::uint64_t>(seed));
        ExperimentConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.folds = kNullFolds;
        cfg.jobs = jobs_from_env();
        const double a = run_experiment(ds, cfg).report.mean.auc;
        std::printf("  null seed %2d: mean ensemble AUC %.3f\n", seed, a);
        std::fflush(stdout);
        sum += a;
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    const double mean = sum / kNullSeeds;

    // Tripwire: a test game copied into training must be refused.
    bool tripped = false;
    {
        test::TempDir dir("trip");
        const auto ds = make_dataset(dir, kNullGames, 0.0, 1);
        ExperimentConfig cfg;
        cfg.folds = kNullFolds;
        auto splits = fold_splits(make_cv_plan(ds.games, kNullFolds, 1), ds.games);
        splits[2].train_games.push_back(splits[2].test_games.front());
        try {
            run_experiment(ds, cfg, splits);
        } catch (const Error& e) {
            tripped = e.code() == ErrorCode::LeakageDetected;
        }
    }
    const bool in_band = mean >= kNullLo && mean <= kNullHi;
    return {in_band && tripped,
            fmt("mean over %d seeds %.3f in [%.2f, %.2f] (per-seed range %.3f..%.3f, %zu games, k=%zu); tripwire %s",
                kNullSeeds, mean, kNullLo, kNullHi, lo, hi, kNullGames, kNullFolds, tripped ? "fired" : "did not fire")};
}

struct E2eRun {
    std::string json;
    double mean_auc = 0.0;
    std::vector<AblationRow> ablation;
};

E2eRun e2e_run(std::uint64_t seed) {
    test::TempDir dir("e2e");
    const auto ds = make_dataset(dir, kE2eGames, kE2eEffect, seed);
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.folds = kE2eFolds;
    cfg.jobs = jobs_from_env();
    auto run = run_experiment(ds, cfg);
    run.report.ablation = ablate_leave_one_out(run);
    return {to_json_text(run.report), run.report.mean.auc, run.report.ablation};
}

Outcome end_to_end() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::set<std::string> informative{"fau_hist", "mfcc_fv", "emotion_hist"};
    double auc_sum = 0.0;
    std::map<std::string, double> delta_sum;
    std::vector<std::string> order;
    for (int seed = 1; seed <= kE2eSeeds; ++seed) {
        const auto r = e2e_run(static_cast<std::uint64_t>(seed));
        auc_sum += r.mean_auc;
        std::string deltas;
        for (const auto& a : r.ablation) {
            if (delta_sum.find(a.removed) == delta_sum.end()) order.push_back(a.removed);
            delta_sum[a.removed] += a.delta_auc;
            deltas += fmt(" %s %+.3f", a.removed.c_str(), a.delta_auc);
        }
        std::printf("  e2e seed %d: mean ensemble AUC %.3f; drop when removed:%s\n", seed, r.mean_auc, deltas.c_str());
        std::fflush(stdout);
    }
    const double mean = auc_sum / kE2eSeeds;
    const double minutes = seconds_since(t0) / 60.0;
    bool ok = mean >= kE2eAuc && minutes < kE2eMinutes;
    std::string parts;
    for (const auto& name : order) {
        const double d = delta_sum[name] / kE2eSeeds;
        const bool inf = informative.count(name) > 0;
        const bool this_ok = inf ? d >= kInformativeDrop : std::abs(d) < kNoiseChange;
        ok = ok && this_ok;
        parts += fmt("; %s %s %.3f %s", inf ? "informative" : "noise", name.c_str(), d,
                     this_ok ? "ok" : (inf ? "< 0.05" : ">= 0.03"));
    }
    return {ok, fmt("mean AUC %.3f (need >= %.2f) over %d seeds, %zu games, k=%zu, effect %.1f; avg drop%s; %.1f min (limit %.0f)",
                    mean, kE2eAuc, kE2eSeeds, kE2eGames, kE2eFolds, kE2eEffect, parts.c_str(), minutes, kE2eMinutes)};
}

Outcome determinism() {
    const auto a = e2e_run(1);
    const auto b = e2e_run(1);
    return {a.json == b.json, fmt("two runs of the seed-1 end-to-end experiment: %zu-byte reports %s", a.json.size(),
                                  a.json == b.json ? "identical" : "differ")};
}

Outcome table_shape() {
    ExperimentReport rep;
    rep.config.families = default_families();
    rep.folds.resize(2);
    for (int i = 0; i < 7; ++i) {
        EnsembleRow row;
        row.kinds = {ClassifierKind::LogisticRegression, ClassifierKind::RandomForest, ClassifierKind::GaussianNB,
                     ClassifierKind::LinearSVM, ClassifierKind::GaussianNB};
        row.active.assign(5, true);
        row.mean.auc = 0.7 - 0.01 * i;
        rep.top.push_back(row);
    }
    for (const auto& f : rep.config.families) {
        rep.families.push_back(FamilySummary{f.name, MetricReport{}, {}});
        rep.ablation.push_back(AblationRow{f.name, MetricReport{}, {}, 0.0});
    }
    const std::string text = render_report(rep, 5);
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) lines.push_back(l);

    const std::vector<std::string> metric_cols{"AUC", "F1", "FNR", "FPR", "Precision", "Recall"};
    std::size_t ens = 0;
    std::size_t abl = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].rfind("Classifiers", 0) == 0) ens = i;
        if (lines[i].rfind("Removed feature", 0) == 0) abl = i;
    }
    auto header_ok = [&](std::size_t i) {
        if (i == 0) return false;
        std::vector<std::string> cells;
        std::stringstream ss(lines[i]);
        for (std::string c; std::getline(ss, c, '|');) {
            const auto b = c.find_first_not_of(' ');
            const auto e = c.find_last_not_of(' ');
            cells.push_back(b == std::string::npos ? "" : c.substr(b, e - b + 1));
        }
        return cells.size() == 7 && std::equal(metric_cols.begin(), metric_cols.end(), cells.begin() + 1);
    };
    auto rows_after = [&](std::size_t i) {
        std::size_t n = 0;
        for (std::size_t r = i + 2; r < lines.size() && !lines[r].empty(); ++r) ++n;
        return n;
    };
    const bool ens_ok = header_ok(ens) && rows_after(ens) == 5 && lines[ens + 2].rfind("LR+RF+NB+L-SVM+NB", 0) == 0;
    const bool abl_ok = header_ok(abl) && rows_after(abl) == 5;
    return {ens_ok && abl_ok, fmt("ensemble table columns %s with %zu rows for --top 5; ablation table columns %s with %zu rows",
                                  header_ok(ens) ? "match" : "differ", ens ? rows_after(ens) : 0,
                                  header_ok(abl) ? "match" : "differ", abl ? rows_after(abl) : 0)};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
        } else {
            std::fprintf(stderr, "usage: %s [--only N[,M...]]\n", argv[0]);
            return 2;
        }
    }

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"LiarRank oracle equivalence", liarrank_oracle},
        {"LiarRank monotone invariance", liarrank_invariance},
        {"AUC oracle", auc_oracle},
        {"histogram conservation and length laws", histogram_laws},
        {"GMM/FV sanity", gmm_fv},
        {"classifier floor", classifier_floor},
        {"fusion identities", fusion_identities},
        {"null calibration and leakage tripwire", null_calibration},
        {"end-to-end synthetic regression", end_to_end},
        {"determinism", determinism},
        {"table shape", table_shape},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d (%s): %s: %s\n", id, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
