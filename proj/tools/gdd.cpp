// gdd: command-line front end for the group deception-detection pipeline.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gdd/bundle.hpp"
#include "gdd/dataset.hpp"
#include "gdd/error.hpp"
#include "gdd/evaluation.hpp"
#include "gdd/report.hpp"
#include "gdd/serialize.hpp"
#include "gdd/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitRuntime = 2;

// Raised for bad command-line usage that CLI11 cannot catch by itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string dataset;
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    bool force = false;
    bool verbose = false;
    std::optional<double> clip_len;
    std::optional<double> clip_interval;
    std::vector<std::string> frames_per_clip;
    std::optional<std::size_t> folds;
};

std::size_t default_jobs() {
    if (const char* env = std::getenv("GDD_JOBS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
        std::cerr << "gdd: ignoring invalid GDD_JOBS='" << env << "'\n";
    }
    return 1;
}

void add_out(CLI::App* app, Common& c, bool required = true) {
    auto* o = app->add_option("-o,--out", c.out, "Output directory (created if absent)");
    if (required) o->required();
    app->add_flag("-f,--force", c.force, "Overwrite existing outputs");
}

void add_pipeline_options(CLI::App* app, Common& c) {
    app->add_option("-d,--dataset", c.dataset, "Dataset manifest (defaults to the config's dataset)");
    app->add_option("-c,--config", c.config, "Experiment config file (JSON); defaults are used when omitted");
    app->add_option("-s,--seed", c.seed, "Seed override for every random choice");
    app->add_option("-j,--jobs", c.jobs, "Worker threads (default: $GDD_JOBS or 1)")->check(CLI::PositiveNumber);
    app->add_option("--clip-len", c.clip_len, "Clip length in seconds")->check(CLI::PositiveNumber);
    app->add_option("--clip-interval", c.clip_interval, "Seconds between clip starts")->check(CLI::PositiveNumber);
    app->add_option("--frames-per-clip", c.frames_per_clip, "Frame cap per clip as channel=count (repeatable)");
    app->add_flag("-v,--verbose", c.verbose, "Print per-fold details");
    add_out(app, c);
}

gdd::ExperimentConfig load_config(Common& c) {
    gdd::ExperimentConfig cfg;
    if (!c.config.empty()) {
        cfg = gdd::config_from_json(gdd::read_text_file(c.config));
        if (c.dataset.empty() && cfg.dataset) {
            fs::path p = *cfg.dataset;
            if (p.is_relative()) p = fs::path(c.config).parent_path() / p;
            c.dataset = p.string();
        }
    }
    if (c.dataset.empty()) throw UsageError("no dataset: pass --dataset or set \"dataset\" in the config");
    if (c.seed) {
        cfg.seed = *c.seed;
        cfg.sampling.rng_seed = *c.seed;
    }
    if (c.folds) cfg.folds = *c.folds;
    if (c.clip_len) cfg.sampling.clip_len_s = *c.clip_len;
    if (c.clip_interval) cfg.sampling.clip_interval_s = *c.clip_interval;
    for (const auto& spec : c.frames_per_clip) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--frames-per-clip expects channel=count, got '" + spec + "'");
        std::size_t count = 0;
        try {
            std::size_t used = 0;
            const long v = std::stol(spec.substr(eq + 1), &used);
            if (v < 1 || used != spec.size() - eq - 1) throw std::invalid_argument("count");
            count = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw UsageError("--frames-per-clip count must be a positive integer in '" + spec + "'");
        }
        cfg.sampling.frames_per_clip[spec.substr(0, eq)] = count;
    }
    cfg.jobs = c.jobs;
    cfg.dataset = c.dataset;
    cfg.validate();
    return cfg;
}

void refuse_overwrite(const fs::path& target, bool force) {
    if (fs::exists(target) && !force) {
        throw UsageError("'" + target.string() + "' exists; pass --force to overwrite");
    }
}

gdd::GameDataset load_valid_dataset(const std::string& manifest) {
    gdd::GameDataset ds = gdd::load_manifest(manifest);
    return ds;
}

void print_folds(const gdd::ExperimentReport& rep) {
    for (const auto& f : rep.folds) {
        std::string kinds;
        for (auto k : f.kinds) kinds += (kinds.empty() ? "" : "+") + std::string(gdd::to_string(k));
        std::printf("fold %zu: test AUC %.3f, validation AUC %.3f, %s\n", f.fold, f.test.auc, f.validation_auc,
                    kinds.c_str());
    }
}

void write_report_files(const fs::path& out, const gdd::ExperimentReport& rep) {
    gdd::write_text_file(out / "report.json", gdd::to_json_text(rep));
    gdd::write_text_file(out / "metrics.tsv", gdd::metrics_tsv(rep));
    gdd::write_text_file(out / "report.txt", gdd::render_report(rep, rep.top.size()));
}

int cmd_synth(const std::string& spec_file, std::size_t games, double effect, const std::vector<std::string>& channels,
              const std::optional<std::uint64_t>& seed, const Common& c) {
    gdd::SyntheticSpec spec;
    if (!spec_file.empty()) spec = gdd::synthetic_spec_from_json(gdd::read_text_file(spec_file));
    if (spec_file.empty() || games != 0) spec.n_games = games;
    if (seed) spec.seed = *seed;
    if (effect > 0.0) {
        for (const auto& ch : channels) spec.effects[ch] = effect;
    } else if (effect < 0.0) {
        throw gdd::Error(gdd::ErrorCode::InvalidArgument, "--effect must be >= 0");
    }
    if (spec.n_games == 0) throw gdd::Error(gdd::ErrorCode::InvalidArgument, "--games must be >= 1");
    spec.validate();
    const fs::path out(c.out);
    refuse_overwrite(out / "manifest.json", c.force);
    const auto ds = gdd::generate_synthetic(spec, out);
    std::size_t players = 0;
    std::size_t spies = 0;
    for (const auto& g : ds.games) {
        for (const auto& p : g.players) {
            ++players;
            spies += p.is_spy() ? 1 : 0;
        }
    }
    std::printf("wrote %s: %zu games, %zu players, %zu spies\n", (out / "manifest.json").string().c_str(),
                ds.games.size(), players, spies);
    return kExitOk;
}

int cmd_validate(const std::string& manifest) {
    const auto ds = gdd::load_manifest(manifest);
    const auto report = gdd::validate_dataset(ds);
    for (const auto& w : report.warnings) std::printf("warning: %s\n", w.c_str());
    for (const auto& e : report.errors) std::printf("error: %s\n", e.c_str());
    std::printf("%zu games, %zu players, %zu series checked: %zu errors, %zu warnings\n", ds.games.size(),
                ds.player_count(), report.coverage.size(), report.errors.size(), report.warnings.size());
    return report.ok() ? kExitOk : kExitInput;
}

int cmd_encode(Common& c) {
    const auto cfg = load_config(c);
    const fs::path out(c.out);
    refuse_overwrite(out / "encoders", c.force);
    const auto ds = load_valid_dataset(c.dataset);
    const auto result = gdd::encode_dataset(ds, cfg);
    for (std::size_t i = 0; i < result.encoders.size(); ++i) {
        const auto& enc = result.encoders[i];
        const auto& feat = result.features[i];
        gdd::write_text_file(out / "encoders" / (enc.family + ".json"), gdd::to_json_text(enc));
        std::string csv = "player_id,label";
        for (Eigen::Index d = 0; d < feat.features.cols(); ++d) csv += ",f" + std::to_string(d);
        csv += "\n";
        char buf[64];
        for (std::size_t r = 0; r < feat.player_ids.size(); ++r) {
            csv += feat.player_ids[r] + "," + std::to_string(feat.labels[r]);
            for (Eigen::Index d = 0; d < feat.features.cols(); ++d) {
                std::snprintf(buf, sizeof(buf), ",%.17g", feat.features(static_cast<Eigen::Index>(r), d));
                csv += buf;
            }
            csv += "\n";
        }
        gdd::write_text_file(out / "features" / (enc.family + ".csv"), csv);
        std::printf("%s: %zu players x %td features\n", enc.family.c_str(), feat.player_ids.size(),
                    static_cast<std::ptrdiff_t>(feat.features.cols()));
    }
    return kExitOk;
}

int cmd_train(Common& c, const std::string& score_dataset) {
    const auto cfg = load_config(c);
    const fs::path out(c.out);
    refuse_overwrite(out / "bundle.json", c.force);
    const auto ds = load_valid_dataset(c.dataset);
    const auto bundle = gdd::train_bundle(ds, cfg);
    gdd::write_text_file(out / "bundle.json", gdd::to_json_text(bundle));
    std::string kinds;
    for (const auto& f : bundle.families) {
        kinds += (kinds.empty() ? "" : "+") + std::string(gdd::to_string(f.choice.best_kind));
    }
    std::printf("trained %s on %zu games, validation AUC %.3f\n", kinds.c_str(), bundle.trained_on_games.size(),
                bundle.validation_auc);
    if (!score_dataset.empty()) {
        const auto target = gdd::load_manifest(score_dataset);
        const auto scores = gdd::score_bundle(bundle, target, cfg.jobs);
        std::string csv = "player_id,label,score\n";
        char buf[64];
        for (std::size_t i = 0; i < scores.fused.size(); ++i) {
            std::snprintf(buf, sizeof(buf), ",%d,%.17g\n", scores.fused.labels[i], scores.fused.scores[i]);
            csv += scores.fused.player_ids[i] + buf;
        }
        gdd::write_text_file(out / "scores.csv", csv);
        std::printf("scored %zu players -> %s\n", scores.fused.size(), (out / "scores.csv").string().c_str());
    }
    return kExitOk;
}

int cmd_evaluate(Common& c, bool ablate) {
    const auto cfg = load_config(c);
    const fs::path out(c.out);
    refuse_overwrite(out / "report.json", c.force);
    const auto ds = load_valid_dataset(c.dataset);
    auto run = gdd::run_experiment(ds, cfg);
    if (ablate) run.report.ablation = gdd::ablate_leave_one_out(run);
    write_report_files(out, run.report);
    if (c.verbose) print_folds(run.report);
    std::printf("mean ensemble AUC %.3f over %zu folds (report: %s)\n", run.report.mean.auc, run.report.folds.size(),
                (out / "report.json").string().c_str());
    if (ablate) {
        for (const auto& a : run.report.ablation) {
            std::printf("without %s: AUC %.3f (change %+.3f)\n", a.removed.c_str(), a.mean.auc, -a.delta_auc);
        }
    }
    return kExitOk;
}

int cmd_report(const std::string& path, std::optional<std::size_t> top) {
    gdd::ExperimentReport rep;
    try {
        rep = gdd::report_from_json(gdd::read_text_file(path));
    } catch (const gdd::Error& e) {
        throw gdd::Error(gdd::ErrorCode::ParseError, "cannot read report '" + path + "': " + e.what());
    }
    std::fputs(gdd::render_report(rep, top.value_or(rep.top.size())).c_str(), stdout);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-term group deception detection: synthetic data, feature encoding, training and evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "gdd 0.1.0");

    Common common;
    common.jobs = default_jobs();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset (manifest + feature files)");
    std::string spec_file;
    std::size_t games = 20;
    double effect = 0.0;
    std::vector<std::string> signal_channels{"fau", "emotion", "mfcc"};
    std::optional<std::uint64_t> synth_seed;
    synth->add_option("--spec", spec_file, "Synthetic spec file (JSON); flags override it");
    synth->add_option("-g,--games", games, "Number of games");
    synth->add_option("-e,--effect", effect, "Spy mean shift, in between-player standard deviations");
    synth->add_option("--signal-channels", signal_channels, "Channels (or channel[i]) that receive the effect")
        ->delimiter(',')
        ->capture_default_str();
    synth->add_option("-s,--seed", synth_seed, "Random seed");
    add_out(synth, common);

    auto* validate = app.add_subcommand("validate", "Check a dataset manifest and every feature file");
    std::string manifest;
    validate->add_option("dataset,-d,--dataset", manifest, "Dataset manifest")->required();

    auto* encode = app.add_subcommand("encode", "Fit every family's encoder on a dataset and write player features");
    add_pipeline_options(encode, common);

    auto* trn = app.add_subcommand("train", "Select and fit the full ensemble on a dataset and write a model bundle");
    std::string score_dataset;
    add_pipeline_options(trn, common);
    trn->add_option("--score", score_dataset, "Also score this dataset with the trained bundle");

    auto* evaluate = app.add_subcommand("evaluate", "Game-disjoint cross-validation of the full pipeline");
    add_pipeline_options(evaluate, common);
    evaluate->add_option("-k,--folds", common.folds, "Number of folds (overrides the config)")->check(CLI::Range(2, 1000));

    auto* ablate = app.add_subcommand("ablate", "Cross-validation plus leave-one-family-out ablation");
    add_pipeline_options(ablate, common);
    ablate->add_option("-k,--folds", common.folds, "Number of folds (overrides the config)")->check(CLI::Range(2, 1000));

    auto* report = app.add_subcommand("report", "Render a report file as aligned tables");
    std::string report_path;
    std::optional<std::size_t> top;
    report->add_option("report,-r,--report", report_path, "report.json written by evaluate or ablate")->required();
    report->add_option("-t,--top", top, "Number of ensemble rows to show (default: all stored)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*synth) return cmd_synth(spec_file, games, effect, signal_channels, synth_seed, common);
        if (*validate) return cmd_validate(manifest);
        if (*encode) return cmd_encode(common);
        if (*trn) return cmd_train(common, score_dataset);
        if (*evaluate) return cmd_evaluate(common, false);
        if (*ablate) return cmd_evaluate(common, true);
        if (*report) return cmd_report(report_path, top);
    } catch (const UsageError& e) {
        std::cerr << "gdd: " << e.what() << "\n";
        return kExitInput;
    } catch (const gdd::Error& e) {
        std::cerr << "gdd: " << e.what() << "\n";
        return e.is_input_error() ? kExitInput : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "gdd: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}
