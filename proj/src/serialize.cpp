#include "gdd/serialize.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gdd/error.hpp"
#include "gdd/synthetic.hpp"

namespace gdd {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::SchemaViolation, where + ": " + what);
}

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

template <typename T>
void read(const json& j, const std::string& where, T& out);

void read_number(const json& j, const std::string& where, double& out) {
    if (!j.is_number()) schema_error(where, "expected a number");
    out = j.get<double>();
}

template <typename T>
void read_unsigned(const json& j, const std::string& where, T& out) {
    if (!j.is_number_unsigned()) schema_error(where, "expected a non-negative integer");
    out = j.get<T>();
}

// Checks that every key of an object was consumed.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) schema_error(where_, "expected an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        read(*it, where_ + "." + key, out);
    }

    template <typename T>
    void require(const char* key, T& out) {
        if (!j_.contains(key)) schema_error(where_, std::string("missing key '") + key + "'");
        get(key, out);
    }

    void ignore(const char* key) { seen_.insert(key); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) schema_error(where_, "unknown key '" + it.key() + "'");
        }
    }

    const std::string& where() const { return where_; }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

template <typename T>
void read_vector(const json& j, const std::string& where, std::vector<T>& out) {
    if (!j.is_array()) schema_error(where, "expected an array");
    out.clear();
    out.resize(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) read(j[i], where + "[" + std::to_string(i) + "]", out[i]);
}

void read_enum_string(const json& j, const std::string& where, std::string& out) {
    if (!j.is_string()) schema_error(where, "expected a string");
    out = j.get<std::string>();
}

// Converts InvalidArgument from the *_from_string helpers to schema errors.
template <typename F>
auto parse_name(const json& j, const std::string& where, F&& parse) {
    std::string s;
    read_enum_string(j, where, s);
    try {
        return parse(s);
    } catch (const Error& e) {
        schema_error(where, e.what());
    }
}

template <typename T>
void read_custom(const json& j, const std::string& where, std::vector<T>& out);
template <typename T>
void read_custom(const json& j, const std::string& where, std::optional<T>& out);
template <typename T, typename C>
void read_custom(const json& j, const std::string& where, std::map<std::string, T, C>& out);
template <typename T, std::size_t N>
void read_custom(const json& j, const std::string& where, std::array<T, N>& out);
void read_custom(const json& j, const std::string& where, Vector& out);
void read_custom(const json& j, const std::string& where, Matrix& out);
void read_custom(const json& j, const std::string& where, RowMatrix& out);
void read_custom(const json& j, const std::string& where, ClassifierKind& out);
void read_custom(const json& j, const std::string& where, HistogramMode& out);
void read_custom(const json& j, const std::string& where, FamilyType& out);
void read_custom(const json& j, const std::string& where, HistogramNorm& out);
void read_custom(const json& j, const std::string& where, ChannelLevel& out);
void read_custom(const json& j, const std::string& where, SamplingPolicy& p);
void read_custom(const json& j, const std::string& where, Hyperparams& h);
void read_custom(const json& j, const std::string& where, FamilyConfig& f);
void read_custom(const json& j, const std::string& where, ExperimentConfig& c);
void read_custom(const json& j, const std::string& where, MetricReport& m);
void read_custom(const json& j, const std::string& where, FamilyChoice& c);
void read_custom(const json& j, const std::string& where, FusionWeights& w);
void read_custom(const json& j, const std::string& where, FamilyFoldResult& f);
void read_custom(const json& j, const std::string& where, FoldResult& f);
void read_custom(const json& j, const std::string& where, EnsembleRow& e);
void read_custom(const json& j, const std::string& where, FamilySummary& s);
void read_custom(const json& j, const std::string& where, AblationRow& a);
void read_custom(const json& j, const std::string& where, ExperimentReport& rep);
void read_custom(const json& j, const std::string& where, ChannelSpec& c);
void read_custom(const json& j, const std::string& where, BinEdges& b);
void read_custom(const json& j, const std::string& where, HistogramEncoding& h);
void read_custom(const json& j, const std::string& where, GmmModel& g);
void read_custom(const json& j, const std::string& where, LiarRankCorpus& c);
void read_custom(const json& j, const std::string& where, FittedEncoder& e);
void read_custom(const json& j, const std::string& where, Standardizer& s);
void read_custom(const json& j, const std::string& where, TreeNode& n);
void read_custom(const json& j, const std::string& where, DecisionTree& t);
void read_custom(const json& j, const std::string& where, TrainedModel& m);
void read_custom(const json& j, const std::string& where, BundledFamily& b);
void read_custom(const json& j, const std::string& where, ModelBundle& b);
void read_custom(const json& j, const std::string& where, SyntheticSpec& s);

template <typename T>
void read(const json& j, const std::string& where, T& out) {
    if constexpr (std::is_same_v<T, double>) {
        read_number(j, where, out);
    } else if constexpr (std::is_same_v<T, bool>) {
        if (!j.is_boolean()) schema_error(where, "expected a boolean");
        out = j.get<bool>();
    } else if constexpr (std::is_same_v<T, int>) {
        if (!j.is_number_integer()) schema_error(where, "expected an integer");
        out = j.get<int>();
    } else if constexpr (std::is_unsigned_v<T>) {
        read_unsigned(j, where, out);
    } else if constexpr (std::is_same_v<T, std::string>) {
        read_enum_string(j, where, out);
    } else if constexpr (std::is_same_v<T, std::vector<bool>>) {
        if (!j.is_array()) schema_error(where, "expected an array");
        out.clear();
        for (std::size_t i = 0; i < j.size(); ++i) {
            bool b = false;
            read(j[i], where + "[" + std::to_string(i) + "]", b);
            out.push_back(b);
        }
    } else {
        read_custom(j, where, out);
    }
}

template <typename T>
void read_custom(const json& j, const std::string& where, std::vector<T>& out) {
    read_vector(j, where, out);
}

template <typename T>
void read_custom(const json& j, const std::string& where, std::optional<T>& out) {
    if (j.is_null()) {
        out.reset();
        return;
    }
    T v{};
    read(j, where, v);
    out = std::move(v);
}

template <typename T, typename C>
void read_custom(const json& j, const std::string& where, std::map<std::string, T, C>& out) {
    if (!j.is_object()) schema_error(where, "expected an object");
    out.clear();
    for (auto it = j.begin(); it != j.end(); ++it) {
        T v{};
        read(it.value(), where + "." + it.key(), v);
        out.emplace(it.key(), std::move(v));
    }
}

template <typename T, std::size_t N>
void read_custom(const json& j, const std::string& where, std::array<T, N>& out) {
    if (!j.is_array() || j.size() != N) schema_error(where, "expected an array of " + std::to_string(N));
    for (std::size_t i = 0; i < N; ++i) read(j[i], where + "[" + std::to_string(i) + "]", out[i]);
}

void read_custom(const json& j, const std::string& where, Vector& out) {
    std::vector<double> v;
    read_vector(j, where, v);
    out = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <typename M>
void read_matrix(const json& j, const std::string& where, M& out) {
    std::vector<std::vector<double>> rows;
    read_vector(j, where, rows);
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    out.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) schema_error(where, "ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
}

void read_custom(const json& j, const std::string& where, Matrix& out) { read_matrix(j, where, out); }
void read_custom(const json& j, const std::string& where, RowMatrix& out) { read_matrix(j, where, out); }

void read_custom(const json& j, const std::string& where, ClassifierKind& out) {
    out = parse_name(j, where, classifier_kind_from_string);
}
void read_custom(const json& j, const std::string& where, HistogramMode& out) {
    out = parse_name(j, where, histogram_mode_from_string);
}
void read_custom(const json& j, const std::string& where, FamilyType& out) {
    out = parse_name(j, where, family_type_from_string);
}
void read_custom(const json& j, const std::string& where, HistogramNorm& out) {
    out = parse_name(j, where, [](const std::string& s) {
        if (s == "counts") return HistogramNorm::Counts;
        if (s == "frequencies") return HistogramNorm::Frequencies;
        throw Error(ErrorCode::InvalidArgument, "unknown histogram normalisation '" + s + "'");
    });
}
void read_custom(const json& j, const std::string& where, ChannelLevel& out) {
    out = parse_name(j, where, [](const std::string& s) {
        if (s == "frame") return ChannelLevel::Frame;
        if (s == "subsecond") return ChannelLevel::SubSecond;
        throw Error(ErrorCode::InvalidArgument, "unknown channel level '" + s + "'");
    });
}

void read_custom(const json& j, const std::string& where, SamplingPolicy& p) {
    ObjectReader r(j, where);
    r.get("clip_len_s", p.clip_len_s);
    r.get("clip_interval_s", p.clip_interval_s);
    r.get("frames_per_clip", p.frames_per_clip);
    r.get("default_frames_per_clip", p.default_frames_per_clip);
    r.get("rng_seed", p.rng_seed);
    r.finish();
}

void read_custom(const json& j, const std::string& where, Hyperparams& h) {
    ObjectReader r(j, where);
    r.get("knn_k", h.knn_k);
    r.get("lr_l2", h.lr_l2);
    r.get("svm_l2", h.svm_l2);
    r.get("rf_trees", h.rf_trees);
    r.get("rf_max_depth", h.rf_max_depth);
    r.get("nb_var_floor", h.nb_var_floor);
    r.get("grad_tol", h.grad_tol);
    r.get("max_iters", h.max_iters);
    r.finish();
}

void read_custom(const json& j, const std::string& where, FamilyConfig& f) {
    ObjectReader r(j, where);
    r.require("name", f.name);
    r.require("type", f.type);
    r.require("channel", f.channel);
    r.get("modes", f.modes);
    r.get("bins", f.bins);
    r.get("normalize", f.normalize);
    r.get("candidate_dims", f.candidate_dims);
    r.get("gmm_components", f.gmm_components);
    r.get("gmm_max_iters", f.gmm_max_iters);
    r.get("gmm_tol", f.gmm_tol);
    r.get("gmm_variance_floor", f.gmm_variance_floor);
    r.get("fv_normalize", f.fv_normalize);
    r.get("max_dims", f.max_dims);
    r.get("normalize_ranks", f.normalize_ranks);
    r.finish();
}

void read_custom(const json& j, const std::string& where, ExperimentConfig& c) {
    ObjectReader r(j, where);
    r.get("dataset", c.dataset);
    r.get("seed", c.seed);
    r.get("folds", c.folds);
    r.get("validation_fraction", c.validation_fraction);
    r.get("grid_step", c.grid_step);
    r.get("top_n", c.top_n);
    r.get("sampling", c.sampling);
    r.get("hyperparams", c.hyperparams);
    r.get("kinds", c.kinds);
    r.get("families", c.families);
    r.finish();
}

void read_custom(const json& j, const std::string& where, MetricReport& m) {
    ObjectReader r(j, where);
    r.require("auc", m.auc);
    r.require("f1", m.f1);
    r.require("fnr", m.fnr);
    r.require("fpr", m.fpr);
    r.require("precision", m.precision);
    r.require("recall", m.recall);
    r.get("threshold", m.threshold);
    r.finish();
}

void read_custom(const json& j, const std::string& where, FamilyChoice& c) {
    ObjectReader r(j, where);
    r.get("mode", c.mode);
    r.get("bins", c.bins);
    r.get("dims", c.dims);
    r.get("best_kind", c.best_kind);
    r.get("validation_auc", c.validation_auc);
    r.finish();
}

void read_custom(const json& j, const std::string& where, FusionWeights& w) {
    read_vector(j, where, w.alpha);
}

void read_custom(const json& j, const std::string& where, FamilyFoldResult& f) {
    ObjectReader r(j, where);
    r.require("family", f.family);
    r.get("choice", f.choice);
    r.get("fv_dims", f.fv_dims);
    r.get("validation_auc", f.validation_auc);
    r.get("test_auc", f.test_auc);
    r.require("test", f.test);
    r.get("fitted_on_games", f.fitted_on_games);
    r.finish();
}

void read_custom(const json& j, const std::string& where, FoldResult& f) {
    ObjectReader r(j, where);
    r.require("fold", f.fold);
    r.get("train_games", f.train_games);
    r.get("inner_train_games", f.inner_train_games);
    r.get("validation_games", f.validation_games);
    r.get("test_games", f.test_games);
    r.get("families", f.families);
    r.get("kinds", f.kinds);
    r.get("weights", f.weights);
    r.get("validation_auc", f.validation_auc);
    r.require("test", f.test);
    r.finish();
}

void read_custom(const json& j, const std::string& where, EnsembleRow& e) {
    ObjectReader r(j, where);
    r.require("kinds", e.kinds);
    r.get("active", e.active);
    r.get("mean_validation_auc", e.mean_validation_auc);
    r.require("mean", e.mean);
    r.finish();
    if (e.active.empty()) e.active.assign(e.kinds.size(), true);
    if (e.active.size() != e.kinds.size()) schema_error(where, "kinds and active differ in length");
}

void read_custom(const json& j, const std::string& where, FamilySummary& s) {
    ObjectReader r(j, where);
    r.require("family", s.family);
    r.require("mean", s.mean);
    r.get("fold_auc", s.fold_auc);
    r.finish();
}

void read_custom(const json& j, const std::string& where, AblationRow& a) {
    ObjectReader r(j, where);
    r.require("removed", a.removed);
    r.require("mean", a.mean);
    r.get("fold_auc", a.fold_auc);
    r.get("delta_auc", a.delta_auc);
    r.finish();
}

void read_custom(const json& j, const std::string& where, ExperimentReport& rep) {
    ObjectReader r(j, where);
    std::string format;
    r.require("format", format);
    if (format != "gdd-report") schema_error(where, "not a report (format '" + format + "')");
    int version = 0;
    r.require("version", version);
    if (version != 1) schema_error(where, "unsupported report version " + std::to_string(version));
    r.require("config", rep.config);
    r.require("mean", rep.mean);
    r.require("folds", rep.folds);
    r.get("families", rep.families);
    r.get("top", rep.top);
    r.get("ablation", rep.ablation);
    r.ignore("choices");
    r.finish();
}

void read_custom(const json& j, const std::string& where, ChannelSpec& c) {
    ObjectReader r(j, where);
    r.require("name", c.name);
    r.require("dim", c.dim);
    r.require("level", c.level);
    r.require("rate", c.rate);
    r.finish();
}

void read_custom(const json& j, const std::string& where, BinEdges& b) {
    ObjectReader r(j, where);
    r.get("channel", b.channel);
    r.require("edges", b.edges);
    r.finish();
}

void read_custom(const json& j, const std::string& where, HistogramEncoding& h) {
    ObjectReader r(j, where);
    r.require("mode", h.mode);
    r.get("channel", h.channel);
    r.require("selected_dims", h.selected_dims);
    r.get("frame_edges", h.frame_edges);
    r.get("clip_edges", h.clip_edges);
    r.get("normalize", h.normalize);
    r.finish();
}

void read_custom(const json& j, const std::string& where, GmmModel& g) {
    ObjectReader r(j, where);
    r.require("weights", g.weights);
    r.require("means", g.means);
    r.require("variances", g.variances);
    r.get("log_likelihood_trace", g.log_likelihood_trace);
    r.get("iterations", g.iterations);
    r.get("converged", g.converged);
    r.finish();
    if (g.means.rows() != g.weights.size() || g.variances.rows() != g.weights.size() ||
        g.means.cols() != g.variances.cols()) {
        schema_error(where, "inconsistent GMM shapes");
    }
}

void read_custom(const json& j, const std::string& where, LiarRankCorpus& c) {
    ObjectReader r(j, where);
    r.require("dims", c.dims);
    r.require("game_ids", c.game_ids);
    r.require("sorted_values", c.sorted_values);
    r.get("member_game", c.member_game);
    r.get("member_values", c.member_values);
    r.finish();
}

void read_custom(const json& j, const std::string& where, FittedEncoder& e) {
    ObjectReader r(j, where);
    r.require("family", e.family);
    r.require("type", e.type);
    r.require("channel", e.channel);
    r.get("histogram", e.histogram);
    r.get("gmm", e.gmm);
    r.get("fv_normalize", e.fv_normalize);
    r.get("fv_dims", e.fv_dims);
    r.get("corpus", e.corpus);
    r.get("normalize_ranks", e.normalize_ranks);
    r.get("fitted_on_games", e.fitted_on_games);
    r.finish();
}

void read_custom(const json& j, const std::string& where, Standardizer& s) {
    ObjectReader r(j, where);
    r.require("mean", s.mean);
    r.require("scale", s.scale);
    r.finish();
}

void read_custom(const json& j, const std::string& where, TreeNode& n) {
    std::array<double, 5> v{};
    read(j, where, v);
    n.feature = static_cast<int>(v[0]);
    n.threshold = v[1];
    n.left = static_cast<int>(v[2]);
    n.right = static_cast<int>(v[3]);
    n.vote = static_cast<int>(v[4]);
}

void read_custom(const json& j, const std::string& where, DecisionTree& t) { read_vector(j, where, t.nodes); }

void read_custom(const json& j, const std::string& where, TrainedModel& m) {
    ObjectReader r(j, where);
    r.require("kind", m.kind);
    r.get("hyperparams", m.hyperparams);
    r.require("scaler", m.scaler);
    r.require("dim", m.dim);
    const auto& p = j.at("params");
    r.ignore("params");
    r.finish();
    const std::string pw = where + ".params";
    switch (m.kind) {
        case ClassifierKind::KNN: {
            KnnModel k;
            ObjectReader pr(p, pw);
            pr.require("train_x", k.train_x);
            pr.require("train_y", k.train_y);
            pr.require("k", k.k);
            pr.finish();
            m.params = std::move(k);
            break;
        }
        case ClassifierKind::LogisticRegression:
        case ClassifierKind::LinearSVM: {
            LinearModel l;
            ObjectReader pr(p, pw);
            pr.require("weights", l.weights);
            pr.require("bias", l.bias);
            pr.finish();
            if (m.kind == ClassifierKind::LogisticRegression) {
                m.params = LogisticModel{l};
            } else {
                m.params = LinearSvmModel{l};
            }
            break;
        }
        case ClassifierKind::GaussianNB: {
            NaiveBayesModel nb;
            ObjectReader pr(p, pw);
            pr.require("mean", nb.mean);
            pr.require("var", nb.var);
            pr.require("log_prior", nb.log_prior);
            pr.finish();
            m.params = std::move(nb);
            break;
        }
        case ClassifierKind::RandomForest: {
            ForestModel f;
            ObjectReader pr(p, pw);
            pr.require("trees", f.trees);
            pr.finish();
            m.params = std::move(f);
            break;
        }
    }
}

void read_custom(const json& j, const std::string& where, BundledFamily& b) {
    ObjectReader r(j, where);
    r.require("config", b.config);
    r.require("choice", b.choice);
    r.require("encoder", b.encoder);
    r.require("model", b.model);
    r.finish();
}

void read_custom(const json& j, const std::string& where, ModelBundle& b) {
    ObjectReader r(j, where);
    std::string format;
    r.require("format", format);
    if (format != "gdd-bundle") schema_error(where, "not a model bundle (format '" + format + "')");
    r.require("version", b.version);
    if (b.version != kBundleVersion) schema_error(where, "unsupported bundle version " + std::to_string(b.version));
    r.require("sampling", b.sampling);
    r.require("channels", b.channels);
    r.require("families", b.families);
    r.require("weights", b.weights);
    r.get("validation_auc", b.validation_auc);
    r.get("trained_on_games", b.trained_on_games);
    r.finish();
}

void read_custom(const json& j, const std::string& where, SyntheticSpec& s) {
    ObjectReader r(j, where);
    r.get("n_games", s.n_games);
    r.get("players_min", s.players_min);
    r.get("players_max", s.players_max);
    r.get("spies_min", s.spies_min);
    r.get("spies_max", s.spies_max);
    r.get("duration_min_s", s.duration_min_s);
    r.get("duration_max_s", s.duration_max_s);
    r.get("channels", s.channels);
    r.get("effects", s.effects);
    r.get("drift_sd", s.drift_sd);
    r.get("drift_tau_s", s.drift_tau_s);
    r.get("noise_sd", s.noise_sd);
    r.get("seed", s.seed);
    r.finish();
}

json parse(std::string_view text, const char* what) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string(what) + " is not valid JSON: " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

json to_j(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

template <typename M>
json matrix_to_j(const M& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string name(HistogramNorm n) { return n == HistogramNorm::Counts ? "counts" : "frequencies"; }

template <typename T>
json names(const std::vector<T>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(std::string(to_string(x)));
    return out;
}

json to_j(const SamplingPolicy& p) {
    return {{"clip_len_s", p.clip_len_s},
            {"clip_interval_s", p.clip_interval_s},
            {"frames_per_clip", p.frames_per_clip},
            {"default_frames_per_clip", p.default_frames_per_clip},
            {"rng_seed", p.rng_seed}};
}

json to_j(const Hyperparams& h) {
    return {{"knn_k", h.knn_k},         {"lr_l2", h.lr_l2},
            {"svm_l2", h.svm_l2},       {"rf_trees", h.rf_trees},
            {"rf_max_depth", h.rf_max_depth}, {"nb_var_floor", h.nb_var_floor},
            {"grad_tol", h.grad_tol},   {"max_iters", h.max_iters}};
}

json to_j(const FamilyConfig& f) {
    json j{{"name", f.name},
           {"type", std::string(to_string(f.type))},
           {"channel", f.channel},
           {"modes", names(f.modes)},
           {"bins", f.bins},
           {"normalize", name(f.normalize)},
           {"gmm_components", f.gmm_components},
           {"gmm_max_iters", f.gmm_max_iters},
           {"gmm_tol", f.gmm_tol},
           {"gmm_variance_floor", f.gmm_variance_floor},
           {"fv_normalize", f.fv_normalize},
           {"max_dims", f.max_dims},
           {"normalize_ranks", f.normalize_ranks}};
    j["candidate_dims"] = f.candidate_dims ? json(*f.candidate_dims) : json(nullptr);
    return j;
}

json to_j(const ExperimentConfig& c) {
    json families = json::array();
    for (const auto& f : c.families) families.push_back(to_j(f));
    json j{{"seed", c.seed},
           {"folds", c.folds},
           {"validation_fraction", c.validation_fraction},
           {"grid_step", c.grid_step},
           {"top_n", c.top_n},
           {"sampling", to_j(c.sampling)},
           {"hyperparams", to_j(c.hyperparams)},
           {"kinds", names(c.kinds)},
           {"families", std::move(families)}};
    j["dataset"] = c.dataset ? json(*c.dataset) : json(nullptr);
    return j;
}

json to_j(const MetricReport& m) {
    return {{"auc", m.auc},   {"f1", m.f1},           {"fnr", m.fnr},       {"fpr", m.fpr},
            {"precision", m.precision}, {"recall", m.recall}, {"threshold", m.threshold}};
}

json to_j(const FamilyChoice& c) {
    return {{"mode", std::string(to_string(c.mode))},
            {"bins", c.bins},
            {"dims", c.dims},
            {"best_kind", std::string(to_string(c.best_kind))},
            {"validation_auc", c.validation_auc}};
}

json to_j(const FamilyFoldResult& f) {
    return {{"family", f.family},         {"choice", to_j(f.choice)},   {"fv_dims", f.fv_dims},
            {"validation_auc", f.validation_auc}, {"test_auc", f.test_auc}, {"test", to_j(f.test)},
            {"fitted_on_games", f.fitted_on_games}};
}

json to_j(const FoldResult& f) {
    json families = json::array();
    for (const auto& x : f.families) families.push_back(to_j(x));
    return {{"fold", f.fold},
            {"train_games", f.train_games},
            {"inner_train_games", f.inner_train_games},
            {"validation_games", f.validation_games},
            {"test_games", f.test_games},
            {"families", std::move(families)},
            {"kinds", names(f.kinds)},
            {"weights", f.weights.alpha},
            {"validation_auc", f.validation_auc},
            {"test", to_j(f.test)}};
}

json to_j(const ExperimentReport& r) {
    json folds = json::array();
    for (const auto& f : r.folds) folds.push_back(to_j(f));
    json families = json::array();
    for (const auto& f : r.families) {
        families.push_back({{"family", f.family}, {"mean", to_j(f.mean)}, {"fold_auc", f.fold_auc}});
    }
    json top = json::array();
    for (const auto& e : r.top) {
        top.push_back({{"kinds", names(e.kinds)},
                       {"active", e.active},
                       {"mean_validation_auc", e.mean_validation_auc},
                       {"mean", to_j(e.mean)}});
    }
    json ablation = json::array();
    for (const auto& a : r.ablation) {
        ablation.push_back(
            {{"removed", a.removed}, {"mean", to_j(a.mean)}, {"fold_auc", a.fold_auc}, {"delta_auc", a.delta_auc}});
    }
    // Conventions that affect the numbers, echoed for readers of the report.
    json choices = json::object();
    for (const auto& f : r.config.families) {
        json c{{"type", std::string(to_string(f.type))}};
        if (f.type == FamilyType::Histogram) {
            c["bins_grid"] = f.bins;
            c["modes_grid"] = names(f.modes);
        } else {
            c["fv_normalize"] = f.fv_normalize;
            c["gmm_components"] = f.gmm_components;
        }
        if (f.type == FamilyType::LiarRankFisher) {
            c["rank_tie_rule"] = "query-first";
            c["normalize_ranks"] = f.normalize_ranks;
            c["dim_filter"] = "univariate-auc";
            c["max_dims"] = f.max_dims;
        }
        choices[f.name] = std::move(c);
    }
    choices["selection"] = "nested 80/20 holdout by games inside each training fold";
    return {{"format", "gdd-report"}, {"version", 1},          {"config", to_j(r.config)},
            {"mean", to_j(r.mean)},   {"folds", std::move(folds)}, {"families", std::move(families)},
            {"top", std::move(top)},  {"ablation", std::move(ablation)}, {"choices", std::move(choices)}};
}

json to_j(const BinEdges& b) { return {{"channel", b.channel}, {"edges", b.edges}}; }

json to_j(const HistogramEncoding& h) {
    return {{"mode", std::string(to_string(h.mode))},
            {"channel", h.channel},
            {"selected_dims", h.selected_dims},
            {"frame_edges", to_j(h.frame_edges)},
            {"clip_edges", to_j(h.clip_edges)},
            {"normalize", name(h.normalize)}};
}

json to_j(const GmmModel& g) {
    return {{"weights", to_j(g.weights)},
            {"means", matrix_to_j(g.means)},
            {"variances", matrix_to_j(g.variances)},
            {"log_likelihood_trace", g.log_likelihood_trace},
            {"iterations", g.iterations},
            {"converged", g.converged}};
}

json to_j(const LiarRankCorpus& c) {
    json member_game = json::object();
    for (const auto& [k, v] : c.member_game) member_game[k] = v;
    json member_values = json::object();
    for (const auto& [k, v] : c.member_values) member_values[k] = v;
    return {{"dims", c.dims},
            {"game_ids", c.game_ids},
            {"sorted_values", c.sorted_values},
            {"member_game", std::move(member_game)},
            {"member_values", std::move(member_values)}};
}

json to_j(const FittedEncoder& e) {
    return {{"family", e.family},
            {"type", std::string(to_string(e.type))},
            {"channel", e.channel},
            {"histogram", e.histogram ? to_j(*e.histogram) : json(nullptr)},
            {"gmm", e.gmm ? to_j(*e.gmm) : json(nullptr)},
            {"fv_normalize", e.fv_normalize},
            {"fv_dims", e.fv_dims},
            {"corpus", e.corpus ? to_j(*e.corpus) : json(nullptr)},
            {"normalize_ranks", e.normalize_ranks},
            {"fitted_on_games", e.fitted_on_games}};
}

json to_j(const TrainedModel& m) {
    json params = std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, KnnModel>) {
                return {{"train_x", matrix_to_j(p.train_x)}, {"train_y", p.train_y}, {"k", p.k}};
            } else if constexpr (std::is_same_v<P, LogisticModel> || std::is_same_v<P, LinearSvmModel>) {
                return {{"weights", to_j(p.weights)}, {"bias", p.bias}};
            } else if constexpr (std::is_same_v<P, NaiveBayesModel>) {
                return {{"mean", {to_j(p.mean[0]), to_j(p.mean[1])}},
                        {"var", {to_j(p.var[0]), to_j(p.var[1])}},
                        {"log_prior", {p.log_prior[0], p.log_prior[1]}}};
            } else {
                json trees = json::array();
                for (const auto& t : p.trees) {
                    json nodes = json::array();
                    for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.vote});
                    trees.push_back(std::move(nodes));
                }
                return {{"trees", std::move(trees)}};
            }
        },
        m.params);
    return {{"kind", std::string(to_string(m.kind))},
            {"hyperparams", to_j(m.hyperparams)},
            {"scaler", {{"mean", to_j(m.scaler.mean)}, {"scale", to_j(m.scaler.scale)}}},
            {"dim", m.dim},
            {"params", std::move(params)}};
}

json to_j(const ChannelSpec& c) {
    return {{"name", c.name}, {"dim", c.dim}, {"level", std::string(to_string(c.level))}, {"rate", c.rate}};
}

json to_j(const ModelBundle& b) {
    json channels = json::array();
    for (const auto& c : b.channels) channels.push_back(to_j(c));
    json families = json::array();
    for (const auto& f : b.families) {
        families.push_back({{"config", to_j(f.config)},
                            {"choice", to_j(f.choice)},
                            {"encoder", to_j(f.encoder)},
                            {"model", to_j(f.model)}});
    }
    return {{"format", "gdd-bundle"},
            {"version", b.version},
            {"sampling", to_j(b.sampling)},
            {"channels", std::move(channels)},
            {"families", std::move(families)},
            {"weights", b.weights.alpha},
            {"validation_auc", b.validation_auc},
            {"trained_on_games", b.trained_on_games}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string to_json_text(const ExperimentConfig& config) { return dump(to_j(config)); }

ExperimentConfig config_from_json(std::string_view text) {
    ExperimentConfig c;
    read(parse(text, "config"), "config", c);
    return c;
}

std::string to_json_text(const ExperimentReport& report) { return dump(to_j(report)); }

ExperimentReport report_from_json(std::string_view text) {
    ExperimentReport r;
    read(parse(text, "report"), "report", r);
    return r;
}

std::string to_json_text(const ModelBundle& bundle) { return dump(to_j(bundle)); }

ModelBundle bundle_from_json(std::string_view text) {
    ModelBundle b;
    read(parse(text, "bundle"), "bundle", b);
    return b;
}

std::string to_json_text(const FittedEncoder& encoder) { return dump(to_j(encoder)); }

FittedEncoder encoder_from_json(std::string_view text) {
    FittedEncoder e;
    read(parse(text, "encoder"), "encoder", e);
    return e;
}

SyntheticSpec synthetic_spec_from_json(std::string_view text) {
    SyntheticSpec s;
    read(parse(text, "synthetic spec"), "synthetic spec", s);
    return s;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::MissingFile, "cannot write '" + tmp.string() + "'");
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw Error(ErrorCode::MissingFile, "cannot write '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

}  // namespace gdd
