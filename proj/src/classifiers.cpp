#include "gdd/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gdd/error.hpp"
#include "gdd/rng.hpp"
#include "lbfgs.hpp"

namespace gdd {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(-m)) without overflow.
double logistic_loss(double m) {
    return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

void check_training_input(const Matrix& x, std::span<const int> y) {
    if (static_cast<std::size_t>(x.rows()) != y.size()) {
        throw Error(ErrorCode::DimMismatch, std::to_string(x.rows()) + " rows vs " + std::to_string(y.size()) + " labels");
    }
    if (x.rows() == 0 || x.cols() == 0) throw Error(ErrorCode::EmptyInput, "empty training matrix");
    if (!x.allFinite()) throw Error(ErrorCode::NonFiniteInput, "training matrix has non-finite values");
    bool has0 = false;
    bool has1 = false;
    for (int v : y) {
        if (v != 0 && v != 1) throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
        (v ? has1 : has0) = true;
    }
    if (!(has0 && has1)) throw Error(ErrorCode::SingleClassTraining, "training labels contain a single class");
}

// Trains w, b for (1/n) sum loss(y_i (w.x_i + b)) + (l2 / 2n) |w|^2 with
// y_i in {-1, +1}. `squared_hinge` selects the L-SVM loss, otherwise the
// logistic loss.
LinearModel fit_linear(const Matrix& xs, std::span<const int> y, double l2, bool squared_hinge, const Hyperparams& hp) {
    const Eigen::Index n = xs.rows();
    const Eigen::Index d = xs.cols();
    Vector ys(n);
    for (Eigen::Index i = 0; i < n; ++i) ys(i) = y[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
    const double inv_n = 1.0 / static_cast<double>(n);

    auto fg = [&](const Vector& theta, Vector& grad) {
        const auto w = theta.head(d);
        const double b = theta(d);
        const Vector margin = ((xs * w).array() + b).matrix().cwiseProduct(ys);
        Vector coef(n);  // d loss / d z_i
        double f = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double m = margin(i);
            if (squared_hinge) {
                const double slack = std::max(0.0, 1.0 - m);
                f += slack * slack;
                coef(i) = -2.0 * slack * ys(i);
            } else {
                f += logistic_loss(m);
                coef(i) = -sigmoid(-m) * ys(i);
            }
        }
        f = f * inv_n + 0.5 * l2 * inv_n * w.squaredNorm();
        grad.resize(d + 1);
        grad.head(d) = (xs.transpose() * coef) * inv_n + l2 * inv_n * w;
        grad(d) = coef.sum() * inv_n;
        return f;
    };

    Vector theta = Vector::Zero(d + 1);
    detail::minimize_lbfgs(fg, theta, hp.grad_tol, hp.max_iters);
    LinearModel m;
    m.weights = theta.head(d);
    m.bias = theta(d);
    return m;
}

NaiveBayesModel fit_nb(const Matrix& xs, std::span<const int> y, double floor) {
    NaiveBayesModel m;
    for (int c = 0; c < 2; ++c) {
        std::vector<Eigen::Index> rows;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] == c) rows.push_back(static_cast<Eigen::Index>(i));
        }
        const auto nc = static_cast<double>(rows.size());
        Vector mean = Vector::Zero(xs.cols());
        for (auto r : rows) mean += xs.row(r).transpose();
        mean /= nc;
        Vector var = Vector::Zero(xs.cols());
        for (auto r : rows) var += (xs.row(r).transpose() - mean).array().square().matrix();
        var = (var / nc).cwiseMax(floor);
        m.mean[static_cast<std::size_t>(c)] = std::move(mean);
        m.var[static_cast<std::size_t>(c)] = std::move(var);
        m.log_prior[static_cast<std::size_t>(c)] = std::log(nc / static_cast<double>(y.size()));
    }
    return m;
}

double gini(double pos, double total) {
    if (total <= 0.0) return 0.0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::span<const int> y, std::size_t max_depth, Rng& rng)
        : x_(x), y_(y), max_depth_(max_depth), rng_(rng),
          mtry_(std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))))) {
        features_.resize(static_cast<std::size_t>(x.cols()));
        std::iota(features_.begin(), features_.end(), 0);
    }

    DecisionTree build(std::vector<Eigen::Index> samples) {
        tree_.nodes.clear();
        grow(samples, 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<Eigen::Index>& samples, std::size_t depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        std::size_t pos = 0;
        for (auto s : samples) pos += static_cast<std::size_t>(y_[static_cast<std::size_t>(s)]);
        const std::size_t n = samples.size();
        tree_.nodes[static_cast<std::size_t>(id)].vote = 2 * pos > n ? 1 : 0;
        if (pos == 0 || pos == n || (max_depth_ > 0 && depth >= max_depth_) || n < 2) return id;

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_impurity = gini(static_cast<double>(pos), static_cast<double>(n)) * static_cast<double>(n);
        const double parent_impurity = best_impurity;

        // Visit features in random order until mtry non-constant ones were scored.
        rng_.shuffle(std::span<Eigen::Index>(features_));
        std::size_t scored = 0;
        std::vector<std::pair<double, int>> col(n);
        for (Eigen::Index f : features_) {
            if (scored >= mtry_) break;
            for (std::size_t i = 0; i < n; ++i) {
                col[i] = {x_(samples[i], f), y_[static_cast<std::size_t>(samples[i])]};
            }
            std::sort(col.begin(), col.end());
            if (col.front().first == col.back().first) continue;
            ++scored;
            double left_pos = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_pos += col[i].second;
                if (col[i].first == col[i + 1].first) continue;
                const auto nl = static_cast<double>(i + 1);
                const auto nr = static_cast<double>(n - i - 1);
                const double imp = gini(left_pos, nl) * nl + gini(static_cast<double>(pos) - left_pos, nr) * nr;
                if (imp < best_impurity - 1e-12) {
                    best_impurity = imp;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (col[i].first + col[i + 1].first);
                    if (!(best_threshold > col[i].first && best_threshold <= col[i + 1].first)) {
                        best_threshold = col[i].first;
                    }
                }
            }
        }
        if (best_feature < 0 || !(best_impurity < parent_impurity)) return id;

        std::vector<Eigen::Index> left;
        std::vector<Eigen::Index> right;
        for (auto s : samples) (x_(s, best_feature) <= best_threshold ? left : right).push_back(s);
        samples.clear();
        samples.shrink_to_fit();
        const int l = grow(left, depth + 1);
        const int r = grow(right, depth + 1);
        auto& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    const Matrix& x_;
    std::span<const int> y_;
    std::size_t max_depth_;
    Rng& rng_;
    std::size_t mtry_;
    std::vector<Eigen::Index> features_;
    DecisionTree tree_;
};

ForestModel fit_forest(const Matrix& xs, std::span<const int> y, const Hyperparams& hp, std::uint64_t seed) {
    ForestModel forest;
    forest.trees.reserve(hp.rf_trees);
    const auto n = static_cast<std::uint64_t>(xs.rows());
    for (std::size_t t = 0; t < hp.rf_trees; ++t) {
        Rng rng(Rng::derive(seed, t));
        std::vector<Eigen::Index> boot(static_cast<std::size_t>(n));
        for (auto& b : boot) b = static_cast<Eigen::Index>(rng.below(n));
        TreeBuilder builder(xs, y, hp.rf_max_depth, rng);
        forest.trees.push_back(builder.build(std::move(boot)));
    }
    return forest;
}

}  // namespace

std::string_view to_string(ClassifierKind kind) noexcept {
    switch (kind) {
        case ClassifierKind::KNN: return "KNN";
        case ClassifierKind::LogisticRegression: return "LR";
        case ClassifierKind::GaussianNB: return "NB";
        case ClassifierKind::LinearSVM: return "L-SVM";
        case ClassifierKind::RandomForest: return "RF";
    }
    return "?";
}

ClassifierKind classifier_kind_from_string(std::string_view s) {
    for (auto k : kAllClassifierKinds) {
        if (to_string(k) == s) return k;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown classifier kind '" + std::string(s) + "'");
}

Standardizer Standardizer::fit(const Matrix& x) {
    Standardizer s;
    s.mean = x.colwise().mean().transpose();
    s.scale = Vector::Ones(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double sd = std::sqrt((x.col(c).array() - s.mean(c)).square().mean());
        if (sd > 1e-12 * std::max(1.0, std::abs(s.mean(c)))) s.scale(c) = sd;
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
    Matrix out = x;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        out.col(c) = (x.col(c).array() - mean(c)) / scale(c);
    }
    return out;
}

int DecisionTree::predict(const double* row, Eigen::Index stride) const {
    int id = 0;
    while (true) {
        const auto& node = nodes[static_cast<std::size_t>(id)];
        if (node.feature < 0) return node.vote;
        id = row[node.feature * stride] <= node.threshold ? node.left : node.right;
    }
}

TrainedModel train(ClassifierKind kind, const Matrix& x, std::span<const int> y, const Hyperparams& hp,
                   std::uint64_t seed) {
    check_training_input(x, y);
    TrainedModel model;
    model.kind = kind;
    model.hyperparams = hp;
    model.dim = static_cast<std::size_t>(x.cols());
    model.scaler = Standardizer::fit(x);
    const Matrix xs = model.scaler.apply(x);

    switch (kind) {
        case ClassifierKind::KNN: {
            if (hp.knn_k < 1) throw Error(ErrorCode::InvalidArgument, "KNN needs k >= 1");
            model.params = KnnModel{xs, std::vector<int>(y.begin(), y.end()), hp.knn_k};
            break;
        }
        case ClassifierKind::LogisticRegression: {
            LogisticModel m;
            static_cast<LinearModel&>(m) = fit_linear(xs, y, hp.lr_l2, false, hp);
            model.params = std::move(m);
            break;
        }
        case ClassifierKind::LinearSVM: {
            LinearSvmModel m;
            static_cast<LinearModel&>(m) = fit_linear(xs, y, hp.svm_l2, true, hp);
            model.params = std::move(m);
            break;
        }
        case ClassifierKind::GaussianNB:
            model.params = fit_nb(xs, y, hp.nb_var_floor);
            break;
        case ClassifierKind::RandomForest:
            if (hp.rf_trees < 1) throw Error(ErrorCode::InvalidArgument, "random forest needs at least one tree");
            model.params = fit_forest(xs, y, hp, seed);
            break;
    }
    return model;
}

std::vector<double> predict_scores(const TrainedModel& model, const Matrix& x) {
    if (static_cast<std::size_t>(x.cols()) != model.dim) {
        throw Error(ErrorCode::DimMismatch, "model expects " + std::to_string(model.dim) + " features, got " +
                                                std::to_string(x.cols()));
    }
    if (!x.allFinite()) throw Error(ErrorCode::NonFiniteInput, "prediction matrix has non-finite values");
    const Matrix xs = model.scaler.apply(x);
    const auto n = static_cast<std::size_t>(xs.rows());
    std::vector<double> out(n);

    struct Visitor {
        const Matrix& xs;
        std::vector<double>& out;

        void operator()(const KnnModel& m) const {
            const std::size_t k = std::min(m.k, m.train_y.size());
            std::vector<std::pair<double, std::size_t>> dist(m.train_y.size());
            for (Eigen::Index i = 0; i < xs.rows(); ++i) {
                const Vector d2 = (m.train_x.rowwise() - xs.row(i)).rowwise().squaredNorm();
                for (std::size_t j = 0; j < dist.size(); ++j) dist[j] = {d2(static_cast<Eigen::Index>(j)), j};
                std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
                int spies = 0;
                for (std::size_t j = 0; j < k; ++j) spies += m.train_y[dist[j].second];
                out[static_cast<std::size_t>(i)] = static_cast<double>(spies) / static_cast<double>(k);
            }
        }
        void operator()(const LogisticModel& m) const {
            const Vector z = (xs * m.weights).array() + m.bias;
            for (Eigen::Index i = 0; i < z.size(); ++i) out[static_cast<std::size_t>(i)] = sigmoid(z(i));
        }
        void operator()(const LinearSvmModel& m) const {
            const Vector z = (xs * m.weights).array() + m.bias;
            for (Eigen::Index i = 0; i < z.size(); ++i) out[static_cast<std::size_t>(i)] = sigmoid(z(i));
        }
        void operator()(const NaiveBayesModel& m) const {
            std::array<double, 2> lp{};
            for (Eigen::Index i = 0; i < xs.rows(); ++i) {
                for (std::size_t c = 0; c < 2; ++c) {
                    const auto diff = xs.row(i).transpose() - m.mean[c];
                    lp[c] = m.log_prior[c] - 0.5 * ((diff.array().square() / m.var[c].array()).sum() +
                                                    (2.0 * 3.141592653589793 * m.var[c].array()).log().sum());
                }
                out[static_cast<std::size_t>(i)] = sigmoid(lp[1] - lp[0]);
            }
        }
        void operator()(const ForestModel& m) const {
            for (Eigen::Index i = 0; i < xs.rows(); ++i) {
                int votes = 0;
                for (const auto& t : m.trees) votes += t.predict(&xs(i, 0), xs.rows());
                out[static_cast<std::size_t>(i)] = static_cast<double>(votes) / static_cast<double>(m.trees.size());
            }
        }
    };
    std::visit(Visitor{xs, out}, model.params);
    return out;
}

void ScoreSet::validate() const {
    if (player_ids.size() != scores.size() || labels.size() != scores.size()) {
        throw Error(ErrorCode::DimMismatch, "score set fields have different lengths");
    }
    for (double s : scores) {
        if (!std::isfinite(s)) throw Error(ErrorCode::NonFiniteInput, "score set contains non-finite scores");
    }
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw Error(ErrorCode::DimMismatch, "scores and labels differ in length");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        // Average of 1-based ranks i+1 .. j, kept in halves so it stays exact.
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) {
            if (labels[order[t]] == 1) {
                rank_sum_pos += avg_rank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw Error(ErrorCode::SingleClassEval, "AUC needs both classes");
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

MetricReport classification_metrics(std::span<const double> scores, std::span<const int> labels, double threshold) {
    MetricReport r;
    r.auc = auc(scores, labels);
    r.threshold = threshold;
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] >= threshold;
        if (labels[i] == 1) {
            (pred ? tp : fn) += 1.0;
        } else {
            (pred ? fp : tn) += 1.0;
        }
    }
    r.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    r.recall = tp / (tp + fn);
    r.fnr = fn / (tp + fn);
    r.fpr = fp / (fp + tn);
    r.f1 = r.precision + r.recall > 0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

}  // namespace gdd
