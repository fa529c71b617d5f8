#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gdd/types.hpp"

namespace gdd {

enum class ClassifierKind { KNN, LogisticRegression, GaussianNB, LinearSVM, RandomForest };

inline constexpr std::array<ClassifierKind, 5> kAllClassifierKinds{
    ClassifierKind::KNN, ClassifierKind::LogisticRegression, ClassifierKind::GaussianNB,
    ClassifierKind::LinearSVM, ClassifierKind::RandomForest};

// Short names used in configs and report tables: KNN, LR, NB, L-SVM, RF.
std::string_view to_string(ClassifierKind kind) noexcept;
ClassifierKind classifier_kind_from_string(std::string_view s);

struct Hyperparams {
    std::size_t knn_k = 5;
    double lr_l2 = 1.0;
    double svm_l2 = 1.0;
    std::size_t rf_trees = 100;
    std::size_t rf_max_depth = 0;  // 0 = unlimited
    double nb_var_floor = 1e-9;
    double grad_tol = 1e-6;
    std::size_t max_iters = 1000;

    bool operator==(const Hyperparams&) const = default;
};

// Per-dimension z-scoring fitted on training rows. Constant columns map to 0.
struct Standardizer {
    Vector mean;
    Vector scale;

    static Standardizer fit(const Matrix& x);
    Matrix apply(const Matrix& x) const;
};

struct KnnModel {
    Matrix train_x;  // standardized
    std::vector<int> train_y;
    std::size_t k = 5;
};

struct LinearModel {
    Vector weights;
    double bias = 0.0;
};

struct LogisticModel : LinearModel {};
struct LinearSvmModel : LinearModel {};

struct NaiveBayesModel {
    std::array<Vector, 2> mean;
    std::array<Vector, 2> var;
    std::array<double, 2> log_prior{};
};

struct TreeNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int vote = 0;  // leaf class
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    int predict(const double* row, Eigen::Index stride) const;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
};

using ModelParams = std::variant<KnnModel, LogisticModel, NaiveBayesModel, LinearSvmModel, ForestModel>;

struct TrainedModel {
    ClassifierKind kind = ClassifierKind::LogisticRegression;
    Hyperparams hyperparams;
    Standardizer scaler;
    std::size_t dim = 0;
    ModelParams params;
};

// Labels are 1 for spy and 0 for resistance.
TrainedModel train(ClassifierKind kind, const Matrix& x, std::span<const int> y, const Hyperparams& hp,
                   std::uint64_t seed);

// Spy probability per row, in [0, 1].
std::vector<double> predict_scores(const TrainedModel& model, const Matrix& x);

struct ScoreSet {
    std::vector<std::string> player_ids;
    std::vector<double> scores;
    std::vector<int> labels;

    std::size_t size() const { return scores.size(); }
    void validate() const;
};

struct MetricReport {
    double auc = 0.0;
    double f1 = 0.0;
    double fnr = 0.0;
    double fpr = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double threshold = 0.5;
};

// Mann-Whitney AUC: P(spy score > resistance score) + P(tie) / 2.
double auc(std::span<const double> scores, std::span<const int> labels);

MetricReport classification_metrics(std::span<const double> scores, std::span<const int> labels,
                                    double threshold = 0.5);

}  // namespace gdd
