#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "../support.hpp"
#include "gdd/classifiers.hpp"
#include "gdd/error.hpp"

using namespace gdd;

namespace {

struct Data {
    Matrix x;
    std::vector<int> y;
};

// 1-D two-class data: class 1 centred at +shift/2, class 0 at -shift/2.
Data gaussian_1d(Rng& rng, std::size_t n, double shift, std::size_t extra_dims = 0) {
    Data d;
    d.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(1 + extra_dims));
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i % 2 == 0 ? 1 : 0;
        d.y.push_back(label);
        const auto r = static_cast<Eigen::Index>(i);
        d.x(r, 0) = rng.normal(label ? shift / 2 : -shift / 2, 1.0);
        for (std::size_t e = 0; e < extra_dims; ++e) d.x(r, static_cast<Eigen::Index>(1 + e)) = rng.normal();
    }
    return d;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected gdd::Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("auc examples and errors") {
    CHECK(auc(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0}) == 1.0);
    CHECK(auc(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0}) == 0.5);
    CHECK(auc(std::vector<double>{0.8, 0.6, 0.7, 0.2}, std::vector<int>{1, 1, 0, 0}) == 0.75);
    CHECK(code_of([] { auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}); }) == ErrorCode::SingleClassEval);
}

TEST_CASE("auc matches the pairwise oracle, label flip and monotone transforms") {
    Rng rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.below(49);
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng.below(8)) / 8.0;
            y[i] = static_cast<int>(rng.below(2));
        }
        y[0] = 1;
        y[1] = 0;
        const double a = auc(s, y);
        CHECK(std::abs(a - test::pairwise_auc(s, y)) <= 1e-12);
        std::vector<int> flipped(n);
        for (std::size_t i = 0; i < n; ++i) flipped[i] = 1 - y[i];
        CHECK(a + auc(s, flipped) == doctest::Approx(1.0).epsilon(1e-12));
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = std::exp(3.0 * s[i]) + s[i];
        CHECK(auc(t, y) == a);
    }
}

TEST_CASE("classification_metrics confusion arithmetic") {
    // TP=2, FP=1, FN=3, TN=4
    const std::vector<double> s{0.9, 0.8, 0.7, 0.1, 0.1, 0.1, 0.2, 0.2, 0.2, 0.2};
    const std::vector<int> y{1, 1, 0, 1, 1, 1, 0, 0, 0, 0};
    const auto m = classification_metrics(s, y);
    CHECK(m.precision == doctest::Approx(2.0 / 3.0));
    CHECK(m.recall == doctest::Approx(0.4));
    CHECK(m.f1 == doctest::Approx(0.5));
    CHECK(m.fnr == doctest::Approx(0.6));
    CHECK(m.fpr == doctest::Approx(0.2));
    CHECK(m.fnr == doctest::Approx(1.0 - m.recall));

    const auto perfect = classification_metrics(std::vector<double>{1.0, 0.9, 0.1, 0.0}, std::vector<int>{1, 1, 0, 0});
    CHECK(perfect.f1 == 1.0);
    CHECK(perfect.fnr == 0.0);
    CHECK(perfect.fpr == 0.0);
    CHECK(perfect.auc == 1.0);

    const auto zero = classification_metrics(std::vector<double>{0, 0, 0, 0}, std::vector<int>{1, 0, 1, 0});
    CHECK(zero.recall == 0.0);
    CHECK(zero.fnr == 1.0);
    CHECK(zero.f1 == 0.0);
}

TEST_CASE("logistic regression on separable 1-D data") {
    Rng rng(1);
    Data d;
    d.x.resize(200, 1);
    for (Eigen::Index i = 0; i < 200; ++i) {
        const int label = i % 2;
        d.y.push_back(label);
        d.x(i, 0) = (label ? 1.0 : -1.0) * rng.uniform(0.05, 3.0);
    }
    const auto m = train(ClassifierKind::LogisticRegression, d.x, d.y, Hyperparams{}, 0);
    const auto& lin = std::get<LogisticModel>(m.params);
    CHECK(lin.weights(0) > 0.0);
    CHECK(auc(predict_scores(m, d.x), d.y) >= 0.99);

    // At the decision boundary the score is 0.5.
    Matrix boundary(1, 1);
    boundary(0, 0) = m.scaler.mean(0) - lin.bias / lin.weights(0) * m.scaler.scale(0);
    CHECK(predict_scores(m, boundary)[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("gaussian naive bayes boundary for symmetric classes") {
    Rng rng(2);
    const auto d = gaussian_1d(rng, 1000, 4.0);
    const auto m = train(ClassifierKind::GaussianNB, d.x, d.y, Hyperparams{}, 0);
    // Bisect the 0.5 crossing.
    double lo = -2.0;
    double hi = 2.0;
    for (int i = 0; i < 60; ++i) {
        Matrix q(1, 1);
        q(0, 0) = 0.5 * (lo + hi);
        (predict_scores(m, q)[0] < 0.5 ? lo : hi) = q(0, 0);
    }
    CHECK(std::abs(lo) < 0.1);
}

TEST_CASE("knn and forest scores are vote fractions") {
    Matrix x(6, 1);
    x << 0.0, 0.1, 0.2, 5.0, 5.1, 5.2;
    const std::vector<int> y{1, 1, 1, 0, 0, 0};
    Hyperparams hp;
    hp.knn_k = 3;
    const auto knn = train(ClassifierKind::KNN, x, y, hp, 0);
    Matrix q(2, 1);
    q << 0.05, 5.05;
    const auto s = predict_scores(knn, q);
    CHECK(s[0] == 1.0);
    CHECK(s[1] == 0.0);

    Rng rng(9);
    const auto d = gaussian_1d(rng, 120, 1.0, 2);
    const auto rf = train(ClassifierKind::RandomForest, d.x, d.y, Hyperparams{}, 4);
    const auto& forest = std::get<ForestModel>(rf.params);
    CHECK(forest.trees.size() == 100);
    const auto scores = predict_scores(rf, d.x.topRows(10));
    for (Eigen::Index i = 0; i < 10; ++i) {
        // Trees see standardized rows.
        const Matrix z = rf.scaler.apply(d.x.row(i));
        int votes = 0;
        for (const auto& t : forest.trees) votes += t.predict(z.data(), 1);
        CHECK(scores[static_cast<std::size_t>(i)] == doctest::Approx(votes / 100.0));
    }
}

TEST_CASE("training errors") {
    Matrix x = Matrix::Random(4, 2);
    CHECK(code_of([&] { train(ClassifierKind::KNN, x, std::vector<int>{1, 1, 1, 1}, Hyperparams{}, 0); }) ==
          ErrorCode::SingleClassTraining);
    Matrix bad = x;
    bad(1, 1) = std::nan("");
    CHECK(code_of([&] { train(ClassifierKind::GaussianNB, bad, std::vector<int>{1, 0, 1, 0}, Hyperparams{}, 0); }) ==
          ErrorCode::NonFiniteInput);
    const auto m = train(ClassifierKind::LogisticRegression, x, std::vector<int>{1, 0, 1, 0}, Hyperparams{}, 0);
    CHECK(code_of([&] { predict_scores(m, Matrix::Zero(2, 3)); }) == ErrorCode::DimMismatch);
}

TEST_CASE("every kind: scores in [0,1], determinism and separable floor") {
    for (auto kind : kAllClassifierKinds) {
        CAPTURE(to_string(kind));
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            Rng rng(100 + seed);
            const auto train_set = gaussian_1d(rng, 400, 4.0);
            const auto test_set = gaussian_1d(rng, 400, 4.0);
            const auto a = train(kind, train_set.x, train_set.y, Hyperparams{}, seed);
            const auto b = train(kind, train_set.x, train_set.y, Hyperparams{}, seed);
            const auto sa = predict_scores(a, test_set.x);
            CHECK(sa == predict_scores(b, test_set.x));
            for (double s : sa) {
                CHECK(s >= 0.0);
                CHECK(s <= 1.0);
            }
            CHECK(auc(sa, test_set.y) >= 0.95);
        }
    }
}

TEST_CASE("affine rescaling of inputs is absorbed by the standardizer") {
    Rng rng(17);
    const auto d = gaussian_1d(rng, 150, 2.0, 2);
    Matrix scaled = d.x;
    scaled.col(0) = scaled.col(0) * 250.0 + Vector::Constant(scaled.rows(), -40.0);
    scaled.col(2) = scaled.col(2) * 0.01 + Vector::Constant(scaled.rows(), 3.0);
    for (auto kind : {ClassifierKind::KNN, ClassifierKind::LogisticRegression, ClassifierKind::LinearSVM}) {
        CAPTURE(to_string(kind));
        const auto a = predict_scores(train(kind, d.x, d.y, Hyperparams{}, 1), d.x);
        const auto b = predict_scores(train(kind, scaled, d.y, Hyperparams{}, 1), scaled);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-6);
    }
}

TEST_CASE("classifier kind names round-trip") {
    for (auto kind : kAllClassifierKinds) CHECK(classifier_kind_from_string(to_string(kind)) == kind);
    CHECK_THROWS_AS(classifier_kind_from_string("SVM-RBF"), Error);
}
