#include "fixtures.hpp"
#include "oracles.hpp"

#include "stacksent/boosting.hpp"
#include "stacksent/classifier.hpp"
#include "stacksent/error.hpp"
#include "stacksent/knn.hpp"
#include "stacksent/logreg.hpp"
#include "stacksent/numeric.hpp"
#include "stacksent/random.hpp"

#include <gtest/gtest.h>

using namespace stacksent;

namespace {

double accuracy(const ProbMatrix& probs, std::span<const Label> y)
{
    int hit = 0;
    for (Eigen::Index i = 0; i < probs.rows(); ++i)
        hit += argmax_label(probs.row(i)) == y[static_cast<std::size_t>(i)];
    return static_cast<double>(hit) / static_cast<double>(y.size());
}

void expect_valid_rows(const ProbMatrix& p)
{
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        EXPECT_TRUE(is_valid_prob_dist(p.row(i).transpose())) << "row " << i << ": " << p.row(i);
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::Io;
}

// Maps Negative->Positive->Neutral->Negative.
Label rotate(Label l) { return label_from_index((index_of(l) + 2) % 3); }

} // namespace

TEST(Numeric, SoftmaxShiftInvariantAndStable)
{
    Eigen::Matrix<double, 2, 3> z;
    z << 10, 0, 0, 1000, 999, -1000;
    const auto p = softmax_rows(z);
    EXPECT_GT(p(0, 0), 0.999);
    EXPECT_TRUE(p.allFinite());
    const auto q = softmax_rows((z.array() + 37.5).matrix());
    EXPECT_LT((p - q).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(log_sum_exp_rows(z)(1), 1000 + std::log1p(std::exp(-1.0)), 1e-12);
}

TEST(LogReg, ZeroWeightsGiveUniform)
{
    LogRegModel m;
    m.weights = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, 4);
    const auto p = predict_logreg(m, Eigen::RowVectorXd::Random(4));
    EXPECT_TRUE(p.isApproxToConstant(1.0 / 3.0));
}

TEST(LogReg, GradientMatchesFiniteDifferences)
{
    SplitMix64 rng(2);
    for (int point = 0; point < 20; ++point) {
        const auto data = fixtures::random_dataset(25, 4, static_cast<std::uint64_t>(point));
        Eigen::Matrix<double, 3, Eigen::Dynamic> W(3, 4);
        for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = 2 * rng.normal();
        const Eigen::Vector3d b(rng.normal(), rng.normal(), rng.normal());
        EXPECT_LT(oracle::logreg_gradient_error(W, b, data.X, data.y, 0.1 + point), 1e-4);
    }
}

TEST(LogReg, SeparatesBlobs)
{
    const auto d = fixtures::blobs(30, 2 + 1, 6.0, 0.5, 4);
    const auto m = train_logreg(d.X, d.y, {0.1, 1e-6, 5000});
    EXPECT_TRUE(m.converged);
    const auto p = predict_logreg_rows(m, d.X);
    EXPECT_DOUBLE_EQ(accuracy(p, d.y), 1.0);
    expect_valid_rows(p);
}

TEST(LogReg, Errors)
{
    const auto d = fixtures::blobs(5, 3, 3.0, 0.5, 1);
    std::vector<Label> one(d.y.size(), Label::Neutral);
    EXPECT_EQ(code_of([&] { train_logreg(d.X, one); }), ErrorCode::SingleClass);
    EXPECT_EQ(code_of([&] { train_logreg(d.X, d.y, {-1.0, 1e-6, 10}); }), ErrorCode::InvalidArgument);
    const auto m = train_logreg(d.X, d.y);
    EXPECT_EQ(code_of([&] { predict_logreg(m, Eigen::RowVectorXd::Zero(5)); }), ErrorCode::DimMismatch);
}

TEST(LogReg, LabelPermutationEquivariance)
{
    const auto d = fixtures::blobs(15, 4, 2.0, 1.0, 6);
    std::vector<Label> permuted;
    for (auto l : d.y) permuted.push_back(rotate(l));
    const auto a = predict_logreg_rows(train_logreg(d.X, d.y), d.X);
    const auto b = predict_logreg_rows(train_logreg(d.X, permuted), d.X);
    for (int k = 0; k < 3; ++k) {
        const int to = index_of(rotate(label_from_index(k)));
        EXPECT_LT((a.col(k) - b.col(to)).cwiseAbs().maxCoeff(), 1e-5);
    }
}

TEST(Knn, Examples)
{
    Eigen::MatrixXd X(4, 1);
    X << 0, 1, 2, 10;
    const std::vector<Label> y{Label::Positive, Label::Positive, Label::Negative, Label::Neutral};
    const auto k1 = train_knn(X, y, 1);
    const auto exact = predict_knn(k1, X.row(2));
    EXPECT_EQ(exact, ProbDist(1, 0, 0));

    const auto k3 = train_knn(X, y, 3);
    const auto q = query_knn(k3, Eigen::RowVectorXd::Constant(1, 1.0));
    EXPECT_TRUE(q.probs.isApprox(ProbDist(1.0 / 3, 0, 2.0 / 3)));
    EXPECT_EQ(q.label, Label::Positive);

    EXPECT_EQ(code_of([&] { train_knn(X, y, 5); }), ErrorCode::KTooLarge);
}

TEST(Knn, VoteTieBrokenBySummedDistance)
{
    Eigen::MatrixXd X(2, 1);
    X << -1, 3;
    const std::vector<Label> y{Label::Positive, Label::Negative};
    const auto m = train_knn(X, y, 2);
    EXPECT_EQ(query_knn(m, Eigen::RowVectorXd::Constant(1, 0.0)).label, Label::Positive);
    EXPECT_EQ(query_knn(m, Eigen::RowVectorXd::Constant(1, 2.0)).label, Label::Negative);
}

TEST(Knn, DistanceTieKeepsLowerIndex)
{
    Eigen::MatrixXd X(3, 1);
    X << 1, -1, 1;
    const std::vector<Label> y{Label::Neutral, Label::Negative, Label::Positive};
    const auto m = train_knn(X, y, 1);
    EXPECT_EQ(query_knn(m, Eigen::RowVectorXd::Zero(1)).neighbors, std::vector<std::size_t>{0});
}

TEST(Knn, MatchesExhaustiveScan)
{
    const auto train = fixtures::random_dataset(200, 10, 31);
    const auto queries = fixtures::random_dataset(50, 10, 32);
    for (int k : {1, 3, 7}) {
        const auto m = train_knn(train.X, train.y, k);
        for (Eigen::Index q = 0; q < queries.X.rows(); ++q) {
            const auto got = query_knn(m, queries.X.row(q));
            const auto want = oracle::nearest(train.X, queries.X.row(q), k);
            EXPECT_EQ(got.neighbors, want);
            EXPECT_EQ(got.probs, oracle::vote(train.y, want));
        }
    }
}

TEST(Knn, LabelPermutationEquivariance)
{
    const auto d = fixtures::random_dataset(40, 3, 12);
    std::vector<Label> permuted;
    for (auto l : d.y) permuted.push_back(rotate(l));
    const auto q = fixtures::random_dataset(10, 3, 13);
    const auto a = predict_knn_rows(train_knn(d.X, d.y, 5), q.X);
    const auto b = predict_knn_rows(train_knn(d.X, permuted, 5), q.X);
    for (int k = 0; k < 3; ++k) EXPECT_EQ(a.col(k), b.col(index_of(rotate(label_from_index(k)))));
}

TEST(AdaBoost, SeparableDataStopsAfterOneStage)
{
    Eigen::MatrixXd X(6, 1);
    X << 0, 1, 2, 10, 11, 12;
    const std::vector<Label> y{Label::Negative, Label::Negative, Label::Negative,
                               Label::Positive, Label::Positive, Label::Positive};
    const auto m = train_adaboost(X, y, {50, 1, 1});
    ASSERT_EQ(m.stages.size(), 1u);
    EXPECT_EQ(m.stages[0].error, 0.0);
    EXPECT_DOUBLE_EQ(accuracy(predict_adaboost_rows(m, X), y), 1.0);
}

TEST(AdaBoost, XorMatchesReferenceSamme)
{
    const auto d = fixtures::xor_quadrants(25, 3);
    const auto one = train_adaboost(d.X, d.y, {1, 1, 1});
    const auto many = train_adaboost(d.X, d.y, {50, 1, 1});
    const auto reference = oracle::samme_stumps(d.X, d.y, 50);
    ASSERT_EQ(many.stages.size(), reference.alphas.size());
    for (std::size_t s = 0; s < many.stages.size(); ++s) {
        EXPECT_NEAR(many.stages[s].alpha, reference.alphas[s], 1e-9);
        EXPECT_LT(many.stages[s].error, 1.0 - 1.0 / 3.0);
    }
    const auto probs = predict_adaboost_rows(many, d.X);
    for (Eigen::Index i = 0; i < probs.rows(); ++i)
        EXPECT_EQ(argmax_label(probs.row(i)), reference.train_labels[static_cast<std::size_t>(i)]);
    const double single = accuracy(predict_adaboost_rows(one, d.X), d.y);
    EXPECT_LE(single, 0.75);
    EXPECT_GT(accuracy(probs, d.y), single + 0.1);
    expect_valid_rows(probs);
}

TEST(AdaBoost, StageErrorsOnBenchmark)
{
    const auto d = fixtures::benchmark_features(FeatureSet::Tfidf);
    const auto m = train_adaboost(d.X, d.y, {100, 1, 1});
    ASSERT_FALSE(m.stages.empty());
    for (const auto& s : m.stages) {
        EXPECT_LT(s.error, 2.0 / 3.0);
        EXPECT_GT(s.alpha, 0.0);
    }
    EXPECT_EQ(code_of([&] { train_adaboost(d.X, d.y, {0, 1, 1}); }), ErrorCode::InvalidArgument);
}

TEST(Gbdt, LossNonIncreasingOnBenchmark)
{
    const auto d = fixtures::benchmark_features(FeatureSet::TfidfEmbeddings);
    for (double lr : {0.01, 0.2}) {
        const auto m = train_gbdt(d.X, d.y, {50, lr, 6, 5});
        ASSERT_EQ(m.train_loss.size(), 51u);
        for (std::size_t i = 1; i < m.train_loss.size(); ++i) EXPECT_LE(m.train_loss[i], m.train_loss[i - 1]);
    }
}

TEST(Gbdt, StartsFromClassPriors)
{
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(10, 1);
    std::vector<Label> y(10, Label::Negative);
    y[9] = Label::Positive;
    const auto m = train_gbdt(X, y, {1, 0.1, 3, 1});
    const auto p = predict_gbdt(m, X.row(0));
    EXPECT_GT(p(0), 0.85);
    EXPECT_TRUE(is_valid_prob_dist(p));
    EXPECT_NEAR(m.initial_scores(0) - m.initial_scores(2), std::log(9.0), 1e-6);
    EXPECT_EQ(code_of([&] { train_gbdt(X, y, {0, 0.1, 3, 1}); }), ErrorCode::InvalidArgument);
}

TEST(Gbdt, FitsBlobs)
{
    const auto d = fixtures::blobs(30, 4, 4.0, 0.7, 8);
    const auto m = train_gbdt(d.X, d.y, {50, 0.01, 6, 5});
    EXPECT_GE(accuracy(predict_gbdt_rows(m, d.X), d.y), 0.95);
}

TEST(Bagging, SingleFullSampleMemberEqualsPlainGbdt)
{
    const auto d = fixtures::blobs(20, 3, 2.0, 1.0, 9);
    const GbdtConfig g{20, 0.1, 3, 2};
    const auto bagged = train_bagged_gbdt(d.X, d.y, {1, false, g}, 77);
    const auto plain = train_gbdt(d.X, d.y, g);
    EXPECT_EQ(predict_bagged_rows(bagged, d.X), predict_gbdt_rows(plain, d.X));
}

TEST(Bagging, DeterministicAndValid)
{
    const auto d = fixtures::blobs(20, 3, 1.5, 1.0, 10);
    const BaggingConfig c{5, true, {20, 0.1, 3, 2}};
    const auto a = predict_bagged_rows(train_bagged_gbdt(d.X, d.y, c, 5), d.X);
    const auto b = predict_bagged_rows(train_bagged_gbdt(d.X, d.y, c, 5), d.X);
    const auto other = predict_bagged_rows(train_bagged_gbdt(d.X, d.y, c, 6), d.X);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, other);
    expect_valid_rows(a);
}

TEST(Classifiers, FuzzedInputsGiveValidDistributions)
{
    const auto d = fixtures::blobs(10, 5, 2.0, 1.0, 14);
    Hyperparams hp;
    hp.adaboost.n_estimators = 10;
    hp.bagging = {3, true, {10, 0.1, 3, 2}};
    hp.cse_folds = 3;
    SplitMix64 rng(1);
    Eigen::MatrixXd fuzz(40, 5);
    for (Eigen::Index i = 0; i < fuzz.size(); ++i) fuzz.data()[i] = rng.normal() * std::pow(10.0, rng.uniform(7)) - 3;
    for (ModelKind kind : kAllModelKinds) {
        const auto model = train_classifier(kind, d.X, d.y, hp, 3);
        const auto p = predict_proba_rows(model, fuzz);
        EXPECT_EQ(p.rows(), 40);
        expect_valid_rows(p);
        EXPECT_EQ(kind_of(model), kind);
    }
}
